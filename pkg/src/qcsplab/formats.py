"""Reading and writing structures, sentences, operations and algebras.

Structure files are JSON objects::

    {"domain": ["0", "1", "2"],
     "relations": [{"name": "r", "arity": 2,
                    "dnf": [[{"v": 0, "eq_v": 1}], [{"v": 0, "eq_c": "2"}]]}],
     "families": [{"name": "tau", "kind": "tau", "alpha": ["0", "1"], "beta": ["1", "2"]}],
     "constants": false}

Extensions are never written; they are re-derived from the DNF.  An empty
``dnf`` array denotes the empty relation.

Sentences are text: ``A x1 E y1 : tau_1(x1,x1,y1) & eq(y1,1)``.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from qcsplab.dnf import DnfFormula, VarEqConst, VarEqVar, dnf_to_extension, extension_to_dnf
from qcsplab.gadgets import CutPair, FamilySpec
from qcsplab.model import (
    EXISTS, FORALL, Algebra, Atom, Domain, Operation, ParseError, PHSentence, QcspLabError,
    Relation, Structure)


def _dnf_from_json(raw, arity: int, d: Domain) -> DnfFormula:
    disjuncts = []
    for conj in raw:
        atoms = []
        for a in conj:
            if "eq_v" in a:
                atoms.append(VarEqVar(int(a["v"]), int(a["eq_v"])))
            elif "eq_c" in a:
                atoms.append(VarEqConst(int(a["v"]), d.index(str(a["eq_c"]))))
            else:
                raise ParseError(f"bad DNF atom {a!r}")
        disjuncts.append(tuple(atoms))
    try:
        return DnfFormula(arity, tuple(disjuncts))
    except ValueError as e:
        raise ParseError(str(e)) from None


def _dnf_to_json(f: DnfFormula, d: Domain) -> list:
    return [[{"v": a.i, "eq_v": a.j} if isinstance(a, VarEqVar) else {"v": a.i, "eq_c": d.name(a.c)}
             for a in conj] for conj in f.disjuncts]


def structure_from_json(doc: dict) -> Structure:
    try:
        domain = Domain(tuple(doc["domain"]))
    except (KeyError, ValueError) as e:
        raise ParseError(f"bad domain: {e}") from None
    relations = []
    for raw in doc.get("relations", []):
        unknown = set(raw) - {"name", "arity", "dnf"}
        if unknown or "dnf" not in raw:
            raise ParseError(f"relation entries need exactly name, arity, dnf; got {sorted(raw)}")
        name, arity = raw["name"], int(raw["arity"])
        if raw["dnf"]:
            dnf = _dnf_from_json(raw["dnf"], arity, domain)
            relations.append(Relation(name, arity, dnf_to_extension(dnf, arity, domain), dnf))
        else:
            relations.append(Relation(name, arity, frozenset()))
    families = []
    for raw in doc.get("families", []):
        cut = CutPair(domain, {domain.index(str(x)) for x in raw["alpha"]},
                      {domain.index(str(x)) for x in raw["beta"]})
        families.append(FamilySpec(raw.get("name", raw["kind"]), raw["kind"], cut))
    return Structure(domain, tuple(relations), tuple(families), bool(doc.get("constants", False)))


def structure_to_json(s: Structure) -> dict:
    rels = []
    for r in s.relations:
        if r.dnf is not None:
            dnf = _dnf_to_json(r.dnf, s.domain)
        elif r.extension:
            dnf = _dnf_to_json(extension_to_dnf(r), s.domain)
        else:
            dnf = []
        rels.append({"name": r.name, "arity": r.arity, "dnf": dnf})
    doc = {"domain": list(s.domain.elements), "relations": rels}
    if s.families:
        name = s.domain.name
        doc["families"] = [{"name": f.name, "kind": f.kind,
                            "alpha": [name(i) for i in sorted(f.cut.alpha)],
                            "beta": [name(i) for i in sorted(f.cut.beta)]} for f in s.families]
    if s.constants:
        doc["constants"] = True
    return doc


def load_structure(path) -> Structure:
    return structure_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def dump_structure(s: Structure, path) -> None:
    Path(path).write_text(json.dumps(structure_to_json(s), indent=2) + "\n", encoding="utf-8")


# Sentences

_ATOM = re.compile(r"\s*([A-Za-z_][\w]*)\s*\(([^()]*)\)\s*$")


def parse_sentence(text: str, d: Domain) -> PHSentence:
    """Parse ``A x E y : r(x,y) & eq(y,a)``; a bare ``:`` body may be empty."""
    text = " ".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    if ":" not in text:
        raise ParseError("missing ':' between prefix and body")
    head, body = text.split(":", 1)
    words = head.split()
    if len(words) % 2:
        raise ParseError("prefix must alternate quantifier and variable")
    prefix = []
    for q, v in zip(words[::2], words[1::2]):
        if q not in (FORALL, EXISTS):
            raise ParseError(f"unknown quantifier {q!r}")
        if v in d.elements:
            raise ParseError(f"variable {v!r} clashes with a domain element name")
        prefix.append((q, v))
    variables = {v for _, v in prefix}
    atoms = []
    if body.strip():
        for chunk in body.split("&"):
            m = _ATOM.match(chunk)
            if m is None:
                raise ParseError(f"cannot parse atom {chunk.strip()!r}")
            args = []
            for tok in (t.strip() for t in m.group(2).split(",")):
                if tok in variables:
                    args.append(tok)
                elif tok in d.elements:
                    args.append(d.index(tok))
                else:
                    raise ParseError(f"{tok!r} is neither a quantified variable nor a domain element")
            atoms.append(Atom(m.group(1), tuple(args)))
    try:
        return PHSentence(tuple(prefix), tuple(atoms))
    except ValueError as e:
        raise ParseError(str(e)) from None


def format_sentence(phi: PHSentence, d: Domain) -> str:
    head = " ".join(f"{q} {v}" for q, v in phi.prefix)
    atoms = " & ".join(
        f"{a.relation}(" + ",".join(x if isinstance(x, str) else d.name(x) for x in a.args) + ")"
        for a in phi.body)
    return f"{head} : {atoms}".strip()


def load_sentence(path, d: Domain) -> PHSentence:
    return parse_sentence(Path(path).read_text(encoding="utf-8"), d)


# Operations and algebras

def operation_from_json(doc: dict, d: Domain) -> Operation:
    table = tuple(d.index(str(x)) for x in doc["table"])
    try:
        return Operation(doc["name"], int(doc["arity"]), d.size, table)
    except ValueError as e:
        raise ParseError(str(e)) from None


def operation_to_json(f: Operation, d: Domain) -> dict:
    return {"name": f.name, "arity": f.arity, "table": [d.name(v) for v in f.table]}


def algebra_from_json(doc: dict) -> Algebra:
    d = Domain(tuple(doc["domain"]))
    ops = tuple(operation_from_json(o, d) for o in doc.get("operations", []))
    return Algebra(d, ops, doc.get("name", "A"))


def algebra_to_json(alg: Algebra) -> dict:
    return {"name": alg.name, "domain": list(alg.domain.elements),
            "operations": [operation_to_json(f, alg.domain) for f in alg.operations]}


def load_algebra(path) -> Algebra:
    return algebra_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def read_universe(path, d: Domain) -> list[tuple[int, ...]]:
    """A JSON array of tuples of element names."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise QcspLabError("universe file must hold a JSON array of tuples")
    return [tuple(d.index(str(x)) for x in t) for t in raw]
