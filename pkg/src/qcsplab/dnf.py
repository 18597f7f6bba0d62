"""Quantifier-free equality formulas in DNF over positional variables.

Grammar (whitespace insignificant)::

    formula  := disjunct ('|' disjunct)*
    disjunct := atom ('&' atom)*
    atom     := 'x' INT '=' ('x' INT | CONSTNAME)

Only positive atoms are accepted.  A token ``x<digits>`` on the right of
``=`` is always read as a variable.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Sequence

from qcsplab.model import Domain, ParseError, QcspLabError, Relation


@dataclass(frozen=True)
class VarEqVar:
    i: int
    j: int


@dataclass(frozen=True)
class VarEqConst:
    i: int
    c: int


@dataclass(frozen=True)
class DnfFormula:
    arity: int
    disjuncts: tuple[tuple[VarEqVar | VarEqConst, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "disjuncts", tuple(tuple(d) for d in self.disjuncts))
        if not self.disjuncts:
            raise ValueError("a DNF formula needs at least one disjunct")
        for d in self.disjuncts:
            if not d:
                raise ValueError("empty conjunct")
            for atom in d:
                idx = (atom.i, atom.j) if isinstance(atom, VarEqVar) else (atom.i,)
                if any(not 0 <= x < self.arity for x in idx):
                    raise ValueError(f"variable index in {atom} out of range for arity {self.arity}")

    @property
    def size(self) -> int:
        """Total atom count."""
        return sum(len(d) for d in self.disjuncts)

    def shifted(self, offset: int, arity: int) -> "DnfFormula":
        """Same formula with every variable index moved by ``offset``."""
        def move(atom):
            if isinstance(atom, VarEqVar):
                return VarEqVar(atom.i + offset, atom.j + offset)
            return VarEqConst(atom.i + offset, atom.c)
        return DnfFormula(arity, tuple(tuple(move(a) for a in d) for d in self.disjuncts))


def disjoin(arity: int, formulas: Sequence[DnfFormula]) -> DnfFormula:
    return DnfFormula(arity, tuple(d for f in formulas for d in f.disjuncts))


_TOKEN = re.compile(r"\s*(?:(?P<op>[|&=])|(?P<neg>!=|≠|~|!)|(?P<word>[^\s|&=!]+))")
_VAR = re.compile(r"x(\d+)$")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        if m.lastgroup == "neg":
            raise ParseError("negated atoms are not allowed in DNF equality formulas", start)
        out.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    return out


def parse_dnf(text: str, arity: int, d: Domain) -> DnfFormula:
    tokens = _tokenize(text)
    pos = 0

    def expect_word():
        nonlocal pos
        if pos >= len(tokens) or tokens[pos][0] != "word":
            where = tokens[pos][2] if pos < len(tokens) else len(text)
            raise ParseError("expected a variable or constant", where)
        tok = tokens[pos]
        pos += 1
        return tok

    def var_index(tok):
        m = _VAR.match(tok[1])
        if m is None:
            raise ParseError(f"expected a variable x<INT>, got {tok[1]!r}", tok[2])
        i = int(m.group(1))
        if i >= arity:
            raise ParseError(f"variable x{i} out of range for arity {arity}", tok[2])
        return i

    disjuncts = []
    conj = []
    while True:
        lhs = var_index(expect_word())
        if pos >= len(tokens) or tokens[pos][1] != "=":
            where = tokens[pos][2] if pos < len(tokens) else len(text)
            raise ParseError("expected '='", where)
        pos += 1
        rhs = expect_word()
        if _VAR.match(rhs[1]):
            conj.append(VarEqVar(lhs, var_index(rhs)))
        else:
            if rhs[1] not in d.elements:
                raise ParseError(f"unknown constant {rhs[1]!r}", rhs[2])
            conj.append(VarEqConst(lhs, d.index(rhs[1])))
        if pos == len(tokens):
            disjuncts.append(tuple(conj))
            break
        op = tokens[pos]
        pos += 1
        if op[1] == "|":
            disjuncts.append(tuple(conj))
            conj = []
        elif op[1] != "&":
            raise ParseError(f"expected '&' or '|', got {op[1]!r}", op[2])
    return DnfFormula(arity, tuple(disjuncts))


def format_atom(atom, d: Domain) -> str:
    if isinstance(atom, VarEqVar):
        return f"x{atom.i}=x{atom.j}"
    return f"x{atom.i}={d.name(atom.c)}"


def format_dnf(f: DnfFormula, d: Domain) -> str:
    return " | ".join(" & ".join(format_atom(a, d) for a in conj) for conj in f.disjuncts)


def _conj_holds(conj, t) -> bool:
    for atom in conj:
        if isinstance(atom, VarEqVar):
            if t[atom.i] != t[atom.j]:
                return False
        elif t[atom.i] != atom.c:
            return False
    return True


def eval_dnf(f: DnfFormula, t: Sequence[int]) -> bool:
    if len(t) != f.arity:
        raise ValueError(f"tuple of length {len(t)} for a formula of arity {f.arity}")
    return any(_conj_holds(conj, t) for conj in f.disjuncts)


def _expand_conjunct(conj, arity: int, n: int) -> set[tuple[int, ...]]:
    # union-find over positions; each class is free or pinned to one constant
    parent = list(range(arity))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for atom in conj:
        if isinstance(atom, VarEqVar):
            parent[find(atom.i)] = find(atom.j)
    pinned: dict[int, int] = {}
    for atom in conj:
        if isinstance(atom, VarEqConst):
            root = find(atom.i)
            if pinned.setdefault(root, atom.c) != atom.c:
                return set()
    roots = sorted({find(i) for i in range(arity)})
    free = [r for r in roots if r not in pinned]
    out = set()
    for values in itertools.product(range(n), repeat=len(free)):
        val = dict(pinned)
        val.update(zip(free, values))
        out.add(tuple(val[find(i)] for i in range(arity)))
    return out


def dnf_to_extension(f: DnfFormula, arity: int, d: Domain) -> frozenset:
    """Expand the formula into the set of tuples it defines."""
    if arity != f.arity:
        raise ValueError(f"arity {arity} does not match formula arity {f.arity}")
    ext: set[tuple[int, ...]] = set()
    for conj in f.disjuncts:
        ext |= _expand_conjunct(conj, arity, d.size)
    return frozenset(ext)


def extension_to_dnf(r: Relation) -> DnfFormula:
    """Canonical certificate: one full constant conjunction per tuple."""
    tuples = r.sorted_tuples()
    if not tuples:
        raise QcspLabError(f"relation {r.name!r} is empty; DNF has no empty disjunction")
    return DnfFormula(r.arity, tuple(tuple(VarEqConst(i, c) for i, c in enumerate(t))
                                     for t in tuples))


def relation_from_dnf(name: str, f: DnfFormula, d: Domain) -> Relation:
    return Relation(name, f.arity, dnf_to_extension(f, f.arity, d), f)
