"""Hardness gadgets built from a cut pair, and the NAE-3SAT reduction.

A cut pair (alpha, beta) is two strict nonempty subsets covering the
domain.  It seeds

    rho(x, y)          = alpha^2 u beta^2
    rho3(x, y, z)      = alpha^3 u beta^3
    sigma_k(x1,y1,...) = rho(x1, y1) or ... or rho(xk, yk)
    tau_k(x1,y1,z1,...)= rho3(x1,y1,z1) or ... or rho3(xk,yk,zk)
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from typing import Iterable

from qcsplab.dnf import DnfFormula, VarEqConst, disjoin
from qcsplab.model import (
    DEFAULT_BUDGET, FORALL, Atom, Domain, ParseError, PHSentence, QcspLabError, Relation,
    Structure)

PAIRS = ((0, 1), (1, 2), (0, 2))  # xy, yz, xz within a triple


@dataclass(frozen=True)
class CutPair:
    domain: Domain
    alpha: frozenset
    beta: frozenset

    def __post_init__(self):
        object.__setattr__(self, "alpha", frozenset(self.alpha))
        object.__setattr__(self, "beta", frozenset(self.beta))
        n = self.domain.size
        everything = frozenset(range(n))
        for label, part in (("alpha", self.alpha), ("beta", self.beta)):
            if not part:
                raise QcspLabError(f"{label} must be nonempty")
            if not part <= everything:
                raise QcspLabError(f"{label} has elements outside the domain")
            if part == everything:
                raise QcspLabError(f"{label} must be a strict subset of the domain")
        if self.alpha | self.beta != everything:
            raise QcspLabError("alpha and beta must cover the domain")

    @classmethod
    def parse(cls, text: str, domain: Domain | None = None) -> "CutPair":
        """Parse ``"0,1:1,2"`` (element names).  Without an explicit domain
        the union of both sides is used, sorted numerically when possible."""
        try:
            left, right = text.split(":")
        except ValueError:
            raise ParseError(f"cut must look like 'a,b:c,d', got {text!r}") from None
        a_names = [x.strip() for x in left.split(",") if x.strip()]
        b_names = [x.strip() for x in right.split(",") if x.strip()]
        if domain is None:
            names = set(a_names) | set(b_names)
            key = (lambda s: (0, int(s), s)) if all(x.isdigit() for x in names) else (lambda s: (1, 0, s))
            domain = Domain(tuple(sorted(names, key=key)))
        return cls(domain, {domain.index(x) for x in a_names}, {domain.index(x) for x in b_names})

    def format(self) -> str:
        name = self.domain.name
        return (",".join(name(i) for i in sorted(self.alpha)) + ":"
                + ",".join(name(i) for i in sorted(self.beta)))

    @property
    def intersection(self) -> frozenset:
        return self.alpha & self.beta

    @property
    def intersects(self) -> bool:
        return bool(self.alpha & self.beta)

    @property
    def alpha_only(self) -> frozenset:
        return self.alpha - self.beta

    @property
    def beta_only(self) -> frozenset:
        return self.beta - self.alpha

    def in_rho(self, x: int, y: int) -> bool:
        return (x in self.alpha and y in self.alpha) or (x in self.beta and y in self.beta)

    def in_rho3(self, x: int, y: int, z: int) -> bool:
        a, b = self.alpha, self.beta
        return (x in a and y in a and z in a) or (x in b and y in b and z in b)


def all_cuts(domain: Domain) -> list[CutPair]:
    """Every ordered cut pair over the domain."""
    n = domain.size
    proper = [frozenset(c) for r in range(1, n) for c in itertools.combinations(range(n), r)]
    return [CutPair(domain, a, b) for a in proper for b in proper if a | b == frozenset(range(n))]


def _block_dnf(cut: CutPair, width: int) -> DnfFormula:
    disjuncts = []
    for part in (cut.alpha, cut.beta):
        for values in itertools.product(sorted(part), repeat=width):
            disjuncts.append(tuple(VarEqConst(i, c) for i, c in enumerate(values)))
    return DnfFormula(width, tuple(disjuncts))


def _block_extension(cut: CutPair, width: int) -> frozenset:
    return frozenset(itertools.product(sorted(cut.alpha), repeat=width)) | frozenset(
        itertools.product(sorted(cut.beta), repeat=width))


def build_rho(cut: CutPair) -> Relation:
    return Relation("rho", 2, _block_extension(cut, 2), _block_dnf(cut, 2))


def build_rho_prime(cut: CutPair) -> Relation:
    return Relation("rho3", 3, _block_extension(cut, 3), _block_dnf(cut, 3))


@functools.lru_cache(maxsize=512)
def _disjunctive_power(cut: CutPair, width: int, k: int, name: str, budget: int) -> Relation:
    if k < 1:
        raise QcspLabError("k must be at least 1")
    block = _block_dnf(cut, width)
    arity = width * k
    dnf = disjoin(arity, [block.shifted(width * i, arity) for i in range(k)])
    n = cut.domain.size
    if n ** arity > budget:
        return Relation(name, arity, None, dnf)
    in_block = cut.in_rho if width == 2 else cut.in_rho3
    ext = frozenset(t for t in itertools.product(range(n), repeat=arity)
                    if any(in_block(*t[width * i:width * i + width]) for i in range(k)))
    return Relation(name, arity, ext, dnf)


def build_sigma(cut: CutPair, k: int, budget: int = DEFAULT_BUDGET) -> Relation:
    """sigma_k; the extension is left unmaterialized when n^(2k) > budget."""
    return _disjunctive_power(cut, 2, k, f"sigma_{k}", budget)


def build_tau(cut: CutPair, k: int, budget: int = DEFAULT_BUDGET) -> Relation:
    """tau_k; the extension is left unmaterialized when n^(3k) > budget."""
    return _disjunctive_power(cut, 3, k, f"tau_{k}", budget)


def tau_via_sigma_conjunction(cut: CutPair, k: int, budget: int = DEFAULT_BUDGET) -> Relation:
    """The relation defined by the 3^k sigma_k instances, one per way of
    picking a pair of variables out of every triple."""
    n = cut.domain.size
    if n ** (3 * k) * 3 ** k > budget:
        raise QcspLabError(f"n^(3k) * 3^k = {n ** (3 * k) * 3 ** k} exceeds budget {budget}")
    choices = list(itertools.product(PAIRS, repeat=k))

    def satisfies_all(t):
        for choice in choices:
            if not any(cut.in_rho(t[3 * i + p], t[3 * i + q]) for i, (p, q) in enumerate(choice)):
                return False
        return True

    ext = frozenset(t for t in itertools.product(range(n), repeat=3 * k) if satisfies_all(t))
    return Relation(f"tau_{k}", 3 * k, ext)


@dataclass(frozen=True)
class FamilySpec:
    """An infinite family {sigma_k} or {tau_k}; members are named ``<name>_<k>``."""

    name: str
    kind: str
    cut: CutPair

    def __post_init__(self):
        if self.kind not in ("sigma", "tau"):
            raise QcspLabError(f"unknown family kind {self.kind!r}")

    def member_index(self, relation_name: str) -> int | None:
        m = re.fullmatch(re.escape(self.name) + r"_(\d+)", relation_name)
        if m is None or int(m.group(1)) < 1:
            return None
        return int(m.group(1))

    def instantiate(self, k: int) -> Relation:
        return _family_member(self, k)


@functools.lru_cache(maxsize=256)
def _family_member(fam: FamilySpec, k: int) -> Relation:
    builder = build_sigma if fam.kind == "sigma" else build_tau
    r = builder(fam.cut, k, budget=10**5)
    return Relation(f"{fam.name}_{k}", r.arity, r.extension, r.dnf)


# NAE-3SAT

@dataclass(frozen=True)
class NAEInstance:
    variables: tuple[str, ...]
    clauses: tuple[tuple[str, str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        declared = set(self.variables)
        for c in self.clauses:
            if len(c) != 3:
                raise QcspLabError(f"clause {c} does not have three variables")
            for v in c:
                if v not in declared:
                    raise QcspLabError(f"unknown variable {v!r} in clause {c}")


def parse_naesat(text: str) -> NAEInstance:
    """One clause per line, three whitespace-separated variable names.

    ``#`` starts a comment.  An optional ``vars a b c`` line declares the
    variables; without it they are collected in order of appearance.
    """
    declared: list[str] | None = None
    clauses = []
    seen: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "vars":
            if declared is not None or clauses:
                raise ParseError(f"line {lineno}: 'vars' must come first and only once")
            declared = words[1:]
            continue
        if len(words) != 3:
            raise ParseError(f"line {lineno}: expected three variables, got {len(words)}")
        for v in words:
            if declared is not None and v not in declared:
                raise ParseError(f"line {lineno}: unknown variable {v!r}")
            if v not in seen:
                seen.append(v)
        clauses.append(tuple(words))
    return NAEInstance(tuple(declared if declared is not None else seen), tuple(clauses))


def format_naesat(inst: NAEInstance) -> str:
    lines = ["vars " + " ".join(inst.variables)]
    lines += [" ".join(c) for c in inst.clauses]
    return "\n".join(lines) + "\n"


def brute_naesat(inst: NAEInstance) -> bool:
    for bits in itertools.product((0, 1), repeat=len(inst.variables)):
        val = dict(zip(inst.variables, bits))
        if all(len({val[v] for v in c}) > 1 for c in inst.clauses):
            return True
    return False


def reduce_naesat_to_qcsp(inst: NAEInstance, cut: CutPair) -> tuple[PHSentence, Structure]:
    """Universally quantify the instance's variables over one tau_k atom
    whose i-th triple is the i-th clause.  The sentence is true exactly
    when the instance is not NAE-satisfiable."""
    if not cut.alpha_only or not cut.beta_only:
        raise QcspLabError("reduction needs alpha\\beta and beta\\alpha both nonempty")
    if not inst.clauses:
        raise QcspLabError("instance has no clauses")
    clash = set(inst.variables) & set(cut.domain.elements)
    if clash:
        raise QcspLabError(f"variable names clash with domain elements: {sorted(clash)}")
    k = len(inst.clauses)
    tau = build_tau(cut, k)
    atom = Atom(tau.name, tuple(v for c in inst.clauses for v in c))
    sentence = PHSentence(tuple((FORALL, v) for v in inst.variables), (atom,))
    return sentence, Structure(cut.domain, (tau,))


def nae_to_domain(cut: CutPair, bits: Iterable[int]) -> tuple[int, ...]:
    """0 -> least element of alpha\\beta, 1 -> least element of beta\\alpha."""
    lo, hi = min(cut.alpha_only), min(cut.beta_only)
    return tuple(lo if b == 0 else hi for b in bits)


def domain_to_nae(cut: CutPair, values: Iterable[int]) -> tuple[int, ...]:
    """beta\\alpha -> 1, everything else (alpha\\beta and the overlap) -> 0."""
    return tuple(1 if v in cut.beta_only else 0 for v in values)
