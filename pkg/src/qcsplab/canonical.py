"""Canonical Pi_2 sentences built from products of constant-expanded copies.

For a structure with n elements, a length m and a set of adversaries
(subsets of A^m), a map mu: [n] x [m] -> A is consistent with an
adversary O when (mu(i_1, 1), ..., mu(i_m, m)) lies in O for every choice
of rows.  Each (O, mu) contributes one factor: a copy of the structure
with the n*m constants interpreted by mu.  The canonical query of the
product has one variable per product element and one atom per product
tuple; the n*m constants become outermost universal variables.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass

from qcsplab.model import (
    EXISTS, FORALL, Atom, BudgetExceeded, PHSentence, QcspLabError, Structure, structure_reduct)
from qcsplab.powers import switch_tuples
from qcsplab.solver import pi2_responses

DEFAULT_ATOM_BUDGET = 200_000


@dataclass(frozen=True)
class AdversarySet:
    m: int
    adversaries: tuple[frozenset, ...]

    def __post_init__(self):
        advs = tuple(sorted((frozenset(tuple(t) for t in o) for o in self.adversaries),
                            key=lambda o: sorted(o)))
        object.__setattr__(self, "adversaries", advs)
        for o in advs:
            if not o:
                raise QcspLabError("adversaries must be nonempty")
            if any(len(t) != self.m for t in o):
                raise QcspLabError(f"adversary tuples must have length {self.m}")

    @classmethod
    def full(cls, n: int, m: int) -> "AdversarySet":
        return cls(m, (frozenset(itertools.product(range(n), repeat=m)),))

    @classmethod
    def switching(cls, n: int, m: int, k: int) -> "AdversarySet":
        from qcsplab.model import Domain
        return cls(m, (switch_tuples(Domain.range(n), m, k),))


def consistent_maps(n: int, m: int, adversary: frozenset) -> list[tuple[int, ...]]:
    """Maps mu as tuples indexed by j*n + i (block j holds column j)."""
    out = []
    for mu in itertools.product(range(n), repeat=n * m):
        columns = [mu[j * n:(j + 1) * n] for j in range(m)]
        if all(t in adversary for t in itertools.product(*columns)):
            out.append(mu)
    return out


def universal_names(n: int, m: int) -> list[str]:
    return [f"w{i + 1}_{j + 1}" for j in range(m) for i in range(n)]


@dataclass(frozen=True)
class CanonicalSentence:
    sentence: PHSentence
    factors: int
    product_size: int
    constants: tuple[tuple[int, ...], ...]


def build_canonical_sentence(s: Structure, omega: AdversarySet,
                             atom_budget: int = DEFAULT_ATOM_BUDGET) -> CanonicalSentence:
    n, m = s.domain.size, omega.m
    factors = [mu for adv in omega.adversaries for mu in consistent_maps(n, m, adv)]
    N = len(factors)
    size = n ** N
    atoms_needed = sum(len(r.tuples()) ** N for r in s.relations)
    if size + atoms_needed > atom_budget:
        raise BudgetExceeded(f"product of {N} factors needs {size} variables and "
                             f"{atoms_needed} atoms (budget {atom_budget})",
                             required=size + atoms_needed)
    constants = [tuple(mu[p] for mu in factors) for p in range(n * m)]
    if len(set(constants)) != len(constants):
        raise QcspLabError("degenerate adversary: the constants of the product are not pairwise distinct")

    universal = universal_names(n, m)
    name_of = {c: w for c, w in zip(constants, universal)}
    prefix = [(FORALL, w) for w in universal]
    for rank, elem in enumerate(itertools.product(range(n), repeat=N)):
        if elem not in name_of:
            name_of[elem] = f"e{rank}"
            prefix.append((EXISTS, name_of[elem]))
    body = []
    for r in s.relations:
        rows = r.sorted_tuples()
        for combo in itertools.product(rows, repeat=N):
            args = tuple(name_of[tuple(row[pos] for row in combo)] for pos in range(r.arity))
            body.append(Atom(r.name, args))
    return CanonicalSentence(PHSentence(tuple(prefix), tuple(body)), N, size, tuple(constants))


def evaluate_canonical(c: CanonicalSentence, s: Structure) -> dict:
    """Solve the existential part for every assignment of the universals."""
    n = s.domain.size
    k = len(c.constants)
    table = {}
    for u, sol in pi2_responses(c.sentence, s, itertools.product(range(n), repeat=k)):
        table[u] = sol
    return table


def _witness_holds(sentence: PHSentence, s: Structure, universal: dict, witness: dict) -> bool:
    val = {**universal, **witness}
    for atom in sentence.body:
        t = tuple(val[a] if isinstance(a, str) else a for a in atom.args)
        if t not in s.relation(atom.relation):
            return False
    return True


def _digest(witness: dict | None) -> str | None:
    if witness is None:
        return None
    text = ",".join(f"{k}={witness[k]}" for k in sorted(witness))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def probe_levels(levels: list[Structure], omega: AdversarySet,
                 atom_budget: int = DEFAULT_ATOM_BUDGET) -> dict:
    """Compactness report for a nested sequence of finite reducts."""
    built = [build_canonical_sentence(s, omega, atom_budget) for s in levels]
    tables = [evaluate_canonical(c, s) for c, s in zip(built, levels)]
    verdicts = [all(sol is not None for sol in t.values()) for t in tables]
    n, m = levels[0].domain.size, omega.m
    names = universal_names(n, m)
    rows = []
    stable = {}
    last = tables[-1]
    for u in sorted(last):
        key = ",".join(levels[0].domain.name(x) for x in u)
        final = last[u]
        if final is None:
            stable[key] = None
        else:
            stable[key] = all(_witness_holds(c.sentence, s, dict(zip(names, u)), final)
                              for c, s in zip(built, levels))
        rows.append({"universal": key,
                     "witness": [_digest(t[u]) for t in tables]})
    monotone = all(verdicts[i] or not verdicts[j]
                   for i in range(len(verdicts)) for j in range(i + 1, len(verdicts)))
    return {
        "levels": [{"K": i + 1, "verdict": v, "atoms": len(c.sentence.body),
                    "universal_assignments": len(t),
                    "satisfied": sum(sol is not None for sol in t.values())}
                   for i, (v, c, t) in enumerate(zip(verdicts, built, tables))],
        "forward_monotone": monotone,
        "recurring_witness": stable,
        "witness_table": rows,
    }


def reduct_compactness_probe(s: Structure, omega: AdversarySet, k_max: int,
                             atom_budget: int = DEFAULT_ATOM_BUDGET) -> dict:
    """Evaluate the canonical sentences of the truncations {fam_1..fam_K}, K <= k_max."""
    if not s.families:
        raise QcspLabError("structure has no relation family to truncate")
    full = s.truncate(k_max)
    levels = []
    for k in range(1, k_max + 1):
        keep = set(s.relation_names) | {f"{fam.name}_{i}" for fam in s.families
                                        for i in range(1, k + 1)}
        levels.append(structure_reduct(full, keep))
    return probe_levels(levels, omega, atom_budget)
