"""Polymorphisms and invariant relations.

Preservation is checked on extensions, over all k-tuples of relation
tuples (with repetition).  Near-unanimity operations get a dedicated
check that searches backwards from each tuple outside the relation.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterator

from qcsplab.gadgets import CutPair
from qcsplab.model import (
    DEFAULT_BUDGET, BudgetExceeded, Domain, Operation, QcspLabError, Relation, Structure,
    apply_operation, constant_relations)


@dataclass(frozen=True)
class PreservationWitness:
    operation: str
    relation: str
    args: tuple[tuple[int, ...], ...]
    image: tuple[int, ...]


def find_violation(f: Operation, r: Relation) -> PreservationWitness | None:
    tuples = r.sorted_tuples()
    for args in itertools.product(tuples, repeat=f.arity):
        image = apply_operation(f, args)
        if image not in r.extension:
            return PreservationWitness(f.name, r.name, args, image)
    return None


def preserves(f: Operation, r: Relation) -> bool:
    return find_violation(f, r) is None


def _relations_to_check(s: Structure) -> list[Relation]:
    rels = list(s.relations)
    if s.constants:
        rels += constant_relations(s.domain.size)
    return rels


def is_polymorphism(f: Operation, s: Structure) -> bool:
    if f.size != s.domain.size:
        raise QcspLabError(f"operation {f.name!r} is over a domain of size {f.size}, "
                           f"structure has {s.domain.size}")
    return all(preserves(f, r) for r in _relations_to_check(s))


def polymorphism_count_bound(n: int, arity: int, idempotent_only: bool) -> int:
    free = n ** arity - (n if idempotent_only else 0)
    return n ** free


def enumerate_polymorphisms(s: Structure, arity: int, idempotent_only: bool = False,
                            budget: int = DEFAULT_BUDGET) -> Iterator[Operation]:
    """Polymorphisms of the given arity, in lexicographic order of tables.

    Raises BudgetExceeded up front when the table space is larger than
    ``budget``.
    """
    n = s.domain.size
    required = polymorphism_count_bound(n, arity, idempotent_only)
    if required > budget:
        raise BudgetExceeded(f"{required} candidate tables exceed budget {budget}", required=required)
    return _enumerate(s, arity, idempotent_only)


def _enumerate(s: Structure, arity: int, idempotent_only: bool) -> Iterator[Operation]:
    n = s.domain.size
    inputs = list(itertools.product(range(n), repeat=arity))
    diagonal = {i: t[0] for i, t in enumerate(inputs) if len(set(t)) == 1}
    free = [i for i in range(len(inputs)) if not (idempotent_only and i in diagonal)]
    rels = _relations_to_check(s)
    table = [0] * len(inputs)
    for i, a in diagonal.items():
        table[i] = a
    for count, values in enumerate(itertools.product(range(n), repeat=len(free))):
        for i, v in zip(free, values):
            table[i] = v
        f = Operation(f"pol{arity}_{count}", arity, n, tuple(table))
        if all(preserves(f, r) for r in rels):
            yield f


def compose(outer: Operation, inner: list[Operation], name: str | None = None) -> Operation:
    """Superposition outer(g_1, ..., g_k), all inner operations of one arity."""
    if len(inner) != outer.arity:
        raise ValueError("need one inner operation per argument of the outer one")
    arity = {g.arity for g in inner}
    if len(arity) != 1:
        raise ValueError("inner operations must share an arity")
    (m,) = arity
    return Operation.from_function(name or f"{outer.name}o", outer.size, m,
                                   lambda *xs: outer(*(g(*xs) for g in inner)))


def projection(size: int, arity: int, i: int) -> Operation:
    return Operation.from_function(f"pr{i}_{arity}", size, arity, lambda *xs: xs[i])


# Near-unanimity

def _near_unanimous_value(column) -> int | None:
    (value, count), = Counter(column).most_common(1)
    return value if count >= len(column) - 1 else None


def build_nu_operation(d: Domain, cut: CutPair, arity: int) -> Operation:
    """NU operation of the given arity whose non-NU inputs all map to the
    least element of alpha & beta."""
    if arity < 3:
        raise QcspLabError("a near-unanimity operation needs arity at least 3")
    if not cut.intersects:
        raise QcspLabError("alpha and beta do not intersect")
    default = min(cut.intersection)

    def f(*xs):
        v = _near_unanimous_value(xs)
        return default if v is None else v

    return Operation.from_function(f"nu{arity}", d.size, arity, f)


def check_nu_identities(f: Operation) -> bool:
    if f.arity < 3:
        return False
    for x, y in itertools.product(range(f.size), repeat=2):
        for pos in range(f.arity):
            args = [x] * f.arity
            args[pos] = y
            if f(*args) != x:
                return False
    return True


def find_nu_violation(f: Operation, r: Relation) -> PreservationWitness | None:
    """Exhaustive preservation check for a near-unanimity operation.

    Works backwards from every tuple outside ``r``: it searches for rows of
    ``r`` whose columns map onto that tuple.  A column can only produce a
    value that the operation never outputs on non-unanimous inputs if at
    least ``arity - 1`` of its entries equal that value, which keeps the
    search small.
    """
    if not check_nu_identities(f):
        raise QcspLabError(f"{f.name} is not a near-unanimity operation")
    k, n, width = f.arity, f.size, r.arity
    # values the operation takes on columns that are not near-unanimous
    loose = {f.table[f.index_of(col)] for col in itertools.product(range(n), repeat=k)
             if _near_unanimous_value(col) is None}
    rows = r.sorted_tuples()
    ext = r.extension

    for target in itertools.product(range(n), repeat=width):
        if target in ext:
            continue
        # strict columns must be target[j] in all rows but at most one
        strict = [j for j in range(width) if target[j] not in loose]
        # with no row agreeing with the target on every strict column, each
        # row uses up a strict column of its own: pigeonhole bound
        agreeing = any(all(row[j] == target[j] for j in strict) for row in rows)
        chosen: list[tuple[int, ...]] = []
        misses = [0] * width

        def extend() -> bool:
            if len(chosen) == k:
                image = apply_operation(f, chosen)
                return image == target
            if not agreeing and k - len(chosen) > sum(1 for j in strict if not misses[j]):
                return False
            for row in rows:
                bumped = [j for j in strict if row[j] != target[j]]
                if any(misses[j] for j in bumped):
                    continue
                for j in bumped:
                    misses[j] = 1
                chosen.append(row)
                if extend():
                    return True
                chosen.pop()
                for j in bumped:
                    misses[j] = 0
            return False

        if extend():
            return PreservationWitness(f.name, r.name, tuple(chosen), target)
    return None


def nu_preserves(f: Operation, r: Relation) -> bool:
    return find_nu_violation(f, r) is None
