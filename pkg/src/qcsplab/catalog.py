"""Small algebras used in experiments and tests."""

from __future__ import annotations

from qcsplab.model import Algebra, Domain, Operation


def meet(n: int = 2) -> Operation:
    return Operation.from_function("meet", n, 2, min)


def join(n: int = 2) -> Operation:
    return Operation.from_function("join", n, 2, max)


def majority(n: int = 2) -> Operation:
    """Ternary majority; on non-majority inputs returns the first argument."""
    return Operation.from_function("majority", n, 3, lambda x, y, z: y if y == z else x)


def minority(n: int = 2) -> Operation:
    """x - y + z modulo n (Maltsev); the Boolean minority for n = 2."""
    return Operation.from_function("minority", n, 3, lambda x, y, z: (x - y + z) % n)


def constant(n: int, value: int, arity: int = 1) -> Operation:
    return Operation.from_function(f"const{value}", n, arity, lambda *xs: value)


def semilattice_algebra(n: int = 2) -> Algebra:
    return Algebra(Domain.range(n), (meet(n),), "meet-semilattice")


def projections_algebra(n: int = 2) -> Algebra:
    first = Operation.from_function("pr0", n, 2, lambda x, y: x)
    return Algebra(Domain.range(n), (first,), "projections")


def majority_algebra(n: int = 2) -> Algebra:
    return Algebra(Domain.range(n), (majority(n),), "majority")


def affine_algebra(n: int = 2) -> Algebra:
    return Algebra(Domain.range(n), (minority(n),), "affine")


CATALOG = {
    "meet": semilattice_algebra,
    "projections": projections_algebra,
    "majority": majority_algebra,
    "affine": affine_algebra,
}
