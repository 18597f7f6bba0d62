"""Generating sets of the powers A^m of a finite algebra."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from qcsplab.model import DEFAULT_BUDGET, Algebra, BudgetExceeded, Domain, apply_operation


def generate_subpower(alg: Algebra, seeds: Iterable) -> frozenset:
    """Least set containing ``seeds`` closed under every operation of ``alg``."""
    seeds = [tuple(t) for t in seeds]
    if len({len(t) for t in seeds}) > 1:
        raise ValueError("seed tuples have different lengths")
    closed = set(seeds)
    frontier = list(closed)
    while frontier:
        known = list(closed)
        fresh = set(frontier)
        new = []
        for f in alg.operations:
            # only argument lists touching the last round's additions
            for args in itertools.product(known, repeat=f.arity):
                if not any(a in fresh for a in args):
                    continue
                t = apply_operation(f, args)
                if t not in closed:
                    closed.add(t)
                    new.append(t)
        frontier = new
    result = frozenset(closed)
    for f in alg.operations:
        assert all(apply_operation(f, args) in result
                   for args in itertools.product(result, repeat=f.arity)), "closure not a fixpoint"
    return result


class _ClosureCache:
    def __init__(self, alg: Algebra, budget: int):
        self.alg = alg
        self.budget = budget
        self.calls = 0
        self.memo: dict[frozenset, frozenset] = {}

    def __call__(self, seeds: frozenset) -> frozenset:
        hit = self.memo.get(seeds)
        if hit is None:
            self.calls += 1
            if self.calls > self.budget:
                raise BudgetExceeded(f"more than {self.budget} closure computations")
            hit = self.memo[seeds] = generate_subpower(self.alg, seeds)
        return hit


def irreducible_tuples(alg: Algebra, m: int) -> list[tuple[int, ...]]:
    """Tuples of A^m not generated by the other tuples; every generating set contains them."""
    everything = list(alg.domain.tuples(m))
    return [t for t in everything
            if t not in generate_subpower(alg, [u for u in everything if u != t])]


def _greedy_generators(alg: Algebra, m: int, mandatory: list) -> list:
    everything = list(alg.domain.tuples(m))
    gens = list(mandatory)
    closed = generate_subpower(alg, gens) if gens else frozenset()
    for t in everything:
        if len(closed) == len(everything):
            break
        if t not in closed:
            gens.append(t)
            closed = generate_subpower(alg, gens)
    return gens


def min_generating_size(alg: Algebra, m: int, budget: int = DEFAULT_BUDGET) -> int:
    """Exact size f(m) of a smallest generating set of A^m.

    Iterative deepening on the set size.  Irreducible tuples are forced
    into every candidate; the remaining generators are drawn only from
    tuples outside the closure of the forced part, since a minimal set
    never contains a tuple its other members already generate.  Closures
    are memoized by seed set.
    """
    everything = list(alg.domain.tuples(m))
    full = len(everything)
    mandatory = irreducible_tuples(alg, m)
    closure = _ClosureCache(alg, budget)
    base = closure(frozenset(mandatory)) if mandatory else frozenset()
    if len(base) == full:
        return max(len(mandatory), 1)
    upper = len(_greedy_generators(alg, m, mandatory))
    pool = [t for t in everything if t not in base]
    checked = 0
    for size in range(max(len(mandatory) + 1, 1), upper):
        extra = size - len(mandatory)
        for combo in itertools.combinations(pool, extra):
            checked += 1
            if checked > budget:
                raise BudgetExceeded(f"subset search exceeded {budget} candidates",
                                     lower=size, upper=upper)
            if len(closure(frozenset(mandatory).union(combo))) == full:
                return size
    return upper


def collapse_tuples(d: Domain, m: int, k: int) -> frozenset:
    """Tuples in which some value occurs at least m - k times."""
    if not 0 <= k <= m:
        raise ValueError("need 0 <= k <= m")
    return frozenset(t for t in d.tuples(m)
                     if max(Counter(t).values(), default=0) >= m - k)


def switch_count(t) -> int:
    return sum(1 for a, b in zip(t, t[1:]) if a != b)


def switch_positions(t) -> tuple[int, ...]:
    """0-based indices i with t[i] != t[i-1]."""
    return tuple(i for i in range(1, len(t)) if t[i] != t[i - 1])


def switch_tuples(d: Domain, m: int, k: int) -> frozenset:
    """Tuples with at most k adjacent changes of value."""
    if m < 1 or k < 0:
        raise ValueError("need m >= 1 and k >= 0")
    out = set()
    for j in range(min(k, m - 1) + 1):
        for cuts in itertools.combinations(range(1, m), j):
            bounds = (0,) + cuts + (m,)
            for first in range(d.size):
                for rest in itertools.product(range(d.size - 1), repeat=j):
                    values = [first]
                    for r in rest:
                        values.append(r if r < values[-1] else r + 1)
                    out.add(tuple(v for v, lo, hi in zip(values, bounds, bounds[1:])
                                  for _ in range(hi - lo)))
    return frozenset(out)


def switch_tuple_count(n: int, m: int, k: int) -> int:
    return sum(math.comb(m - 1, j) * n * (n - 1) ** j for j in range(min(k, m - 1) + 1))


def test_collapsibility(alg: Algebra, m: int, k: int) -> bool:
    return len(generate_subpower(alg, collapse_tuples(alg.domain, m, k))) == alg.domain.size ** m


def test_switchability(alg: Algebra, m: int, k: int) -> bool:
    return len(generate_subpower(alg, switch_tuples(alg.domain, m, k))) == alg.domain.size ** m


# pytest would otherwise try to collect these as tests when imported into a test module
test_collapsibility.__test__ = False
test_switchability.__test__ = False


@dataclass
class GrowthProfile:
    algebra: str
    f: list[tuple[int, int]] = field(default_factory=list)
    collapse: dict[tuple[int, int], bool] = field(default_factory=dict)
    switch: dict[tuple[int, int], bool] = field(default_factory=dict)
    hint: str = "inconclusive"
    incomplete: list[int] = field(default_factory=list)

    def rows(self) -> list[dict]:
        ms = sorted({m for m, _ in self.f} | {m for m, _ in self.collapse} | set(self.incomplete))
        fvals = dict(self.f)
        return [{"m": m, "f": fvals.get(m),
                 "collapse": {str(k): v for (mm, k), v in sorted(self.collapse.items()) if mm == m},
                 "switch": {str(k): v for (mm, k), v in sorted(self.switch.items()) if mm == m}}
                for m in ms]


def _sse(xs, ys):
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx if sxx else 0.0
    icpt = my - slope * mx
    return slope, sum((y - (icpt + slope * x)) ** 2 for x, y in zip(xs, ys))


def classify_growth(f: list[tuple[int, int]]) -> str:
    """Heuristic label comparing a power-law fit with an exponential fit of log f.

    Finite data cannot decide PGP versus EGP; the label only says which
    curve the sample resembles.
    """
    if len(f) < 3:
        return "inconclusive"
    ms = [m for m, _ in f]
    logs = [math.log(v) for _, v in f]
    exp_slope, exp_err = _sse(ms, logs)
    _, poly_err = _sse([math.log(m) for m in ms], logs)
    if exp_slope < 0.05:
        return "consistent-with-PGP"
    if poly_err < 0.5 * exp_err:
        return "consistent-with-PGP"
    if exp_err < 0.5 * poly_err:
        return "consistent-with-EGP"
    return "inconclusive"


def growth_profile(alg: Algebra, m_max: int, k_max: int = 0,
                   budget: int = DEFAULT_BUDGET) -> GrowthProfile:
    profile = GrowthProfile(alg.name)
    for m in range(1, m_max + 1):
        try:
            profile.f.append((m, min_generating_size(alg, m, budget)))
        except BudgetExceeded:
            profile.incomplete.append(m)
        for k in range(0, min(k_max, m) + 1):
            profile.collapse[(m, k)] = test_collapsibility(alg, m, k)
            profile.switch[(m, k)] = test_switchability(alg, m, k)
    profile.hint = classify_growth(profile.f)
    return profile
