"""Evaluation of positive-Horn sentences over finite structures.

``evaluate_qcsp`` plays the quantifier game directly (with memoization on
the live part of the assignment); ``solve_csp`` is a backtracking search
with forward checking for purely existential sentences; the remaining
functions are the generating-set relativization of Pi_2 sentences and the
decision procedure for sentences over the tau family.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from qcsplab.gadgets import CutPair
from qcsplab.model import (
    DEFAULT_BUDGET, EQ, EXISTS, FORALL, Atom, BudgetExceeded, PHSentence, QcspLabError, Relation,
    Structure)


@dataclass
class EvalTrace:
    """Verdict plus witnesses.

    ``counterexample`` assigns the leading universal block so that the rest
    of the game is lost (only set on rejection).  ``strategy`` maps each
    universal tuple to an existential response; it is only filled for
    accepted sentences of shape forall* exists* when requested.
    """

    verdict: bool
    counterexample: dict[str, int] | None = None
    strategy: dict[tuple[int, ...], dict[str, int]] | None = None
    nodes: int = 0


class _Compiled:
    def __init__(self, phi: PHSentence, s: Structure):
        phi.check_against(s)
        self.n = s.domain.size
        self.vars = phi.variables
        self.quants = [q for q, _ in phi.prefix]
        self.pos = {v: i for i, v in enumerate(self.vars)}
        nv = len(self.vars)
        self.ground: list[tuple[Relation, tuple]] = []
        self.by_last: list[list[tuple[Relation, tuple]]] = [[] for _ in range(nv)]
        last_use = [-1] * nv
        for atom in phi.body:
            rel = s.relation(atom.relation)
            spec = tuple(("v", self.pos[a]) if isinstance(a, str) else ("c", a) for a in atom.args)
            positions = [p for kind, p in spec if kind == "v"]
            if not positions:
                self.ground.append((rel, spec))
                continue
            last = max(positions)
            self.by_last[last].append((rel, spec))
            for p in positions:
                last_use[p] = max(last_use[p], last)
        # variables (by position) still relevant once positions < pos are fixed
        self.live = [tuple(p for p in range(pos) if last_use[p] >= pos) for pos in range(nv + 1)]

    @staticmethod
    def holds(rel: Relation, spec, values) -> bool:
        return tuple(values[p] if kind == "v" else p for kind, p in spec) in rel


class _Game:
    def __init__(self, comp: _Compiled, budget: int):
        self.c = comp
        self.budget = budget
        self.nodes = 0
        self.memo: dict = {}

    def value(self, pos: int, values: list[int]) -> bool:
        """Value of the subgame where positions < pos are fixed in ``values``."""
        c = self.c
        if pos == len(c.vars):
            return True
        key = (pos, tuple(values[p] for p in c.live[pos]))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"evaluation exceeded {self.budget} nodes", required=self.nodes)
        universal = c.quants[pos] == FORALL
        result = universal
        for a in range(c.n):
            values[pos] = a
            ok = all(c.holds(rel, spec, values) for rel, spec in c.by_last[pos])
            ok = ok and self.value(pos + 1, values)
            if universal and not ok:
                result = False
                break
            if not universal and ok:
                result = True
                break
        values[pos] = -1
        self.memo[key] = result
        return result

    def step(self, pos: int, values: list[int], want: bool) -> int | None:
        """First value at ``pos`` whose branch has value ``want``."""
        c = self.c
        for a in range(c.n):
            values[pos] = a
            ok = all(c.holds(rel, spec, values) for rel, spec in c.by_last[pos])
            ok = ok and self.value(pos + 1, values)
            if ok == want:
                return a
        values[pos] = -1
        return None


def evaluate_qcsp(phi: PHSentence, s: Structure, budget: int = DEFAULT_BUDGET,
                  strategy: bool = False) -> EvalTrace:
    comp = _Compiled(phi, s)
    game = _Game(comp, budget)
    nv = len(comp.vars)
    lead = 0
    while lead < nv and comp.quants[lead] == FORALL:
        lead += 1
    if not all(comp.holds(rel, spec, ()) for rel, spec in comp.ground):
        # a false ground atom: every assignment refutes
        return EvalTrace(False, counterexample={v: 0 for v in comp.vars[:lead]})
    values = [-1] * nv
    verdict = game.value(0, values)
    trace = EvalTrace(verdict)
    if not verdict:
        values = [-1] * nv
        cex = {}
        for pos in range(lead):
            cex[comp.vars[pos]] = game.step(pos, values, False)
        trace.counterexample = cex
    elif strategy and all(q == EXISTS for q in comp.quants[lead:]):
        table = {}
        for u in itertools.product(range(comp.n), repeat=lead):
            values = list(u) + [-1] * (nv - lead)
            table[u] = {comp.vars[pos]: game.step(pos, values, True) for pos in range(lead, nv)}
        trace.strategy = table
    trace.nodes = game.nodes
    return trace


# CSP

def solve_csp(phi: PHSentence, s: Structure, budget: int = DEFAULT_BUDGET) -> dict[str, int] | None:
    """A satisfying assignment for an existential sentence, or None."""
    if any(q != EXISTS for q, _ in phi.prefix):
        raise QcspLabError("solve_csp needs a purely existential sentence")
    phi.check_against(s)
    n = s.domain.size
    variables = list(phi.variables)
    domains: dict[str, set[int]] = {v: set(range(n)) for v in variables}
    constraints = []
    for atom in phi.body:
        rel = s.relation(atom.relation)
        if not atom.variables:
            if tuple(atom.args) not in rel:
                return None
            continue
        tuples = None
        if rel.materialized:
            # tuples compatible with the atom's constants and repeated variables
            tuples = [t for t in rel.extension if _matches(atom.args, t)]
            if not tuples:
                return None
        constraints.append((atom, rel, tuples))
    watch: dict[str, list[int]] = {v: [] for v in variables}
    for ci, (atom, _, _) in enumerate(constraints):
        for v in dict.fromkeys(atom.variables):
            watch[v].append(ci)
    # node consistency for unary-in-variables constraints
    for atom, _, tuples in constraints:
        vs = set(atom.variables)
        if tuples is not None and len(vs) == 1:
            (v,) = vs
            i = atom.args.index(v)
            domains[v] &= {t[i] for t in tuples}
            if not domains[v]:
                return None

    assignment: dict[str, int] = {}
    nodes = 0

    def revise(var: str) -> list[tuple[str, set[int]]] | None:
        """Forward-check the constraints watching ``var``; return removals."""
        removed: list[tuple[str, set[int]]] = []
        for ci in watch[var]:
            atom, rel, tuples = constraints[ci]
            free = [v for v in dict.fromkeys(atom.variables) if v not in assignment]
            if not free:
                if tuple(assignment[a] if isinstance(a, str) else a for a in atom.args) not in rel:
                    return _undo(removed, domains)
                continue
            if tuples is None:
                continue
            support: dict[str, set[int]] = {v: set() for v in free}
            for t in tuples:
                ok = True
                for a, x in zip(atom.args, t):
                    if isinstance(a, str):
                        if a in assignment:
                            if assignment[a] != x:
                                ok = False
                                break
                        elif x not in domains[a]:
                            ok = False
                            break
                if ok:
                    for a, x in zip(atom.args, t):
                        if isinstance(a, str) and a in support:
                            support[a].add(x)
            for v in free:
                drop = domains[v] - support[v]
                if drop:
                    domains[v] -= drop
                    removed.append((v, drop))
                    if not domains[v]:
                        return _undo(removed, domains)
        return removed

    def search() -> bool:
        nonlocal nodes
        free = [v for v in variables if v not in assignment]
        if not free:
            return True
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"CSP search exceeded {budget} nodes", required=nodes)
        var = min(free, key=lambda v: len(domains[v]))
        for a in sorted(domains[var]):
            assignment[var] = a
            saved = domains[var]
            domains[var] = {a}
            removed = revise(var)
            if removed is not None:
                if search():
                    return True
                _undo(removed, domains)
            domains[var] = saved
            del assignment[var]
        return False

    return dict(assignment) if search() else None


def _matches(args: Sequence, t: tuple) -> bool:
    seen: dict[str, int] = {}
    for a, x in zip(args, t):
        if isinstance(a, str):
            if seen.setdefault(a, x) != x:
                return False
        elif a != x:
            return False
    return True


def _undo(removed, domains) -> None:
    for v, drop in reversed(removed):
        domains[v] |= drop
    return None


# Pi_2 relativization

def split_pi2(phi: PHSentence) -> tuple[tuple[str, ...], tuple[str, ...]]:
    blocks = phi.blocks()
    shape = [q for q, _ in blocks]
    if shape not in ([], [FORALL], [EXISTS], [FORALL, EXISTS]):
        raise QcspLabError("expected a forall-block followed by an exists-block")
    return phi.universals, phi.existentials


def pi2_responses(phi: PHSentence, s: Structure, U: Iterable[Sequence[int]],
                  budget: int = DEFAULT_BUDGET) -> Iterator[tuple[tuple[int, ...], dict | None]]:
    """For each universal tuple in U, the CSP solution of the remainder (or None)."""
    universals, _ = split_pi2(phi)
    m = len(universals)
    for u in U:
        u = tuple(u)
        if len(u) != m:
            raise QcspLabError(f"universe tuple {u} has length {len(u)}, expected {m}")
        yield u, solve_csp(phi.substitute(dict(zip(universals, u))), s, budget)


def evaluate_pi2_restricted(phi: PHSentence, s: Structure, U: Iterable[Sequence[int]],
                            budget: int = DEFAULT_BUDGET) -> bool:
    """Evaluate with the universal block ranging over U only."""
    return all(sol is not None for _, sol in pi2_responses(phi, s, sorted(map(tuple, U)), budget))


# Constant elimination and the tau decision procedure

def _classify_eq(atom: Atom):
    a, b = atom.args
    if isinstance(a, str) and isinstance(b, str):
        return "vv", a, b
    if isinstance(a, str):
        return "vc", a, b
    if isinstance(b, str):
        return "vc", b, a
    return "cc", a, b


def preprocess_constants_traced(phi: PHSentence) -> tuple[PHSentence | bool, list[int]]:
    """Like :func:`preprocess_constants`, also returning the rules that fired."""
    fired: list[int] = []
    while True:
        body = []
        for atom in phi.body:
            if atom.relation == EQ:
                kind, x, y = _classify_eq(atom)
                if kind == "cc" or (kind == "vv" and x == y):
                    if x != y:
                        fired.append(0)
                        return False, fired
                    continue
            body.append(atom)
        phi = PHSentence(phi.prefix, tuple(body))
        pins: dict[str, set] = {}
        for atom in phi.body:
            if atom.relation == EQ:
                kind, v, c = _classify_eq(atom)
                if kind == "vc":
                    pins.setdefault(v, set()).add(c)
        if not pins:
            return phi, fired
        if any(phi.quantifier(v) == FORALL for v in pins):
            fired.append(1)
            return False, fired
        if any(len(cs) > 1 for cs in pins.values()):
            fired.append(2)
            return False, fired
        only_pinned = [v for v in pins
                       if all(atom.relation == EQ and _classify_eq(atom)[0] == "vc"
                              for atom in phi.body if v in atom.variables)]
        if only_pinned:
            fired.append(3)
            gone = set(only_pinned)
            phi = PHSentence(tuple(p for p in phi.prefix if p[1] not in gone),
                             tuple(a for a in phi.body if not gone & set(a.variables)))
            continue
        fired.append(4)
        phi = phi.substitute({v: next(iter(cs)) for v, cs in pins.items()})


def preprocess_constants(phi: PHSentence) -> PHSentence | bool:
    """Eliminate atoms ``v = a``; returns ``False`` or the simplified sentence.

    Rules, applied exhaustively in order: a pinned universal makes the
    sentence false; an existential pinned to two constants makes it false;
    an existential occurring only in its pins is dropped; any other pinned
    existential is replaced by its constant.  Assumes at least two domain
    elements.
    """
    return preprocess_constants_traced(phi)[0]


def merge_variable_equalities(phi: PHSentence) -> PHSentence | bool:
    """Remove ``eq(v, w)`` between distinct variables.

    The later-quantified variable is renamed to the earlier one when it is
    existential; otherwise the sentence is false (domain size >= 2).
    """
    while True:
        target = None
        for atom in phi.body:
            if atom.relation == EQ:
                kind, x, y = _classify_eq(atom)
                if kind == "vv" and x != y:
                    target = (x, y)
                    break
        if target is None:
            return phi
        order = {v: i for i, v in enumerate(phi.variables)}
        outer, inner = sorted(target, key=order.__getitem__)
        if phi.quantifier(inner) == FORALL:
            return False
        prefix = tuple(p for p in phi.prefix if p[1] != inner)
        body = []
        for atom in phi.body:
            args = tuple(outer if a == inner else a for a in atom.args)
            if atom.relation == EQ and args[0] == args[1]:
                continue
            body.append(Atom(atom.relation, args))
        phi = PHSentence(prefix, tuple(body))


def _tau_index(atom: Atom) -> int:
    name = atom.relation
    if not name.startswith("tau_") or not name[4:].isdigit() or int(name[4:]) < 1:
        raise QcspLabError(f"atom {name} is neither equality nor a tau_k")
    k = int(name[4:])
    if len(atom.args) != 3 * k:
        raise QcspLabError(f"{name} needs {3 * k} arguments, got {len(atom.args)}")
    return k


def decide_tau_qcsp(phi: PHSentence, cut: CutPair) -> bool:
    """Decide a sentence over {tau_k} and constants by fixing every
    existential variable to the least element shared by alpha and beta,
    then checking the remaining universal sentence exhaustively."""
    if not cut.intersects:
        raise QcspLabError("alpha and beta must intersect")
    for atom in phi.body:
        if atom.relation != EQ:
            _tau_index(atom)
    merged = merge_variable_equalities(phi)
    if merged is False:
        return False
    pre = preprocess_constants(merged)
    if pre is False:
        return False
    shared = min(cut.intersection)
    ground = pre.substitute({v: shared for v in pre.existentials})
    universals = ground.universals
    n = cut.domain.size
    for values in itertools.product(range(n), repeat=len(universals)):
        val = dict(zip(universals, values))
        for atom in ground.body:
            t = [val[a] if isinstance(a, str) else a for a in atom.args]
            if atom.relation == EQ:
                ok = t[0] == t[1]
            else:
                ok = any(cut.in_rho3(*t[3 * i:3 * i + 3]) for i in range(len(t) // 3))
            if not ok:
                return False
    return True
