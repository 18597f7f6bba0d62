"""Exhaustive and seeded verification sweeps.

Each suite returns a JSON-ready dict with instance counts, agreements and
any counterexamples verbatim.  Work is split by cut pair (or algebra) so
it can be fanned out across processes; results are merged in input order.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterator, Sequence

from qcsplab import catalog
from qcsplab.clone import build_nu_operation, check_nu_identities, find_nu_violation
from qcsplab.formats import format_sentence
from qcsplab.gadgets import (
    CutPair, FamilySpec, NAEInstance, all_cuts, brute_naesat, build_tau, reduce_naesat_to_qcsp,
    tau_via_sigma_conjunction)
from qcsplab.model import (
    EQ, EXISTS, FORALL, Algebra, Atom, Domain, PHSentence, Relation, Structure)
from qcsplab.powers import (
    generate_subpower, min_generating_size, switch_tuple_count, switch_tuples,
    test_switchability)
from qcsplab.solver import (
    decide_tau_qcsp, evaluate_pi2_restricted, evaluate_qcsp, preprocess_constants_traced)

SUITES = ("theorem3", "prop1", "prop2", "taudef", "powers-sanity", "pi2")


def fan_out(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _merge(parts: list[dict], **extra) -> dict:
    out = {"instances": sum(p["instances"] for p in parts),
           "agreements": sum(p["agreements"] for p in parts),
           "counterexamples": [c for p in parts for c in p["counterexamples"]]}
    out["counterexample_count"] = len(out["counterexamples"])
    out.update(extra)
    return out


# NAE-3SAT reduction

def nae_instances(max_vars: int, max_clauses: int) -> Iterator[NAEInstance]:
    """Every instance over v1..vk (k <= max_vars) with 1..max_clauses ordered clauses."""
    for v in range(1, max_vars + 1):
        names = tuple(f"v{i}" for i in range(1, v + 1))
        triples = list(itertools.product(names, repeat=3))
        for c in range(1, max_clauses + 1):
            for clauses in itertools.product(triples, repeat=c):
                yield NAEInstance(names, clauses)


def reduction_cuts(sizes: Sequence[int]) -> list[CutPair]:
    return [cut for n in sizes for cut in all_cuts(Domain.range(n))
            if cut.alpha_only and cut.beta_only]


def _reduction_for_cut(args) -> dict:
    cut_text, n, max_vars, max_clauses = args
    cut = CutPair.parse(cut_text, Domain.range(n))
    part = {"instances": 0, "agreements": 0, "counterexamples": []}
    for inst in nae_instances(max_vars, max_clauses):
        phi, s = reduce_naesat_to_qcsp(inst, cut)
        sat = brute_naesat(inst)
        true = evaluate_qcsp(phi, s).verdict
        part["instances"] += 1
        if sat == (not true):
            part["agreements"] += 1
        else:
            part["counterexamples"].append({"cut": cut_text, "clauses": [list(c) for c in inst.clauses],
                                            "naesat": sat, "qcsp": true})
    return part


def suite_reduction(cuts: Sequence[CutPair] | None = None, max_vars: int = 3, max_clauses: int = 2,
                   sizes: Sequence[int] = (3, 4), jobs: int = 1) -> dict:
    if cuts is None:
        cuts = reduction_cuts(sizes)
    work = [(c.format(), c.domain.size, max_vars, max_clauses) for c in cuts]
    parts = fan_out(_reduction_for_cut, work, jobs)
    return _merge(parts, cuts=len(cuts), max_vars=max_vars, max_clauses=max_clauses)


# tau definability

def suite_taudef(k_max: int = 2, sizes: Sequence[int] = (2, 3, 4), jobs: int = 1) -> dict:
    work = [(c.format(), c.domain.size, k) for n in sizes for c in all_cuts(Domain.range(n))
            for k in range(1, k_max + 1)]
    parts = fan_out(_taudef_one, work, jobs)
    return _merge(parts, cuts=len(work) // max(k_max, 1), k_max=k_max, sizes=list(sizes))


def _taudef_one(args) -> dict:
    cut_text, n, k = args
    cut = CutPair.parse(cut_text, Domain.range(n))
    direct = build_tau(cut, k).extension
    via = tau_via_sigma_conjunction(cut, k).extension
    ok = direct == via
    cex = [] if ok else [{"cut": cut_text, "n": n, "k": k,
                          "only_direct": [list(t) for t in sorted(direct - via)][:10],
                          "only_conjunction": [list(t) for t in sorted(via - direct)][:10]}]
    return {"instances": 1, "agreements": int(ok), "counterexamples": cex}


# tau decision procedure

def tau_sentences(n: int, max_vars: int) -> Iterator[PHSentence]:
    """Sentences over {tau_1, tau_2} and constants, grouped by body shape.

    Shapes: one tau_1 atom over variables; one tau_2 atom over variables;
    tau_1 plus one pin ``eq(v, a)``; tau_1 with constant arguments (<= 2
    variables); tau_1 plus two pins (<= 3); tau_1 plus a variable equality
    (<= 3).  Every quantifier prefix over x1..xk is used.
    """
    consts = list(range(n))
    for v in range(1, max_vars + 1):
        xs = [f"x{i}" for i in range(1, v + 1)]
        bodies: list[tuple[Atom, ...]] = []
        for args in itertools.product(xs, repeat=3):
            bodies.append((Atom("tau_1", args),))
        if v <= 2:
            for args in itertools.product(xs + consts, repeat=3):
                if any(isinstance(a, int) for a in args):
                    bodies.append((Atom("tau_1", args),))
        for args in itertools.product(xs, repeat=6):
            bodies.append((Atom("tau_2", args),))
        for args in itertools.product(xs, repeat=3):
            tau = Atom("tau_1", args)
            pins = [Atom(EQ, (x, a)) for x in xs for a in consts]
            for pin in pins:
                bodies.append((tau, pin))
            if v <= 3:
                for p, q in itertools.combinations(pins, 2):
                    bodies.append((tau, p, q))
                for x, y in itertools.permutations(xs, 2):
                    bodies.append((tau, Atom(EQ, (x, y))))
        for quants in itertools.product((FORALL, EXISTS), repeat=v):
            prefix = tuple(zip(quants, xs))
            for body in bodies:
                yield PHSentence(prefix, body)


def _tau_decision_for_cut(args) -> dict:
    cut_text, n, max_vars = args
    d = Domain.range(n)
    cut = CutPair.parse(cut_text, d)
    s = Structure(d, families=(FamilySpec("tau", "tau", cut),))
    part = {"instances": 0, "agreements": 0, "counterexamples": [], "rules": {}}
    for phi in tau_sentences(n, max_vars):
        for rule in set(preprocess_constants_traced(phi)[1]):
            part["rules"][str(rule)] = part["rules"].get(str(rule), 0) + 1
        fast = decide_tau_qcsp(phi, cut)
        slow = evaluate_qcsp(phi, s).verdict
        part["instances"] += 1
        if fast == slow:
            part["agreements"] += 1
        else:
            part["counterexamples"].append({"cut": cut_text, "sentence": format_sentence(phi, d),
                                            "decide_tau": fast, "evaluate": slow})
    return part


def suite_tau_decision(n: int = 3, max_vars: int = 4, jobs: int = 1) -> dict:
    cuts = [c for c in all_cuts(Domain.range(n)) if c.intersects]
    parts = fan_out(_tau_decision_for_cut, [(c.format(), n, max_vars) for c in cuts], jobs)
    rules: dict[str, int] = {}
    for p in parts:
        for r, cnt in p["rules"].items():
            rules[r] = rules.get(r, 0) + cnt
    return _merge(parts, cuts=len(cuts), n=n, max_vars=max_vars,
                  rule_hits=dict(sorted(rules.items())))


# near-unanimity

def suite_nu(n: int = 3, n_max: int = 2) -> dict:
    d = Domain.range(n)
    arity = 3 * n_max + 1
    part = {"instances": 0, "agreements": 0, "counterexamples": []}
    cuts = [c for c in all_cuts(d) if c.intersects]
    for cut in cuts:
        f = build_nu_operation(d, cut, arity)
        ok = check_nu_identities(f)
        part["instances"] += 1
        part["agreements"] += int(ok)
        if not ok:
            part["counterexamples"].append({"cut": cut.format(), "failure": "nu identities"})
        for i in range(1, n_max + 1):
            w = find_nu_violation(f, build_tau(cut, i))
            part["instances"] += 1
            if w is None:
                part["agreements"] += 1
            else:
                part["counterexamples"].append({"cut": cut.format(), "i": i,
                                                "args": [list(t) for t in w.args],
                                                "image": list(w.image)})
    return _merge([part], cuts=len(cuts), arity=arity, n=n, n_max=n_max)


# generating sets

def suite_powers_sanity(m_max: int = 3, n: int = 2, census: tuple[int, int] = (4, 6)) -> dict:
    rows = []
    part = {"instances": 0, "agreements": 0, "counterexamples": []}
    proj = catalog.projections_algebra(n)
    for m in range(1, m_max + 1):
        f = min_generating_size(proj, m)
        part["instances"] += 1
        if f == n ** m:
            part["agreements"] += 1
        else:
            part["counterexamples"].append({"algebra": proj.name, "m": m, "f": f, "expected": n ** m})
        rows.append({"algebra": proj.name, "m": m, "f": f})
    semi = catalog.semilattice_algebra(n)
    rows += [{"algebra": semi.name, "m": m, "f": min_generating_size(semi, m)}
             for m in range(1, m_max + 1)]
    n_top, m_top = census
    for nn in range(1, n_top + 1):
        d = Domain.range(nn)
        for m in range(1, m_top + 1):
            for k in range(m):
                got = len(switch_tuples(d, m, k))
                want = switch_tuple_count(nn, m, k)
                part["instances"] += 1
                if got == want:
                    part["agreements"] += 1
                else:
                    part["counterexamples"].append({"n": nn, "m": m, "k": k, "got": got, "want": want})
    return _merge([part], rows=rows)


# Pi_2 relativization

def random_structure(rng: random.Random, n: int, arities=(1, 2, 3)) -> Structure:
    rels = []
    for i, r in enumerate(arities):
        everything = list(itertools.product(range(n), repeat=r))
        rels.append(Relation(f"r{i}", r, frozenset(t for t in everything if rng.random() < 0.6)))
    return Structure(Domain.range(n), tuple(rels))


def random_sentence(rng: random.Random, s: Structure, prefix: Sequence[tuple[str, str]],
                    atoms: int, const_rate: float = 0.1) -> PHSentence:
    xs = [v for _, v in prefix]
    body = []
    for _ in range(atoms):
        r = rng.choice(s.relations)
        args = tuple(rng.randrange(s.domain.size) if rng.random() < const_rate else rng.choice(xs)
                     for _ in range(r.arity))
        body.append(Atom(r.name, args))
    return PHSentence(tuple(prefix), tuple(body))


def random_pi2(rng: random.Random, s: Structure, m: int, e: int, atoms: int) -> PHSentence:
    prefix = [(FORALL, f"u{i}") for i in range(1, m + 1)] + [(EXISTS, f"y{i}") for i in range(1, e + 1)]
    return random_sentence(rng, s, prefix, atoms)


def invariant_relations(alg: Algebra, arity: int) -> list[Relation]:
    """Every nonempty relation of the given arity closed under the algebra."""
    everything = list(itertools.product(range(alg.domain.size), repeat=arity))
    out = []
    for mask in range(1, 2 ** len(everything)):
        rel = frozenset(t for i, t in enumerate(everything) if mask >> i & 1)
        if generate_subpower(alg, rel) == rel:
            out.append(Relation(f"r{len(out)}", arity, rel))
    return out


SWITCHABLE = (("majority", 2), ("affine", 2), ("majority", 3))


def _pi2_switch_for_algebra(args) -> dict:
    name, n, k, m_max = args
    alg = catalog.CATALOG[name](n)
    part = {"instances": 0, "agreements": 0, "counterexamples": [], "verified": {}}
    for m in range(1, m_max + 1):
        part["verified"][str(m)] = test_switchability(alg, m, k)
    if not all(part["verified"].values()):
        return part
    d = alg.domain
    rels = invariant_relations(alg, 2)
    for m in range(1, m_max + 1):
        universe = sorted(switch_tuples(d, m, k))
        xs = [f"u{i}" for i in range(1, m + 1)] + ["y"]
        prefix = tuple((FORALL, x) for x in xs[:-1]) + ((EXISTS, "y"),)
        pairs = list(itertools.product(xs, repeat=2))
        for r in rels:
            s = Structure(d, (r,))
            atoms = [Atom(r.name, p) for p in pairs]
            bodies = [(a,) for a in atoms] + list(itertools.combinations(atoms, 2))
            for body in bodies:
                phi = PHSentence(prefix, body)
                full = evaluate_qcsp(phi, s).verdict
                restricted = evaluate_pi2_restricted(phi, s, universe)
                part["instances"] += 1
                if full == restricted:
                    part["agreements"] += 1
                else:
                    part["counterexamples"].append({
                        "algebra": f"{name}{n}", "relation": sorted(map(list, r.extension)),
                        "sentence": format_sentence(phi, d), "full": full, "restricted": restricted})
    return part


def suite_pi2(samples: int = 1000, seed: int = 0, k: int = 1, jobs: int = 1,
              switch_m_max: dict | None = None) -> dict:
    rng = random.Random(seed)
    full_part = {"instances": 0, "agreements": 0, "counterexamples": []}
    for _ in range(samples):
        n = rng.randint(2, 3)
        m = rng.randint(1, 3)
        e = rng.randint(1, 2)
        s = random_structure(rng, n)
        phi = random_pi2(rng, s, m, e, rng.randint(1, 4))
        a = evaluate_qcsp(phi, s).verdict
        b = evaluate_pi2_restricted(phi, s, s.domain.tuples(m))
        full_part["instances"] += 1
        if a == b:
            full_part["agreements"] += 1
        else:
            full_part["counterexamples"].append({"sentence": format_sentence(phi, s.domain),
                                                 "evaluate": a, "restricted": b})
    switch_m_max = switch_m_max or {2: 3, 3: 2}
    work = [(name, n, k, switch_m_max[n]) for name, n in SWITCHABLE]
    parts = fan_out(_pi2_switch_for_algebra, work, jobs)
    verified = {f"{name}{n}": p["verified"] for (name, n, _, _), p in zip(work, parts)}
    switch = _merge(parts, verified=verified, k=k)
    full = _merge([full_part], samples=samples, seed=seed)
    return {"instances": full["instances"] + switch["instances"],
            "agreements": full["agreements"] + switch["agreements"],
            "counterexample_count": full["counterexample_count"] + switch["counterexample_count"],
            "full_universe": full, "switch_universe": switch}


def run_suite(name: str, params: dict, seed: int = 0, jobs: int = 1) -> dict:
    if name == "theorem3":
        cuts = None
        if params.get("cut"):
            cuts = [CutPair.parse(params["cut"])]
        return suite_reduction(cuts, params.get("max_vars", 3), params.get("max_clauses", 2),
                              params.get("sizes", (3, 4)), jobs)
    if name == "prop1":
        return suite_tau_decision(params.get("n", 3), params.get("max_vars", 4), jobs)
    if name == "prop2":
        return suite_nu(params.get("n", 3), params.get("n_max", 2))
    if name == "taudef":
        return suite_taudef(params.get("k_max", 2), params.get("sizes", (2, 3, 4)), jobs)
    if name == "powers-sanity":
        return suite_powers_sanity(params.get("max_m", 3), params.get("n", 2))
    if name == "pi2":
        return suite_pi2(params.get("samples", 1000), seed, params.get("k", 1), jobs)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
