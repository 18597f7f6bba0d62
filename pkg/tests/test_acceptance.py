"""Acceptance criteria, each run at its stated size and time bound.

Every test records one pass/fail line; the lines are printed in the
terminal summary (see conftest.py) and when this file is run directly.
"""

from __future__ import annotations

import json
import time

import pytest

from oracles import naive_min_generating
from qcsplab import catalog
from qcsplab.canonical import AdversarySet, build_canonical_sentence
from qcsplab.cli import ExperimentConfig, payload, run
from qcsplab.model import Domain, QcspLabError, Relation, Structure
from qcsplab.powers import min_generating_size, switch_tuples
from qcsplab.suites import (
    SUITES, reduction_cuts, suite_pi2, suite_tau_decision, suite_nu, suite_taudef, suite_reduction)

RESULTS: list[str] = []


def record(number: int, title: str, ok: bool, elapsed: float, bound: float, detail: str = ""):
    status = "PASS" if ok and elapsed < bound else "FAIL"
    RESULTS.append(f"criterion {number} [{status}] {title}: {detail} ({elapsed:.1f}s, bound {bound:.0f}s)")
    assert ok, detail
    assert elapsed < bound, f"took {elapsed:.1f}s, bound {bound}s"


def test_criterion_1_reduction_equivalence():
    t = time.perf_counter()
    cuts = reduction_cuts((3, 4))
    r = suite_reduction(cuts, max_vars=3, max_clauses=2)
    elapsed = time.perf_counter() - t
    ok = r["counterexample_count"] == 0 and r["agreements"] == r["instances"] == 830 * len(cuts)
    record(1, "NAE-3SAT reduction equivalence", ok, elapsed, 60,
           f"{r['instances']} instances over {len(cuts)} cuts, {r['counterexample_count']} counterexamples")


def test_criterion_2_tau_definability():
    t = time.perf_counter()
    r = suite_taudef(k_max=2, sizes=(2, 3, 4))
    elapsed = time.perf_counter() - t
    ok = r["counterexample_count"] == 0 and r["instances"] > 0
    record(2, "tau_k equals the sigma_k conjunction", ok, elapsed, 60,
           f"{r['instances']} (cut, k) pairs, {r['counterexample_count']} mismatches")


def test_criterion_3_tau_decision_procedure():
    t = time.perf_counter()
    r = suite_tau_decision(n=3, max_vars=4)
    elapsed = time.perf_counter() - t
    rules = r["rule_hits"]
    ok = (r["counterexample_count"] == 0 and r["agreements"] == r["instances"]
          and all(rules.get(str(i), 0) > 0 for i in (1, 2, 3, 4)))
    record(3, "decide_tau_qcsp agrees with evaluate_qcsp", ok, elapsed, 300,
           f"{r['instances']} sentences over {r['cuts']} cuts, rule hits {rules}, "
           f"{r['counterexample_count']} disagreements")


def test_criterion_4_nu_construction():
    t = time.perf_counter()
    r = suite_nu(n=3, n_max=2)
    elapsed = time.perf_counter() - t
    ok = r["counterexample_count"] == 0 and r["arity"] == 7 and r["instances"] == 3 * r["cuts"]
    record(4, "NU operation of arity 7 preserves tau_1, tau_2", ok, elapsed, 300,
           f"{r['cuts']} cuts, {r['counterexample_count']} failures")


def test_criterion_5_switch_census():
    from math import comb
    t = time.perf_counter()
    bad = []
    for n in range(1, 5):
        for m in range(1, 7):
            for k in range(m):
                want = sum(comb(m - 1, j) * n * (n - 1) ** j for j in range(k + 1))
                got = len(switch_tuples(Domain.range(n), m, k))
                if got != want:
                    bad.append((n, m, k, got, want))
    elapsed = time.perf_counter() - t
    record(5, "switch-tuple census", not bad, elapsed, 1, f"{len(bad)} mismatches")


def test_criterion_6_powers_oracle():
    t = time.perf_counter()
    rows = {}
    for name in ("meet", "projections"):
        alg = catalog.CATALOG[name](2)
        fast = tuple(min_generating_size(alg, m) for m in (1, 2, 3))
        oracle = tuple(naive_min_generating(alg.operations, 2, m) for m in (1, 2, 3))
        rows[name] = (fast, oracle)
    elapsed = time.perf_counter() - t
    ok = (all(f == o for f, o in rows.values()) and rows["projections"][0] == (2, 4, 8)
          and rows["meet"][0] == (2, 3, 4))
    record(6, "f(m) matches the naive subset oracle", ok, elapsed, 60,
           ", ".join(f"{k} f={v[0]} oracle={v[1]}" for k, v in rows.items()))


def test_criterion_7_pi2_restriction():
    t = time.perf_counter()
    r = suite_pi2(samples=1000, seed=0, k=1)
    elapsed = time.perf_counter() - t
    full, switch = r["full_universe"], r["switch_universe"]
    verified = all(all(v.values()) for v in switch["verified"].values())
    ok = (full["instances"] == 1000 and full["counterexample_count"] == 0
          and switch["counterexample_count"] == 0 and switch["instances"] > 0 and verified)
    record(7, "Pi_2 restriction soundness", ok, elapsed, 300,
           f"full universe {full['agreements']}/{full['instances']}, "
           f"switch universe {switch['agreements']}/{switch['instances']}")


def test_criterion_8_canonical_shape():
    t = time.perf_counter()
    s = Structure(Domain.range(2), (Relation("r", 2, {(0, 1), (1, 0)}),))
    c = build_canonical_sentence(s, AdversarySet.full(2, 1))
    shape = (c.product_size, len(c.sentence.universals), len(c.sentence.existentials))
    try:
        build_canonical_sentence(s, AdversarySet(1, (frozenset({(0,)}),)))
        rejected = False
    except QcspLabError:
        rejected = True
    elapsed = time.perf_counter() - t
    record(8, "canonical sentence shape", shape == (16, 2, 14) and rejected, elapsed, 10,
           f"product {shape[0]}, {shape[1]} universals, {shape[2]} existentials, "
           f"degenerate rejected={rejected}")


DETERMINISM_PARAMS = {
    "theorem3": {"cut": None, "max_vars": 2, "max_clauses": 2},
    "prop1": {"n": 3, "max_vars": 2},
    "prop2": {"n": 3, "n_max": 1},
    "taudef": {"k_max": 1},
    "powers-sanity": {"max_m": 2, "n": 2},
    "pi2": {"samples": 100, "k": 1},
}


def test_criterion_9_determinism(tmp_path):
    t = time.perf_counter()
    differing = []
    for suite in SUITES:
        payloads = []
        for rep in range(2):
            params = {"suite": suite, **DETERMINISM_PARAMS[suite]}
            path = tmp_path / f"{suite}-{rep}.json"
            run(ExperimentConfig("verify", params, seed=3, report=str(path)))
            payloads.append(payload(json.loads(path.read_text())))
        if payloads[0] != payloads[1]:
            differing.append(suite)
    elapsed = time.perf_counter() - t
    record(9, "byte-identical report payloads", not differing, elapsed, 300,
           f"{len(SUITES)} suites run twice, differing: {differing or 'none'}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
