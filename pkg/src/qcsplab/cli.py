"""Command-line entry point: ``qcsplab <subcommand> [flags]``.

Exit codes: 0 = true / success, 1 = false / counterexamples found,
2 = error (a JSON error object is printed to stderr).
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from qcsplab import catalog
from qcsplab.canonical import AdversarySet, build_canonical_sentence, reduct_compactness_probe
from qcsplab.clone import enumerate_polymorphisms
from qcsplab.dnf import format_dnf
from qcsplab.formats import (
    dump_structure, format_sentence, load_algebra, load_sentence, load_structure,
    operation_to_json, read_universe)
from qcsplab.gadgets import (
    CutPair, build_rho, build_rho_prime, build_sigma, build_tau, format_naesat, parse_naesat,
    reduce_naesat_to_qcsp, tau_via_sigma_conjunction)
from qcsplab.model import DEFAULT_BUDGET, Domain, QcspLabError, Structure
from qcsplab.powers import (
    collapse_tuples, growth_profile, switch_tuples, test_collapsibility, test_switchability)
from qcsplab.solver import decide_tau_qcsp, evaluate_pi2_restricted, evaluate_qcsp, split_pi2
from qcsplab.suites import SUITES, run_suite

SCHEMA_VERSION = 1
INPUT_KEYS = ("structure", "instance", "algebra", "universe_file", "nae")


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    jobs: int = 1
    report: str | None = None


def _inputs_digest(config: ExperimentConfig) -> str:
    h = hashlib.sha256()
    for key in INPUT_KEYS:
        path = config.params.get(key)
        if not path:
            continue
        h.update(key.encode())
        if str(path).startswith("builtin:"):
            h.update(str(path).encode())
        else:
            h.update(Path(path).read_bytes())
    return h.hexdigest()


def payload(report: dict) -> str:
    """The deterministic part of a report, serialized."""
    return json.dumps({k: v for k, v in report.items() if k != "meta"}, sort_keys=True)


def _parse_universe(spec: str, d: Domain, m: int):
    kind, _, arg = spec.partition(":")
    if kind == "switch":
        return sorted(switch_tuples(d, m, int(arg)))
    if kind == "collapse":
        return sorted(collapse_tuples(d, m, int(arg)))
    if kind == "file":
        return read_universe(arg, d)
    raise QcspLabError(f"unknown universe {spec!r}; use switch:k, collapse:k or file:PATH")


def _load_algebra_arg(spec: str):
    if spec.startswith("builtin:"):
        _, name, *rest = spec.split(":")
        n = int(rest[0]) if rest else 2
        if name not in catalog.CATALOG:
            raise QcspLabError(f"unknown builtin algebra {name!r}")
        return catalog.CATALOG[name](n)
    return load_algebra(spec)


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")


# handlers return (exit code, results dict)

def cmd_pol(p: dict, c: ExperimentConfig):
    s = load_structure(p["structure"])
    ops = list(enumerate_polymorphisms(s, p["arity"], p["idempotent"], c.budget))
    return 0, {"count": len(ops), "operations": [operation_to_json(f, s.domain) for f in ops]}


def cmd_powers(p: dict, c: ExperimentConfig):
    alg = _load_algebra_arg(p["algebra"])
    mode, k = p["mode"], p["k"]
    if mode == "exact":
        prof = growth_profile(alg, p["max_m"], k if k is not None else -1, c.budget)
        rows = prof.rows()
        hint = prof.hint
    else:
        k = 0 if k is None else k
        test = test_collapsibility if mode == "collapse" else test_switchability
        rows = []
        for m in range(1, p["max_m"] + 1):
            row = {"m": m, "f": None, "collapse": {}, "switch": {}}
            row[mode][str(k)] = test(alg, m, min(k, m))
            rows.append(row)
        hint = "inconclusive"
    return 0, {"algebra": alg.name, "rows": rows, "hint": hint}


def cmd_solve(p: dict, c: ExperimentConfig):
    s = load_structure(p["structure"])
    phi = load_sentence(p["instance"], s.domain)
    if p["mode"] == "pi2":
        universals, _ = split_pi2(phi)
        m = len(universals)
        universe = (_parse_universe(p["universe"], s.domain, m) if p["universe"]
                    else list(s.domain.tuples(m)))
        verdict = evaluate_pi2_restricted(phi, s, universe, c.budget)
        result = {"verdict": verdict, "mode": "pi2", "universe_size": len(universe)}
    else:
        trace = evaluate_qcsp(phi, s, c.budget, strategy=p["trace"])
        result = {"verdict": trace.verdict, "mode": "full"}
        if p["trace"]:
            name = s.domain.name
            if trace.counterexample is not None:
                result["counterexample"] = {v: name(a) for v, a in trace.counterexample.items()}
            if trace.strategy is not None:
                result["strategy"] = [{"universal": [name(x) for x in u],
                                       "response": {v: name(a) for v, a in r.items()}}
                                      for u, r in sorted(trace.strategy.items())]
    return (0 if result["verdict"] else 1), result


def cmd_decide_tau(p: dict, c: ExperimentConfig):
    cut = CutPair.parse(f"{p['alpha']}:{p['beta']}")
    phi = load_sentence(p["instance"], cut.domain)
    verdict = decide_tau_qcsp(phi, cut)
    return (0 if verdict else 1), {"verdict": verdict, "cut": cut.format()}


GADGETS = {"rho": lambda cut, k, b: build_rho(cut), "rho3": lambda cut, k, b: build_rho_prime(cut),
           "sigma": build_sigma, "tau": build_tau}


def cmd_gadget(p: dict, c: ExperimentConfig):
    cut = CutPair.parse(p["cut"])
    r = GADGETS[p["kind"]](cut, p["k"], c.budget)
    name = cut.domain.name
    result = {"relation": r.name, "arity": r.arity, "dnf_disjuncts": len(r.dnf.disjuncts),
              "dnf_size": r.dnf.size,
              "extension_size": len(r.extension) if r.materialized else None}
    if p["emit"] == "dnf":
        text = format_dnf(r.dnf, cut.domain)
    else:
        text = "\n".join(" ".join(name(x) for x in t) for t in r.sorted_tuples())
    _write(p.get("out"), text + "\n")
    if not p.get("out"):
        print(text)
    return 0, result


def cmd_reduce_naesat(p: dict, c: ExperimentConfig):
    inst = parse_naesat(Path(p["nae"]).read_text(encoding="utf-8"))
    cut = CutPair.parse(p["cut"])
    phi, s = reduce_naesat_to_qcsp(inst, cut)
    text = format_sentence(phi, s.domain)
    _write(p.get("out"), text + "\n")
    if p.get("structure_out"):
        dump_structure(s, p["structure_out"])
    return 0, {"sentence": text, "clauses": len(inst.clauses), "variables": len(inst.variables),
               "instance": format_naesat(inst)}


def cmd_check_tau_def(p: dict, c: ExperimentConfig):
    cut = CutPair.parse(p["cut"])
    direct = build_tau(cut, p["k"], c.budget)
    via = tau_via_sigma_conjunction(cut, p["k"], c.budget)
    mismatches = len(direct.tuples() ^ via.tuples())
    return (0 if mismatches == 0 else 1), {"cut": cut.format(), "k": p["k"],
                                           "tau_size": len(direct.tuples()),
                                           "conjunction_size": len(via.tuples()),
                                           "mismatches": mismatches}


def _omega(spec: str, n: int, m: int) -> AdversarySet:
    if spec == "full":
        return AdversarySet.full(n, m)
    kind, _, k = spec.partition(":")
    if kind == "switch":
        return AdversarySet.switching(n, m, int(k))
    raise QcspLabError(f"unknown adversary {spec!r}; use full or switch:k")


def cmd_canonical(p: dict, c: ExperimentConfig):
    s = load_structure(p["structure"])
    can = build_canonical_sentence(s, _omega(p["adversary"], s.domain.size, p["m"]))
    text = format_sentence(can.sentence, s.domain)
    _write(p.get("out"), text + "\n")
    return 0, {"factors": can.factors, "product_size": can.product_size,
               "universals": len(can.sentence.universals),
               "existentials": len(can.sentence.existentials),
               "atoms": len(can.sentence.body)}


def cmd_compactness(p: dict, c: ExperimentConfig):
    s = load_structure(p["structure"])
    fams = [f for f in s.families if f.kind == p["family"] or f.name == p["family"]]
    if not fams:
        raise QcspLabError(f"structure has no family {p['family']!r}")
    s = Structure(s.domain, s.relations, tuple(fams), s.constants)
    omega = _omega(p["adversary"], s.domain.size, p["m"])
    report = reduct_compactness_probe(s, omega, p["k_max"])
    return 0, report


def cmd_verify(p: dict, c: ExperimentConfig):
    result = run_suite(p["suite"], p, seed=c.seed, jobs=c.jobs)
    return (0 if result["counterexample_count"] == 0 else 1), result


HANDLERS = {
    "pol": cmd_pol, "powers": cmd_powers, "solve": cmd_solve, "decide-tau": cmd_decide_tau,
    "gadget": cmd_gadget, "reduce-naesat": cmd_reduce_naesat, "check-tau-def": cmd_check_tau_def,
    "canonical": cmd_canonical, "compactness": cmd_compactness, "verify": cmd_verify,
}


def run(config: ExperimentConfig) -> int:
    """Dispatch one experiment and write its report; returns the exit code."""
    started = time.perf_counter()
    report = {"schema_version": SCHEMA_VERSION, "command": config.command,
              "config": {k: v for k, v in asdict(config).items() if k != "report"}}
    try:
        report["inputs_digest"] = _inputs_digest(config)
        code, results = HANDLERS[config.command](config.params, config)
        report["results"] = results
    except (QcspLabError, OSError, ValueError, KeyError, json.JSONDecodeError) as e:
        error = {"type": type(e).__name__, "message": str(e)}
        if isinstance(e, OSError) and e.filename:
            error["path"] = str(e.filename)
        report["error"] = error
        print(json.dumps({"error": error}), file=sys.stderr)
        code = 2
    report["exit_code"] = code
    report["meta"] = {"timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
                      "seconds": round(time.perf_counter() - started, 3)}
    if config.report:
        Path(config.report).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")
    if "results" in report:
        print(json.dumps(report["results"], sort_keys=True, default=str))
    return code


def _float_int(text: str) -> int:
    return int(float(text))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=_float_int, default=DEFAULT_BUDGET)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--report", help="write a JSON report here")
    common.add_argument("--jobs", type=int, default=1)

    parser = argparse.ArgumentParser(prog="qcsplab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pol", parents=[common], help="enumerate polymorphisms")
    p.add_argument("--structure", required=True)
    p.add_argument("--arity", type=int, required=True)
    p.add_argument("--idempotent", action="store_true")

    p = sub.add_parser("powers", parents=[common], help="generating sets of algebra powers")
    p.add_argument("--algebra", required=True, help="algebra JSON file or builtin:NAME[:n]")
    p.add_argument("--max-m", type=int, default=3)
    p.add_argument("--mode", choices=("exact", "collapse", "switch"), default="exact")
    p.add_argument("--k", type=int)

    p = sub.add_parser("solve", parents=[common], help="evaluate a sentence")
    p.add_argument("--structure", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--mode", choices=("full", "pi2"), default="full")
    p.add_argument("--universe", help="switch:k, collapse:k or file:U.json")
    p.add_argument("--trace", action="store_true")

    p = sub.add_parser("decide-tau", parents=[common], help="decide a sentence over the tau family")
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--instance", required=True)

    p = sub.add_parser("gadget", parents=[common], help="print rho, rho3, sigma_k or tau_k")
    p.add_argument("--cut", required=True)
    p.add_argument("--kind", choices=tuple(GADGETS), default="tau")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--emit", choices=("dnf", "extension"), default="dnf")
    p.add_argument("--out")

    p = sub.add_parser("reduce-naesat", parents=[common], help="NAE-3SAT instance to a tau sentence")
    p.add_argument("nae")
    p.add_argument("--cut", required=True)
    p.add_argument("--out")
    p.add_argument("--structure-out")

    p = sub.add_parser("check-tau-def", parents=[common], help="compare tau_k with the sigma_k conjunction")
    p.add_argument("--cut", required=True)
    p.add_argument("--k", type=int, default=2)

    p = sub.add_parser("canonical", parents=[common], help="build a canonical sentence")
    p.add_argument("--structure", required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--adversary", default="full")
    p.add_argument("--out")

    p = sub.add_parser("compactness", parents=[common], help="probe truncations of a family")
    p.add_argument("--structure", required=True)
    p.add_argument("--family", default="tau")
    p.add_argument("--k-max", type=int, default=2)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--adversary", default="full")

    for suite in SUITES:
        p = sub.add_parser(f"verify-{suite}", parents=[common], help=f"run the {suite} sweep")
        p.set_defaults(suite=suite)
        if suite == "theorem3":
            p.add_argument("--cut")
            p.add_argument("--max-vars", type=int, default=3)
            p.add_argument("--max-clauses", type=int, default=2)
        elif suite == "prop1":
            p.add_argument("--n", type=int, default=3)
            p.add_argument("--max-vars", type=int, default=4)
        elif suite == "prop2":
            p.add_argument("--n", type=int, default=3)
            p.add_argument("--n-max", type=int, default=2)
        elif suite == "taudef":
            p.add_argument("--k-max", type=int, default=2)
        elif suite == "powers-sanity":
            p.add_argument("--max-m", type=int, default=3)
            p.add_argument("--n", type=int, default=2)
        elif suite == "pi2":
            p.add_argument("--samples", type=int, default=1000)
            p.add_argument("--k", type=int, default=1)
    return parser


def config_from_args(argv: list[str] | None = None) -> ExperimentConfig:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    common = {k: args.pop(k) for k in ("budget", "seed", "report", "jobs")}
    if command.startswith("verify-"):
        command = "verify"
    return ExperimentConfig(command, args, **common)


def main(argv: list[str] | None = None) -> int:
    return run(config_from_args(argv))


if __name__ == "__main__":
    sys.exit(main())
