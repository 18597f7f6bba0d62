"""Run every verification sweep at its default size and write one report per suite."""

import argparse
from pathlib import Path

from qcsplab.cli import ExperimentConfig, run
from qcsplab.suites import SUITES


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="reports")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--only", nargs="*", choices=SUITES)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    worst = 0
    for suite in args.only or SUITES:
        print(f"== {suite}", flush=True)
        cfg = ExperimentConfig("verify", {"suite": suite}, seed=args.seed, jobs=args.jobs,
                               report=str(out / f"{suite}.json"))
        worst = max(worst, run(cfg))
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
