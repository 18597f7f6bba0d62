"""Canonical-sentence probe over truncations of a sigma family on two elements."""

import argparse
import json

from qcsplab.canonical import AdversarySet, reduct_compactness_probe
from qcsplab.gadgets import CutPair, FamilySpec
from qcsplab.model import Domain, Structure


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k-max", type=int, default=2)
    parser.add_argument("--adversary", choices=("full", "switch"), default="full")
    args = parser.parse_args()
    d = Domain.range(2)
    s = Structure(d, (), (FamilySpec("sigma", "sigma", CutPair(d, {0}, {1})),))
    omega = AdversarySet.full(2, 1) if args.adversary == "full" else AdversarySet.switching(2, 1, 0)
    report = reduct_compactness_probe(s, omega, args.k_max)
    print(json.dumps({k: report[k] for k in ("levels", "forward_monotone", "recurring_witness")},
                     indent=2))


if __name__ == "__main__":
    main()
