"""Print f(m) and the collapse/switch profile for each catalog algebra."""

import argparse

from qcsplab import catalog
from qcsplab.model import BudgetExceeded
from qcsplab.powers import growth_profile


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=2)
    parser.add_argument("--max-m", type=int, default=4)
    parser.add_argument("--k", type=int, default=1)
    parser.add_argument("--budget", type=int, default=200_000)
    args = parser.parse_args()
    for name, make in sorted(catalog.CATALOG.items()):
        alg = make(args.n)
        try:
            prof = growth_profile(alg, args.max_m, args.k, args.budget)
        except BudgetExceeded as e:
            print(f"{name}: {e}")
            continue
        print(f"{name} (n={args.n}) hint={prof.hint}")
        for row in prof.rows():
            print(f"  m={row['m']}  f={row['f']}  collapse={row['collapse']}  switch={row['switch']}")


if __name__ == "__main__":
    main()
