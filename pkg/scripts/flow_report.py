"""Straightening-chart diagnostics for every catalog field (JSON on stdout)."""
import argparse
import json

from fracdrift.coordinates import CATALOG
from fracdrift.suites import coordinate_residuals


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()
    report = {name: coordinate_residuals(name, seed=args.seed) for name in CATALOG}
    print(json.dumps(report, indent=2, sort_keys=True, default=float))


if __name__ == "__main__":
    main()
