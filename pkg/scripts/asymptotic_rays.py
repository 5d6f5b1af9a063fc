"""Kernel values along the three singular families and their fitted exponents.

For each s the upper axis, the lower cone and the grazing family are sampled;
fits go to stderr, samples to CSV.
"""
import argparse
import csv
import sys

from fracdrift.errors import FitError
from fracdrift.green import GreenParams, Regime, asymptotic_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=float, nargs="+", default=[0.2, 0.3, 0.4])
    ap.add_argument("--b", type=float, default=1.0)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("-o", "--output")
    args = ap.parse_args()

    out = open(args.output, "w", newline="") if args.output else sys.stdout
    w = csv.writer(out)
    w.writerow(["s", "regime", "t", "value"])
    for s in args.s:
        p = GreenParams(s, args.b, args.n)
        for reg in Regime:
            try:
                rec = asymptotic_report(p, reg)
            except FitError as exc:
                print(f"s={s} {reg.value}: {exc}", file=sys.stderr)
                continue
            for t, v in zip(rec.samples, rec.values):
                w.writerow([s, reg.value, repr(float(t)), repr(float(v))])
            if reg is Regime.GRAZING_UPPER:
                print(f"s={s} {reg.value}: slope {rec.constant:.5g} (heat tail {rec.reference:.5g}), "
                      f"R^2 {rec.r_squared:.6f}", file=sys.stderr)
            else:
                print(f"s={s} {reg.value}: exponent {rec.exponent:.4f} (expected {rec.expected:.4f})",
                      file=sys.stderr)


if __name__ == "__main__":
    main()
