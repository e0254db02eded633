"""Print the bound constants and optimal truncation order for a few parameter sets."""

import argparse
import json

from torsion_series import bounds


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rho", type=float, default=1.0)
    ap.add_argument("--sigma", type=float, default=0.1733)
    ap.add_argument("--gamma", type=float, default=0.0)
    ap.add_argument("--mu", type=float, nargs="+", default=[1e-3, 1e-30, 1e-100])
    args = ap.parse_args()

    for mu in args.mu:
        rep = bounds.bound_report(args.rho, args.sigma, args.gamma, mu)
        print(json.dumps(rep.as_dict(), default=str))


if __name__ == "__main__":
    main()
