"""Sweep mu, measure the boundary defects on a grid and fit the log-log slope."""

import argparse
from fractions import Fraction

import numpy as np

from torsion_series import defects, hierarchy
from torsion_series.fourier import ThetaField


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--n-mu", type=int, default=20)
    ap.add_argument("--grid", default="256x512")
    args = ap.parse_args()

    n_r, n_t = (int(x) for x in args.grid.split("x"))
    st = hierarchy.run(ThetaField.from_coeffs(0, {4: Fraction(1, 20)}), args.k)
    mus = np.geomspace(1e-3, 1e-1, args.n_mu)
    reps = defects.sweep(st, args.k, mus, n_r, n_t)
    print("mu,sup_R,sup_ED,sup_EN")
    for mu, r in zip(mus, reps):
        print(f"{mu:.6e},{r.sup_R:.6e},{r.sup_ED:.6e},{r.sup_EN:.6e}")
    sd = defects.fit_loglog_slope(mus, [r.sup_ED for r in reps])
    sn = defects.fit_loglog_slope(mus, [r.sup_EN for r in reps])
    print(f"# slope E_D {sd:.4f}  E_N {sn:.4f}  (expected K+1 = {args.k + 1})")


if __name__ == "__main__":
    main()
