"""Solve the cos 4θ boundary example to order K and print the exact terms."""

import argparse

from torsion_series import hierarchy
from torsion_series.serialization import field_str
from torsion_series.fourier import ThetaField
from fractions import Fraction


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--amplitude", default="1/20")
    args = ap.parse_args()

    g = ThetaField.from_coeffs(0, {4: Fraction(args.amplitude)})
    st = hierarchy.run(g, args.k)
    for k in range(1, st.K + 1):
        print(f"w_{k} = {field_str(st.w[k])}")
        print(f"u_{k} = {field_str(st.u[k])}")
        print()


if __name__ == "__main__":
    main()
