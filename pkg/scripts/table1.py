"""Print the demo majorant recurrence table next to its exact closed form."""

import argparse

from torsion_series import bounds


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k-max", type=int, default=9)
    args = ap.parse_args()

    print(bounds.table1_text(args.k_max))
    t = bounds.recurrence_sequences(bounds.TABLE1_W, bounds.TABLE1_U, args.k_max)
    print()
    print("k | Z~_k (closed form) | single-term Catalan")
    for k in range(1, args.k_max + 1):
        exact = bounds.ztilde_closed_form(3, 4, k)
        top = bounds.catalan_closed_form(3, 4, k)
        flag = "" if exact == t.Z_tilde[k] else "  MISMATCH"
        print(f"{k} | {exact} | {top}{flag}")


if __name__ == "__main__":
    main()
