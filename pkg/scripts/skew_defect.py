"""Exact stationarity residuals of the product measure on the skew product.

For each t, prints the worst cylinder and its residual |m*nu(A) - nu(A)|
next to the closed form for A = {w0 = 1} x C(a): m*nu(A) = (2t/3 + t^2/3)/4
against nu(A) = t/4. The residual vanishes only at t = 0 and t = 1.
"""

import argparse
from fractions import Fraction

from stationary_lab.skew import check_stationarity_skew


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--grid", type=int, default=6)
    args = ap.parse_args()

    print("t,passed,worst,residual,pushed_w0_1_a,mass_w0_1_a")
    for k in range(args.grid + 1):
        t = Fraction(k, args.grid)
        rep = check_stationarity_skew(t, args.depth)
        pushed = (2 * t / 3 + t * t / 3) / 4
        print(f"{t},{rep.passed},{rep.worst or ''},{rep.worst_residual},{pushed},{t / 4}")


if __name__ == "__main__":
    main()
