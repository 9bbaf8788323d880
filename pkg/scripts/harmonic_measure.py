"""Empirical exit law of the simple random walk against cylinder masses, by depth."""

import argparse

from stationary_lab.walk import cylinder_z_scores, empirical_cylinder_freq


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--walks", type=int, default=10_000)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--max-depth", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("depth,cylinders,stabilized,max_abs_z")
    for depth in range(1, args.max_depth + 1):
        freq, total = empirical_cylinder_freq(args.walks, args.n, depth, first_seed=args.seed)
        worst = max(abs(v) for v in cylinder_z_scores(freq, total).values())
        print(f"{depth},{len(freq)},{total},{worst:.2f}")


if __name__ == "__main__":
    main()
