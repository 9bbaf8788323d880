"""Blown-up torus: orbit registry, invariant measures and fiber-bundle witness."""

import argparse
import math

from stationary_lab.torus import (
    BlowupSpace,
    Fiber,
    ProjLine,
    TorusPointReal,
    character_walk_average,
    check_orbit_measure_invariance,
    nonminimality_witness_batch,
    random_words,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--orbits", type=int, default=4)
    ap.add_argument("--words", type=int, default=200)
    ap.add_argument("--steps", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    space = BlowupSpace.first(args.orbits)
    print("orbit_id,size,denominator,epsilon,invariant,stays_in_fiber,bases_hit")
    for n, orb in enumerate(space.orbits):
        words = random_words(args.seed + n, args.words, args.steps)
        stayed, idx, _ = nonminimality_witness_batch(space, words, Fiber(n, orb.points[0], ProjLine(1, 0)))
        inv = check_orbit_measure_invariance(orb).passed
        print(f"{n},{len(orb)},{orb.denominator},{space.epsilon(n)},{inv},{stayed},{len(set(idx.tolist()))}")

    start = TorusPointReal(math.sqrt(2) - 1, math.sqrt(3) - 1)
    for char in [(1, 0), (0, 1), (1, 1)]:
        mod = character_walk_average(args.seed, 100_000, start, char)
        print(f"# character {char}: |average| = {mod:.4f}")


if __name__ == "__main__":
    main()
