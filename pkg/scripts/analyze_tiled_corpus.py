#!/usr/bin/env python3
"""Generate a random corpus of K4-tiled graphs and tabulate how the
deficiency value relates to the certificate kind the colourer produces.

Example:
    python3 scripts/analyze_tiled_corpus.py --size 2000 --seed 11
"""

import argparse
import random
import sys
from collections import Counter

from rainbowlab.tiled_k8 import colour_tiled, phi, random_tiled_graph


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-phi", type=int, default=7,
                        help="redraw graphs whose deficiency exceeds this")
    args = parser.parse_args()

    table: Counter = Counter()
    attempts = 0
    for index in range(args.size):
        rng = random.Random(f"corpus:{args.seed}:{index}")
        while True:
            attempts += 1
            g = random_tiled_graph(rng, steps=rng.randint(1, 6))
            f = phi(g)
            if f <= args.max_phi:
                break
        _, cert = colour_tiled(g)
        table[(f, cert.kind)] += 1

    kinds = ("no-rainbow", "triangle", "matching")
    print(f"{'phi':>4} " + "".join(f"{k:>12}" for k in kinds) + f"{'total':>8}")
    for f in range(args.max_phi + 1):
        row = [table.get((f, k), 0) for k in kinds]
        print(f"{f:>4} " + "".join(f"{c:>12}" for c in row) + f"{sum(row):>8}")
    totals = [sum(table.get((f, k), 0) for f in range(args.max_phi + 1)) for k in kinds]
    print(f"{'all':>4} " + "".join(f"{c:>12}" for c in totals) + f"{args.size:>8}")
    print(f"\n{attempts} draws for {args.size} graphs "
          f"({attempts / args.size:.2f} per kept graph)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
