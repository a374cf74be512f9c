#!/usr/bin/env python3
"""Run the randomized falsification harness against every extraction lemma
and print one line per lemma.

Example:
    python3 scripts/certify_lemmas.py --trials 5000 --seed 1 --archive out/
"""

import argparse
import sys

from rainbowlab.lemma_lab import LEMMA_NAMES, certify_lemma


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--archive", help="directory for counterexample records")
    args = parser.parse_args()

    failed = False
    for name in LEMMA_NAMES:
        report = certify_lemma(
            name, trials=args.trials, seed=args.seed, archive_dir=args.archive
        )
        status = "ok" if report.passed else f"FAILED ({report.failures} counterexamples)"
        print(f"{name:<28} {report.trials:>7} trials  "
              f"{report.elapsed_ms:>9.1f} ms  {status}")
        if not report.passed:
            failed = True
            if report.archive:
                print(f"  counterexample: {report.archive}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
