#!/usr/bin/env python3
"""How tight is Wasserstein stability on random monotone graph functions?

For each pair (f, g) on a random connected graph, report the ratio of the
barcode distance W_p to |f - g|_p; stability says every ratio is at most 1.

    python3 scripts/stability_sweep.py --trials 300 --seed 0
"""
import argparse
import math
import random
import statistics
import sys

from mergedist import elder_barcode, lp_function_distance, sublevel_merge_forest, wasserstein
from mergedist.filtration import random_monotone_pair

PS = (1.0, 2.0, math.inf)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-cells", type=int, default=12)
    args = ap.parse_args(argv)

    ratios = {p: [] for p in PS}
    rng = random.Random(args.seed)
    for _ in range(args.trials):
        X, f, g = random_monotone_pair(rng, args.max_cells)
        bm = elder_barcode(sublevel_merge_forest(X, f).single())
        bn = elder_barcode(sublevel_merge_forest(X, g).single())
        for p in PS:
            norm = lp_function_distance(f, g, p)
            if norm > 0:
                ratios[p].append(wasserstein(bm, bn, p)[0] / norm)
    for p, rs in ratios.items():
        print(
            f"p={p:g}: {len(rs)} pairs, ratio mean {statistics.mean(rs):.3f}, "
            f"max {max(rs):.3f}, violations {sum(r > 1 + 1e-12 for r in rs)}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
