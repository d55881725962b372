"""Run the ultrametric-space chain and tabulate tree topologies.

Samples equidistant trees on m leaves by hit-and-run over the space of
ultrametrics and prints the topology histogram, plus the Newick string of
the first few sampled trees.

Usage:
    python scripts/tree_topologies.py --m 4 --n 10000 --iterations 30
"""

import argparse
import json

import numpy as np

from trophar.samplers import ChainConfig
from trophar.ultrametrics import (har_ultrametric, n_pairs,
                                  topology_histogram, tree_from_ultrametric)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", type=int, default=4, help="number of leaves")
    parser.add_argument("--n", type=int, default=10_000)
    parser.add_argument("--iterations", type=int, default=30)
    parser.add_argument("--burn-in", type=int, default=0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--x0", help="JSON list, initial ultrametric")
    parser.add_argument("--show-trees", type=int, default=3,
                        help="print Newick for this many samples")
    args = parser.parse_args()

    if args.x0:
        x0 = np.array(json.loads(args.x0), dtype=float)
    else:
        x0 = np.full(n_pairs(args.m), 1.0)
    cfg = ChainConfig(iterations=args.iterations, burn_in=args.burn_in,
                      n_samples=args.n, seed=args.seed)
    result = har_ultrametric(x0, args.m, cfg)

    hist = topology_histogram(result.samples, args.m)
    total = sum(hist.values())
    print(f"{len(hist)} topologies over {total} samples "
          f"({result.elapsed:.1f}s):")
    for label, count in sorted(hist.items(), key=lambda kv: -kv[1]):
        print(f"  {count:7d}  {count / total:6.1%}  {label}")
    for row in result.samples[: args.show_trees]:
        print(tree_from_ultrametric(row, args.m).newick())


if __name__ == "__main__":
    main()
