"""Sweep the spread parameter of a location-scale target on a polytope.

For each sigma, run the Metropolis-filtered chain around a fixed center and
report the mean tropical distance of the output from the center and the
acceptance rate.  The mean distance should grow monotonically with sigma and
the acceptance rate should approach 1 as the target flattens.

Usage:
    python scripts/dispersion_sweep.py --sigmas 0.05 0.5 2 30
"""

import argparse
import json

import numpy as np

from trophar.core import trop_dist
from trophar.polytope import TropicalPolytope
from trophar.samplers import ChainConfig, TargetDensity, mh_filter

DEFAULT_VERTICES = [[0, 0, 0, 0], [0, 1, 3, 1], [0, 1, 2, 5], [0, 2, 5, 10]]
DEFAULT_MU = [0.0, 0.5, 2.0, 6.0]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sigmas", type=float, nargs="+",
                        default=[0.05, 0.5, 2.0, 30.0])
    parser.add_argument("--n", type=int, default=2_000)
    parser.add_argument("--iterations", type=int, default=20)
    parser.add_argument("--burn-in", type=int, default=200)
    parser.add_argument("--kernel", default="extrapolation")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--mu", help="JSON list, center of the target")
    parser.add_argument("--vertices", help="JSON list of polytope vertices")
    args = parser.parse_args()

    verts = json.loads(args.vertices) if args.vertices else DEFAULT_VERTICES
    mu = np.array(json.loads(args.mu) if args.mu else DEFAULT_MU, dtype=float)
    P = TropicalPolytope(verts)

    print(f"{'sigma':>8s} {'mean d_tr':>10s} {'accept':>8s} {'time':>7s}")
    for i, sigma in enumerate(args.sigmas):
        cfg = ChainConfig(iterations=args.iterations, burn_in=args.burn_in,
                          n_samples=args.n, seed=args.seed + i)
        target = TargetDensity(mu=mu, sigma_tr=sigma)
        result = mh_filter(P, args.kernel, target, cfg)
        mean_d = np.mean([trop_dist(mu, s) for s in result.samples])
        acc = result.accepted / max(result.proposed, 1)
        print(f"{sigma:8.3g} {mean_d:10.4f} {acc:8.3f} "
              f"{result.elapsed:6.1f}s")


if __name__ == "__main__":
    main()
