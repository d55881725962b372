"""Ultrametrics as a tropically convex set: tests, UPGMA, trees, HAR sampler.

A dissimilarity map on m leaves is a length C(m, 2) vector of positive reals
indexed by pairs (i, j), i < j, in lexicographic order (0-based leaf labels
internally, 1-based in printed labels).
"""

from __future__ import annotations

import itertools
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .core import DomainError
from .samplers import ChainConfig, ChainResult


def n_pairs(m: int) -> int:
    return m * (m - 1) // 2


def leaf_count(e: int) -> int:
    """Invert e = C(m, 2)."""
    m = int(round((1 + np.sqrt(1 + 8 * e)) / 2))
    if n_pairs(m) != e:
        raise DomainError(f"{e} is not a binomial coefficient C(m, 2)")
    return m


def pair_index(i: int, j: int, m: int) -> int:
    """Lexicographic index of pair (i, j), i < j, 0-based."""
    if not 0 <= i < j < m:
        raise DomainError(f"bad pair ({i}, {j}) for m={m}")
    return i * (2 * m - i - 1) // 2 + (j - i - 1)


def pairs(m: int):
    return list(itertools.combinations(range(m), 2))


def to_matrix(values, m: int) -> np.ndarray:
    """Condensed pair vector to a symmetric (m, m) matrix with zero diagonal."""
    v = np.asarray(values, dtype=float)
    if v.size != n_pairs(m):
        raise DomainError(f"expected {n_pairs(m)} entries for m={m}, got {v.size}")
    M = np.zeros((m, m))
    k = 0
    for i in range(m - 1):
        M[i, i + 1:] = v[k:k + m - 1 - i]
        k += m - 1 - i
    return M + M.T


def from_matrix(M: np.ndarray) -> np.ndarray:
    m = M.shape[0]
    return np.concatenate([M[i, i + 1:] for i in range(m - 1)])


def _triple_indices(m: int):
    ij, ik, jk = [], [], []
    for i, j, k in itertools.combinations(range(m), 3):
        ij.append(pair_index(i, j, m))
        ik.append(pair_index(i, k, m))
        jk.append(pair_index(j, k, m))
    return np.array(ij), np.array(ik), np.array(jk)


_TRIPLE_CACHE: dict = {}


def is_ultrametric(values, m: int, tol: float = 1e-9) -> bool:
    """Three-point condition: in every triple the maximum is achieved at
    least twice (the two largest values agree within tol)."""
    v = np.asarray(values, dtype=float)
    if v.size != n_pairs(m):
        raise DomainError(f"expected {n_pairs(m)} entries for m={m}")
    if m < 3:
        return True
    if m not in _TRIPLE_CACHE:
        _TRIPLE_CACHE[m] = _triple_indices(m)
    ij, ik, jk = _TRIPLE_CACHE[m]
    t = np.sort(np.stack([v[ij], v[ik], v[jk]], axis=1), axis=1)
    return bool(np.all(t[:, 2] - t[:, 1] <= tol))


@dataclass
class TreeNode:
    """Node of an equidistant tree; ``height`` is the distance down to any
    descendant leaf, so leaf-pair distance = 2 * height of the LCA."""

    height: float
    leaf: int | None = None
    children: list = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return self.leaf is not None


@dataclass
class EquidistantTree:
    root: TreeNode
    m: int

    @property
    def height(self) -> float:
        return self.root.height

    def pairwise_distances(self) -> np.ndarray:
        """Condensed ultrametric vector recovered from the tree."""
        out = np.zeros(n_pairs(self.m))

        def walk(node):
            if node.is_leaf:
                return [node.leaf]
            groups = [walk(c) for c in node.children]
            for a, b in itertools.combinations(range(len(groups)), 2):
                for i in groups[a]:
                    for j in groups[b]:
                        out[pair_index(min(i, j), max(i, j), self.m)] = 2 * node.height
            return [i for g in groups for i in g]

        walk(self.root)
        return out

    def newick(self, digits: int = 6) -> str:
        """Newick string with branch lengths (parent height - child height)."""

        def fmt(node, parent_height):
            if node.is_leaf:
                body = str(node.leaf + 1)
            else:
                body = "(" + ",".join(fmt(c, node.height) for c in node.children) + ")"
            if parent_height is None:
                return body
            return f"{body}:{parent_height - node.height:.{digits}f}"

        return fmt(self.root, None) + ";"


def upgma(values, m: int):
    """Average-linkage agglomeration of a dissimilarity map.

    Returns (ultrametric vector, EquidistantTree).  Cluster pairs at the
    current minimum are merged smallest-index-pair first, so the output is
    deterministic.  Ultrametric inputs are reproduced exactly (up to float
    averaging noise) and the output always satisfies the three-point
    condition.
    """
    if m < 2:
        raise DomainError("need at least two leaves")
    D = to_matrix(values, m).astype(float)
    active = list(range(m))
    nodes = [TreeNode(height=0.0, leaf=i) for i in range(m)]
    sizes = np.ones(m)
    members = [[i] for i in range(m)]
    out = np.zeros(n_pairs(m))
    work = D.copy()
    np.fill_diagonal(work, np.inf)
    while len(active) > 1:
        sub = work[np.ix_(active, active)]
        flat = np.argmin(sub)
        a, b = divmod(flat, len(active))
        if a > b:
            a, b = b, a
        ca, cb = active[a], active[b]
        h = sub[a, b]
        for i in members[ca]:
            for j in members[cb]:
                out[pair_index(min(i, j), max(i, j), m)] = h
        # weighted average keeps cluster-to-cluster distances equal to the
        # mean over member pairs
        na, nb = sizes[ca], sizes[cb]
        merged = TreeNode(height=h / 2.0, children=[nodes[ca], nodes[cb]])
        for c in active:
            if c in (ca, cb):
                continue
            val = (na * work[ca, c] + nb * work[cb, c]) / (na + nb)
            work[ca, c] = work[c, ca] = val
        sizes[ca] = na + nb
        members[ca] = members[ca] + members[cb]
        nodes[ca] = merged
        work[cb, :] = np.inf
        work[:, cb] = np.inf
        active.pop(b)
    return out, EquidistantTree(root=nodes[active[0]], m=m)


def _upgma_heights(work: np.ndarray, m: int) -> np.ndarray:
    """Average-linkage merge heights as a full (m, m) matrix.

    Same merge order and tie-breaking as upgma(); kept free of Python object
    allocation so it can be JIT-compiled for the sampler's inner loop.
    """
    sizes = np.ones(m)
    labels = np.arange(m)
    alive = np.ones(m, dtype=np.bool_)
    H = np.zeros((m, m))
    for _ in range(m - 1):
        best = np.inf
        ca = -1
        cb = -1
        for i in range(m):
            if alive[i]:
                for j in range(i + 1, m):
                    if alive[j] and work[i, j] < best:
                        best = work[i, j]
                        ca = i
                        cb = j
        for p in range(m):
            if labels[p] == ca:
                for q in range(m):
                    if labels[q] == cb:
                        H[p, q] = best
                        H[q, p] = best
        na = sizes[ca]
        nb = sizes[cb]
        for c in range(m):
            if alive[c] and c != ca and c != cb:
                val = (na * work[ca, c] + nb * work[cb, c]) / (na + nb)
                work[ca, c] = val
                work[c, ca] = val
        sizes[ca] = na + nb
        alive[cb] = False
        for p in range(m):
            if labels[p] == cb:
                labels[p] = ca
    return H


try:
    from numba import njit

    _upgma_heights = njit(cache=True)(_upgma_heights)
except ImportError:  # pragma: no cover - numba is an optional speedup
    pass


def upgma_vector(values, m: int) -> np.ndarray:
    """UPGMA projection returning only the ultrametric vector."""
    work = to_matrix(values, m)
    np.fill_diagonal(work, np.inf)
    return from_matrix(_upgma_heights(work, m))


def tree_from_ultrametric(values, m: int, tol: float = 1e-9) -> EquidistantTree:
    """Reconstruct the equidistant tree realizing an ultrametric.

    On ultrametric input all linkage rules coincide; root height is
    max(values) / 2 and leaf-pair distances reproduce the input within tol.
    """
    if not is_ultrametric(values, m, tol):
        raise DomainError("input violates the three-point condition")
    return upgma(values, m)[1]


def _collapse_label(node: TreeNode, tie_tol: float):
    if node.is_leaf:
        return str(node.leaf + 1)
    # splice children of internal nodes merging at (numerically) the same
    # height into a single multifurcation
    parts = []
    stack = list(node.children)
    while stack:
        c = stack.pop()
        if not c.is_leaf and node.height - c.height <= tie_tol:
            stack.extend(c.children)
        else:
            parts.append(_collapse_label(c, tie_tol))
    return "(" + ",".join(sorted(parts)) + ")"


def topology_of(values, m: int, tie_tol: float = 1e-8) -> str:
    """Canonical label of the unranked leaf-labeled tree shape.

    Invariant under child order; merges within tie_tol collapse to
    multifurcations.
    """
    tree = tree_from_ultrametric(values, m, tol=max(tie_tol, 1e-9))
    return _collapse_label(tree.root, tie_tol)


def topology_histogram(samples, m: int, tie_tol: float = 1e-8) -> Counter:
    """Counts per topology label over a sequence of ultrametric vectors."""
    return Counter(topology_of(u, m, tie_tol) for u in samples)


def har_ultrametric_step(x: np.ndarray, m: int, rng, cfg: ChainConfig,
                         hi: float | None = None) -> np.ndarray:
    """One inner step of the tree-space sampler.

    Draws a direction with coordinates uniform on [0, hi] (hi defaults to
    max(x), but chains fix it at max of the initial point so the raw vectors
    drift only additively), moves to y = x + scale * D, projects y back via
    UPGMA and samples uniformly on the tropical segment from x to the
    projection.  O(m^2) per step.
    """
    if hi is None:
        hi = x.max()
    y = x + cfg.direction_scale * rng.uniform(0.0, hi, size=x.size)
    p = upgma_vector(y, m)
    d = p - x
    lo, up = d.min(), d.max()
    if up <= lo:
        return x
    return np.maximum(rng.uniform(lo, up) + x, p)


def har_ultrametric(x0, m: int, config: ChainConfig,
                    rng: np.random.Generator | None = None) -> ChainResult:
    """HAR chain over the space of ultrametrics on m leaves.

    Emissions are raw (non-normalized) distance vectors; every emission
    satisfies the three-point condition because tropical segments between
    ultrametrics stay ultrametric.
    """
    x = np.asarray(x0, dtype=float).copy()
    if x.size != n_pairs(m):
        raise DomainError(f"expected {n_pairs(m)} entries for m={m}")
    if not is_ultrametric(x, m, config.tol):
        raise DomainError("initial point is not an ultrametric")
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    hi0 = float(x.max())
    out = np.empty((config.n_samples, x.size))
    t0 = time.perf_counter()
    for _ in range(config.burn_in):
        for _ in range(config.iterations):
            x = har_ultrametric_step(x, m, rng, config, hi0)
    for k in range(config.n_samples):
        for _ in range(config.iterations):
            x = har_ultrametric_step(x, m, rng, config, hi0)
        out[k] = x
    return ChainResult(samples=out, accepted=config.n_samples,
                       proposed=config.n_samples,
                       elapsed=time.perf_counter() - t0, config=config)
