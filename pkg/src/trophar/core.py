"""Max-plus arithmetic, the tropical metric, and tropical line segments.

Points of the tropical projective torus R^e/R1 are plain 1-D float arrays kept
in canonical form: the first coordinate is pinned to zero.  All operations here
are pure and cheap enough to sit inside MCMC inner loops.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

EQ_TOL = 1e-12


class DimensionError(ValueError):
    """Point dimension below 2 or mismatched between operands."""


class DomainError(ValueError):
    """Input outside the operation's domain (non-finite, empty, ...)."""


def canonicalize(raw) -> np.ndarray:
    """Return the canonical representative of ``raw`` modulo R*1.

    Subtracts the first coordinate from every entry, so the result always
    starts with 0.  Idempotent.
    """
    x = np.asarray(raw, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise DimensionError(f"need a 1-D point with e >= 2, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DomainError("point has non-finite coordinates")
    return x - x[0]


def _check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise DimensionError(f"dimension mismatch: {x.shape} vs {y.shape}")


def points_equal(x, y, tol: float = EQ_TOL) -> bool:
    """Equality as classes of R^e/R1, compared in canonical form."""
    cx, cy = canonicalize(x), canonicalize(y)
    _check_same_dim(cx, cy)
    return bool(np.max(np.abs(cx - cy)) <= tol)


def trop_add(x, y) -> np.ndarray:
    """Tropical vector addition: coordinatewise max, canonicalized."""
    cx, cy = canonicalize(x), canonicalize(y)
    _check_same_dim(cx, cy)
    return canonicalize(np.maximum(cx, cy))


def trop_scale(a: float, x) -> np.ndarray:
    """Tropical scalar multiplication a + x; the identity on canonical forms."""
    if not np.isfinite(a):
        raise DomainError("scalar must be finite")
    return canonicalize(a + canonicalize(x))


def trop_lin_combo(lambdas, vertices) -> np.ndarray:
    """Tropical linear combination max_l (lambda_l + v^l), canonicalized."""
    lams = np.asarray(lambdas, dtype=float)
    if lams.size == 0:
        raise DomainError("empty vertex list")
    V = np.asarray([canonicalize(v) for v in vertices])
    if lams.size != V.shape[0]:
        raise DimensionError("one weight per vertex required")
    return canonicalize((lams[:, None] + V).max(axis=0))


def trop_dist(v, w) -> float:
    """Tropical metric: max(v - w) - min(v - w)."""
    cv, cw = canonicalize(v), canonicalize(w)
    _check_same_dim(cv, cw)
    d = cv - cw
    return float(d.max() - d.min())


def segment_point_at(u, v, ell: float, canonical: bool = True) -> np.ndarray:
    """The point (ell + u) max v of the tropical segment from v to u.

    ``ell`` must lie in [min(v - u), max(v - u)]; the lower end returns v and
    the upper end returns u.  With ``canonical=False`` the raw representative
    max(ell + u, v) is returned (used for ultrametric vectors, which carry
    meaningful absolute values).
    """
    cu = np.asarray(u, dtype=float)
    cv = np.asarray(v, dtype=float)
    _check_same_dim(cu, cv)
    d = cv - cu
    lo, hi = float(d.min()), float(d.max())
    if ell < lo - 1e-9 or ell > hi + 1e-9:
        raise DomainError(f"ell={ell} outside [{lo}, {hi}]")
    x = np.maximum(ell + cu, cv)
    return canonicalize(x) if canonical else x


def sample_segment(u, v, rng: np.random.Generator, canonical: bool = True) -> np.ndarray:
    """Draw a uniform point on the tropical segment between u and v.

    Uniform in the tropical metric: ell ~ U[min(v-u), max(v-u)], O(e) work.
    """
    cu = np.asarray(u, dtype=float)
    cv = np.asarray(v, dtype=float)
    _check_same_dim(cu, cv)
    d = cv - cu
    lo, hi = float(d.min()), float(d.max())
    ell = rng.uniform(lo, hi) if hi > lo else lo
    x = np.maximum(ell + cu, cv)
    return canonicalize(x) if canonical else x


@dataclass(frozen=True)
class TropicalSegment:
    """A tropical line segment with its break-point decomposition.

    ``breakpoints`` runs from v to u (inclusive) and has at most e - 2
    interior entries; consecutive entries differ by a vector whose nonzero
    coordinates share a single common value.
    """

    u: np.ndarray
    v: np.ndarray
    deltas: np.ndarray = field(repr=False)
    breakpoints: tuple = field(repr=False)
    ell_range: tuple = (0.0, 0.0)

    def __len__(self):
        return len(self.breakpoints)


def segment_breakpoints(u, v) -> TropicalSegment:
    """Compute the bend points of the segment from v to u.

    Bends occur exactly at the distinct values of v - u; coincident bends
    (ties in v - u) are merged.
    """
    cu, cv = canonicalize(u), canonicalize(v)
    _check_same_dim(cu, cv)
    d = cv - cu
    ells = np.unique(d)  # ascending, deduplicated
    pts = tuple(canonicalize(np.maximum(ell + cu, cv)) for ell in ells)
    return TropicalSegment(
        u=cu,
        v=cv,
        deltas=d,
        breakpoints=pts,
        ell_range=(float(d.min()), float(d.max())),
    )
