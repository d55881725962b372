"""Tropical polytopes: projection, membership, regions, extrapolation, balls."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DimensionError, DomainError, canonicalize, trop_dist

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ProjectionResult:
    point: np.ndarray
    lambdas: np.ndarray
    distance: float


class TropicalPolytope:
    """Tropical convex hull of a finite vertex set, stored row-wise.

    Vertices are canonicalized on construction and the polytope is immutable
    afterwards; no minimality of the generating set is assumed.
    """

    def __init__(self, vertices):
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        if V.shape[0] < 1:
            raise DomainError("need at least one vertex")
        if V.shape[1] < 2:
            raise DimensionError("vertices must live in R^e with e >= 2")
        if not np.all(np.isfinite(V)):
            raise DomainError("vertex with non-finite coordinates")
        self.vertices = V - V[:, :1]
        self.vertices.setflags(write=False)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def __repr__(self):
        return f"TropicalPolytope(s={self.n_vertices}, e={self.dim})"

    def _check_point(self, x) -> np.ndarray:
        cx = canonicalize(x)
        if cx.size != self.dim:
            raise DimensionError(f"point has dimension {cx.size}, polytope {self.dim}")
        return cx

    def project(self, x) -> ProjectionResult:
        """Nearest-point map: lambda_l = min(x - v^l), point = max_l (lambda_l + v^l)."""
        cx = self._check_point(x)
        lams = (cx[None, :] - self.vertices).min(axis=1)
        point = canonicalize((lams[:, None] + self.vertices).max(axis=0))
        return ProjectionResult(point=point, lambdas=lams, distance=trop_dist(cx, point))

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        return self.project(x).distance <= tol

    def in_projection_region(self, j: int, x) -> bool:
        """Whether x sits in the region whose projection is pinned by coordinate j.

        True iff x_j <= x_k + min_l(v^l_j - v^l_k) for every k; all such x
        share the projection with coordinates max_l(v^l_i - v^l_j).
        Indices are 0-based.
        """
        if not 0 <= j < self.dim:
            raise DomainError(f"coordinate index {j} out of range for e={self.dim}")
        cx = self._check_point(x)
        bound = (self.vertices[:, j][:, None] - self.vertices).min(axis=0)
        return bool(np.all(cx[j] <= cx + bound + 1e-12))

    def region_point(self, j: int) -> np.ndarray:
        """The common projection of the j-th region, max_l(v^l_i - v^l_j)."""
        if not 0 <= j < self.dim:
            raise DomainError(f"coordinate index {j} out of range for e={self.dim}")
        return canonicalize((self.vertices - self.vertices[:, j][:, None]).max(axis=0))

    def project_excluding(self, i: int, x) -> np.ndarray:
        """Projection onto the hull without vertex i: the point extrapolated
        from v^i through x.  For x in the polytope the result stays inside and
        x lies on the segment between v^i and it.  0-based index."""
        if self.n_vertices < 2:
            raise DomainError("need at least two vertices to exclude one")
        if not 0 <= i < self.n_vertices:
            raise DomainError(f"vertex index {i} out of range for s={self.n_vertices}")
        cx = self._check_point(x)
        keep = np.ones(self.n_vertices, dtype=bool)
        keep[i] = False
        return self._project_masked(cx, keep)

    def project_subset(self, U, x):
        """Projections of x onto tconv(U) and tconv(complement of U).

        U is a nonempty proper collection of 0-based vertex indices; for x in
        the polytope, x lies on the tropical segment between the two results.
        """
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[list(U)] = True
        if not mask.any() or mask.all():
            raise DomainError("subset must be nonempty and proper")
        cx = self._check_point(x)
        return self._project_masked(cx, mask), self._project_masked(cx, ~mask)

    def _project_masked(self, cx: np.ndarray, mask: np.ndarray) -> np.ndarray:
        V = self.vertices[mask]
        lams = (cx[None, :] - V).min(axis=1)
        return canonicalize((lams[:, None] + V).max(axis=0))

    def bounding_box(self) -> np.ndarray:
        """Per-coordinate [min, max] over the canonical vertices, shape (e, 2).

        Every point of the polytope has canonical coordinates inside the box;
        coordinate 0 is degenerate at [0, 0].
        """
        return np.stack([self.vertices.min(axis=0), self.vertices.max(axis=0)], axis=1)

    def contains_batch(self, X, tol: float = DEFAULT_TOL) -> np.ndarray:
        """Vectorized membership for an (n, e) array of canonical points."""
        X = np.asarray(X, dtype=float)
        lams = (X[:, None, :] - self.vertices[None, :, :]).min(axis=2)
        proj = (lams[:, :, None] + self.vertices[None, :, :]).max(axis=1)
        diff = X - proj
        diff = diff - diff[:, :1]
        return (diff.max(axis=1) - diff.min(axis=1)) <= tol


@dataclass(frozen=True)
class TropicalBall:
    """Closed tropical ball {y : d_tr(center, y) <= radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", canonicalize(self.center))
        if self.radius <= 0:
            raise DomainError("radius must be positive")

    def contains(self, x) -> bool:
        return trop_dist(self.center, x) <= self.radius
