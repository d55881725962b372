"""Statistical checks used to verify the samplers at desk scale.

Independent of the chain kernels: the rejection oracle is uniform on the
polytope by construction and the goodness-of-fit tests come from scipy.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .core import DomainError
from .polytope import TropicalPolytope


class OracleInfeasibleError(RuntimeError):
    """Acceptance rate of the rejection oracle is too low to be usable."""


class DegenerateTestError(ValueError):
    """Fewer than two usable bins after merging."""


@dataclass
class DiagnosticsReport:
    test: str
    statistic: float
    p_value: float
    n: int = 0
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "test": self.test,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n": self.n,
            **self.details,
        }


def rejection_uniform(P: TropicalPolytope, n: int, rng: np.random.Generator,
                      tol: float = 1e-9, batch: int = 20000) -> tuple[np.ndarray, float]:
    """Brute-force uniform sample on a bounded tropical polytope.

    Draws canonical coordinates uniformly in the bounding box and keeps the
    points inside the polytope, so accepted points are exactly uniform.
    Returns (samples, acceptance_rate).  Raises OracleInfeasibleError when
    the acceptance rate stays below 1e-4 after 10^6 draws (e.g. for
    measure-zero regions such as bare segments).
    """
    box = P.bounding_box()
    lo, hi = box[:, 0], box[:, 1]
    kept: list[np.ndarray] = []
    total = accepted = 0
    while accepted < n:
        X = rng.uniform(lo, hi, size=(batch, P.dim))
        X[:, 0] = 0.0
        good = P.contains_batch(X, tol)
        kept.append(X[good])
        total += batch
        accepted += int(good.sum())
        if total >= 1_000_000 and accepted / total < 1e-4:
            raise OracleInfeasibleError(
                f"acceptance rate {accepted / total:.2e} after {total} draws"
            )
    samples = np.concatenate(kept)[:n] if n > 0 else np.empty((0, P.dim))
    rate = accepted / total if total else 0.0
    return samples, rate


def _binned_counts(A, B, bins, coord_pair, box):
    i, j = coord_pair
    edges_i = np.linspace(box[i, 0], box[i, 1], bins + 1)
    edges_j = np.linspace(box[j, 0], box[j, 1], bins + 1)
    ha, _, _ = np.histogram2d(A[:, i], A[:, j], bins=[edges_i, edges_j])
    hb, _, _ = np.histogram2d(B[:, i], B[:, j], bins=[edges_i, edges_j])
    return ha.ravel(), hb.ravel()


def chi_square_two_sample(A, B, bins: int = 20, coord_pair=(1, 2),
                          box=None) -> DiagnosticsReport:
    """Two-sample chi-square over a shared 2-D bin grid.

    Bins whose combined count is below 5 are pooled into one; the p-value is
    the chi-square upper tail with (usable bins - 1) degrees of freedom.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if len(A) == 0 or len(B) == 0:
        raise DomainError("both samples must be nonempty")
    if box is None:
        allpts = np.concatenate([A, B])
        box = np.stack([allpts.min(axis=0), allpts.max(axis=0)], axis=1)
    oa, ob = _binned_counts(A, B, bins, coord_pair, box)
    combined = oa + ob
    big = combined >= 5
    ca = np.append(oa[big], oa[~big].sum())
    cb = np.append(ob[big], ob[~big].sum())
    use = (ca + cb) > 0
    ca, cb = ca[use], cb[use]
    if ca.size < 2:
        raise DegenerateTestError("fewer than 2 usable bins")
    k1 = np.sqrt(len(B) / len(A))
    k2 = np.sqrt(len(A) / len(B))
    stat = float(np.sum((k1 * ca - k2 * cb) ** 2 / (ca + cb)))
    dof = ca.size - 1
    p = float(stats.chi2.sf(stat, dof))
    return DiagnosticsReport(
        test="chi_square_two_sample", statistic=stat, p_value=p,
        n=len(A) + len(B),
        details={"bins": int(ca.size), "dof": dof, "coord_pair": list(coord_pair)},
    )


def chi_square_pairwise(A, B, bins: int = 20) -> list[DiagnosticsReport]:
    """Chi-square over every pair of free canonical coordinates."""
    e = np.asarray(A).shape[1]
    out = []
    for i in range(1, e):
        for j in range(i + 1, e):
            out.append(chi_square_two_sample(A, B, bins=bins, coord_pair=(i, j)))
    return out


def ks_uniform(values, a: float, b: float) -> DiagnosticsReport:
    """One-sample Kolmogorov-Smirnov test against Uniform(a, b)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise DomainError("empty sample")
    if not a < b:
        raise DomainError("need a < b")
    stat, p = stats.kstest(values, "uniform", args=(a, b - a))
    return DiagnosticsReport(test="ks_uniform", statistic=float(stat),
                             p_value=float(p), n=values.size,
                             details={"a": a, "b": b})
