"""Hit-and-run chain kernels over tropical polytopes, plus MH filtering.

Every kernel emits one point per ``iterations`` inner decorrelation steps and
keeps the chain inside the polytope.  Kernels are plain functions
``kernel(P, x, rng, config) -> next point``; ``run_chain`` adds burn-in,
sample collection, and timing on top.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .core import DomainError, canonicalize
from .polytope import TropicalPolytope


class MixingError(RuntimeError):
    """Rejection cap exhausted inside one inner step; carries diagnostics."""

    def __init__(self, message, rejects=0, step=0):
        super().__init__(message)
        self.rejects = rejects
        self.step = step


@dataclass
class ChainConfig:
    """Run parameters shared by all kernels.

    ``iterations`` is the inner decorrelation count per emitted sample;
    ``extension_scale`` multiplies the endpoint-to-breakpoint difference in
    the segment extension; ``anchor`` selects whether the final segment of
    the vertex kernels is drawn from the walking chain position (default) or
    from the position fixed at the start of the emission.
    """

    iterations: int = 30
    burn_in: int = 0
    n_samples: int = 1
    seed: int = 0
    tol: float = 1e-9
    max_rejects: int = 1000
    extension_scale: float = 4.0
    nu: int = 2
    anchor: str = "walking"
    direction_scale: float = 1.0

    def __post_init__(self):
        if self.iterations < 1:
            raise DomainError("iterations must be >= 1")
        if self.extension_scale <= 1.0:
            raise DomainError("extension_scale must be > 1")
        if self.anchor not in ("walking", "fixed"):
            raise DomainError(f"unknown anchor mode {self.anchor!r}")


@dataclass
class ChainResult:
    samples: np.ndarray
    accepted: int = 0
    proposed: int = 0
    rejected_segments: int = 0
    elapsed: float = 0.0
    config: ChainConfig | None = None


@dataclass(frozen=True)
class TargetDensity:
    """Unnormalized target exp(-d_tr(mu, x)^p / sigma_tr), p = 1 or 2."""

    mu: np.ndarray
    sigma_tr: float
    kind: str = "squared"

    def __post_init__(self):
        object.__setattr__(self, "mu", canonicalize(self.mu))
        if self.sigma_tr <= 0:
            raise DomainError("sigma_tr must be positive")
        if self.kind not in ("linear", "squared"):
            raise DomainError(f"unknown density kind {self.kind!r}")

    def log_density(self, x) -> float:
        d = np.asarray(x, dtype=float) - self.mu
        dtr = (d.max() - d.min())
        if self.kind == "linear":
            return -dtr / self.sigma_tr
        return -dtr * dtr / self.sigma_tr


def _seg_sample(u, v, rng):
    # uniform point on the tropical segment, canonical output
    d = v - u
    lo = d.min()
    hi = d.max()
    if hi <= lo:
        return u
    x = np.maximum(rng.uniform(lo, hi) + u, v)
    return x - x[0]


def extend_segment(u, v, d: float):
    """Extend a segment past both endpoints without adding break points.

    With b_u, b_v the break points adjacent to u and v (the opposite endpoint
    when there is no interior break), returns
    u' = b_u + d*(u - b_u), v' = b_v + d*(v - b_v); d = 1 is the identity.
    """
    cu, cv = canonicalize(u), canonicalize(v)
    if d <= 0:
        raise DomainError("extension multiplier must be positive")
    diff = cv - cu
    vals = np.unique(diff)
    if vals.size == 1:
        raise DomainError("cannot extend a degenerate (single-point) segment")
    # bend adjacent to u sits at the second-largest distinct value of v - u,
    # the one adjacent to v at the second-smallest
    b_u = np.maximum(vals[-2] + cu, cv)
    b_u = b_u - b_u[0]
    b_v = np.maximum(vals[1] + cu, cv)
    b_v = b_v - b_v[0]
    u2 = b_u + d * (cu - b_u)
    v2 = b_v + d * (cv - b_v)
    return canonicalize(u2), canonicalize(v2)


def _sample_extended_within(P, a, b, rng, cfg, counters):
    """Draw from the extension of segment (a, b), rejecting points outside P."""
    if np.max(np.abs(a - b)) <= 1e-15:
        return a
    a2, b2 = extend_segment(a, b, cfg.extension_scale)
    diff = b2 - a2
    lo = diff.min()
    hi = diff.max()
    for attempt in range(cfg.max_rejects):
        x = np.maximum(rng.uniform(lo, hi) + a2, b2)
        x = x - x[0]
        lams = (x[None, :] - P.vertices).min(axis=1)
        proj = (lams[:, None] + P.vertices).max(axis=0)
        pd = proj - x
        if pd.max() - pd.min() <= cfg.tol:
            counters["rejected_segments"] += attempt
            return x
    raise MixingError(
        f"rejection cap {cfg.max_rejects} exceeded on an extended segment",
        rejects=cfg.max_rejects,
    )


def har_vertex_pair(P: TropicalPolytope, x, rng, cfg: ChainConfig):
    """Vertex HAR with two random vertices per step (nu = 2)."""
    V = P.vertices
    s = V.shape[0]
    anchor = x
    for _ in range(cfg.iterations):
        if s >= 2:
            i, j = rng.choice(s, size=2, replace=False)
            v = _seg_sample(V[i], V[j], rng)
        else:
            v = V[0]
        x = _seg_sample(anchor, v, rng)
        if cfg.anchor == "walking":
            anchor = x
    return x


def har_vertex_nu(P: TropicalPolytope, x, rng, cfg: ChainConfig):
    """Vertex HAR chaining segments across nu randomly chosen vertices."""
    V = P.vertices
    s = V.shape[0]
    nu = cfg.nu
    if not 2 <= nu <= s:
        raise DomainError(f"nu={nu} outside [2, s={s}]")
    anchor = x
    for _ in range(cfg.iterations):
        idx = rng.choice(s, size=nu, replace=False)
        v = _seg_sample(V[idx[0]], V[idx[1]], rng)
        for i in idx[2:]:
            v = _seg_sample(v, V[i], rng)
        x = _seg_sample(anchor, v, rng)
        if cfg.anchor == "walking":
            anchor = x
    return x


def har_vertex_extended(P: TropicalPolytope, x, rng, cfg: ChainConfig, _counters=None):
    """Vertex HAR over the permuted vertex list with segment extension.

    Intermediate and final segments are extended before drawing; draws
    falling outside the polytope are rejected and retried, so emissions stay
    inside.  Warning: mixing degrades when s > e.
    """
    V = P.vertices
    s = V.shape[0]
    counters = _counters if _counters is not None else {"rejected_segments": 0}
    if s < 2:
        return V[0]
    for _ in range(cfg.iterations):
        perm = rng.permutation(s)
        v = _seg_sample(V[perm[0]], V[perm[1]], rng)
        for j in range(2, s):
            v = _sample_extended_within(P, v, V[perm[j]], rng, cfg, counters)
        x = _sample_extended_within(P, x, v, rng, cfg, counters)
    return x


def har_extrapolation(P: TropicalPolytope, x, rng, cfg: ChainConfig):
    """HAR along the segment from a random vertex through the current point.

    Each step projects x onto the hull without vertex i and samples the
    segment from v^i to that projection; both endpoints lie in the polytope,
    so no rejection is needed.  Uniform on full-dimensional polytropes.
    """
    V = P.vertices
    s = V.shape[0]
    if s < 2:
        return V[0]
    for _ in range(cfg.iterations):
        i = rng.integers(s)
        lams = (x[None, :] - V).min(axis=1)
        keep = np.ones(s, dtype=bool)
        keep[i] = False
        proj = (lams[keep, None] + V[keep]).max(axis=0)
        proj = proj - proj[0]
        x = _seg_sample(V[i], proj, rng)
    return x


def har_extrapolation_subset(P: TropicalPolytope, x, rng, cfg: ChainConfig):
    """HAR along the segment between projections onto a random vertex split.

    The split {U, complement} is unordered and every split is equally likely
    (probability 2 / (2^s - 2)): s fair bits, all-zero/all-one rejected.
    """
    V = P.vertices
    s = V.shape[0]
    if s < 2:
        return V[0]
    for _ in range(cfg.iterations):
        while True:
            mask = rng.integers(0, 2, size=s).astype(bool)
            if mask.any() and not mask.all():
                break
        lams = (x[None, :] - V).min(axis=1)
        a = (lams[mask, None] + V[mask]).max(axis=0)
        b = (lams[~mask, None] + V[~mask]).max(axis=0)
        x = _seg_sample(a - a[0], b - b[0], rng)
    return x


KERNELS = {
    "vertex2": har_vertex_pair,
    "vertexnu": har_vertex_nu,
    "vertex-ext": har_vertex_extended,
    "extrapolation": har_extrapolation,
    "extrapolation-subset": har_extrapolation_subset,
}

try:
    from . import _fast
except ImportError:  # pragma: no cover - numba is an optional speedup
    _fast = None


def _fast_step(step, P, x, rng, cfg, counters):
    """Compiled equivalent of one kernel emission, or None if unavailable."""
    if _fast is None:
        return None
    V = P.vertices
    if V.shape[0] < 2:
        return None
    if step is har_vertex_pair:
        return _fast.run_vertex2(V, x, cfg.iterations, rng,
                                 cfg.anchor == "walking")
    if step is har_vertex_nu:
        if not 2 <= cfg.nu <= V.shape[0]:
            raise DomainError(f"nu={cfg.nu} outside [2, s={V.shape[0]}]")
        return _fast.run_vertexnu(V, x, cfg.iterations, cfg.nu, rng,
                                  cfg.anchor == "walking")
    if step is har_extrapolation:
        return _fast.run_extrapolation(V, x, cfg.iterations, rng)
    if step is har_extrapolation_subset:
        return _fast.run_extrapolation_subset(V, x, cfg.iterations, rng)
    if step is har_vertex_extended:
        x_new, rejects = _fast.run_vertex_ext(
            V, x, cfg.iterations, cfg.extension_scale, cfg.tol,
            cfg.max_rejects, rng)
        if rejects < 0:
            raise MixingError(
                f"rejection cap {cfg.max_rejects} exceeded on an extended "
                "segment", rejects=cfg.max_rejects)
        counters["rejected_segments"] += rejects
        return x_new
    return None


def resolve_kernel(kernel):
    if callable(kernel):
        return kernel
    try:
        return KERNELS[kernel]
    except KeyError:
        raise DomainError(
            f"unknown kernel {kernel!r}; choose from {sorted(KERNELS)}"
        ) from None


def run_chain(kernel, P: TropicalPolytope, x0, config: ChainConfig,
              rng: np.random.Generator | None = None) -> ChainResult:
    """Run one chain: burn-in, then collect ``n_samples`` emissions.

    Deterministic for a fixed seed.  The starting point must lie in the
    polytope (within ``config.tol``).
    """
    step = resolve_kernel(kernel)
    x = canonicalize(x0)
    if not P.contains(x, max(config.tol, 1e-9)):
        raise DomainError("initial point is not in the polytope")
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    counters = {"rejected_segments": 0}
    kwargs = {"_counters": counters} if step is har_vertex_extended else {}

    def advance(x):
        x_new = _fast_step(step, P, x, rng, config, counters)
        if x_new is None:
            x_new = step(P, x, rng, config, **kwargs)
        return x_new

    out = np.empty((config.n_samples, P.dim))
    t0 = time.perf_counter()
    for _ in range(config.burn_in):
        x = advance(x)
    for k in range(config.n_samples):
        x = advance(x)
        out[k] = x
    return ChainResult(
        samples=out,
        accepted=config.n_samples,
        proposed=config.n_samples,
        rejected_segments=counters["rejected_segments"],
        elapsed=time.perf_counter() - t0,
        config=config,
    )


def mh_filter(P: TropicalPolytope, base_kernel, target: TargetDensity,
              config: ChainConfig, rng: np.random.Generator | None = None,
              x0=None) -> ChainResult:
    """Metropolis-Hastings filtering of a symmetric-proposal HAR kernel.

    Proposals are full kernel emissions from the current state; acceptance is
    r = min(1, f(x*) / f(x)) computed in log space.  By default the chain
    starts at the density mode ``target.mu`` and a sample is recorded on
    every acceptance.
    """
    step = resolve_kernel(base_kernel)
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    x = canonicalize(x0) if x0 is not None else target.mu.copy()
    if not P.contains(x, max(config.tol, 1e-9)):
        raise DomainError("starting point (mu) is not in the polytope")
    log_f = target.log_density(x)
    out = np.empty((config.n_samples, P.dim))
    accepted = proposed = 0
    emitted = 0
    counters = {"rejected_segments": 0}
    t0 = time.perf_counter()
    while emitted < config.n_samples:
        x_star = _fast_step(step, P, x, rng, config, counters)
        if x_star is None:
            x_star = step(P, x, rng, config)
        proposed += 1
        log_f_star = target.log_density(x_star)
        log_r = min(0.0, log_f_star - log_f)
        if log_r >= 0.0 or rng.uniform() < np.exp(log_r):
            x = x_star
            log_f = log_f_star
            accepted += 1
            out[emitted] = x
            emitted += 1
    return ChainResult(
        samples=out,
        accepted=accepted,
        proposed=proposed,
        elapsed=time.perf_counter() - t0,
        config=config,
    )


def spawn_config(config: ChainConfig, chain_index: int) -> ChainConfig:
    """Derive an independent per-chain config: seed = (seed, chain_index)
    via the SeedSequence spawning rule."""
    child = np.random.SeedSequence(config.seed).spawn(chain_index + 1)[chain_index]
    return replace(config, seed=int(child.generate_state(1)[0]))
