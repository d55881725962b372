"""JIT-compiled inner loops for the polytope HAR kernels.

Optional: importing this module requires numba.  Each ``run_*`` function
advances a chain by ``iters`` inner steps entirely inside compiled code; the
semantics match the reference kernels in :mod:`trophar.samplers` (the random
streams differ, since index selection is realized differently).
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _seg(u, v, rng):
    """Uniform draw from the tropical segment between canonical u and v."""
    e = u.size
    lo = v[0] - u[0]
    hi = lo
    for i in range(1, e):
        d = v[i] - u[i]
        if d < lo:
            lo = d
        if d > hi:
            hi = d
    if hi <= lo:
        return u.copy()
    ell = rng.uniform(lo, hi)
    out = np.empty(e)
    for i in range(e):
        a = ell + u[i]
        out[i] = a if a > v[i] else v[i]
    c = out[0]
    for i in range(e):
        out[i] -= c
    return out


@njit(cache=True)
def _proj_dist(V, x):
    """Tropical distance from x to its projection onto tconv(rows of V)."""
    s, e = V.shape
    proj = np.full(e, -np.inf)
    for l in range(s):
        lam = x[0] - V[l, 0]
        for i in range(1, e):
            t = x[i] - V[l, i]
            if t < lam:
                lam = t
        for i in range(e):
            t = lam + V[l, i]
            if t > proj[i]:
                proj[i] = t
    lo = proj[0] - x[0]
    hi = lo
    for i in range(1, e):
        d = proj[i] - x[i]
        if d < lo:
            lo = d
        if d > hi:
            hi = d
    return hi - lo


@njit(cache=True)
def run_vertex2(V, x0, iters, rng, walking):
    s = V.shape[0]
    x = x0.copy()
    anchor = x
    for _ in range(iters):
        i = rng.integers(0, s)
        j = rng.integers(0, s - 1)
        if j >= i:
            j += 1
        v = _seg(V[i], V[j], rng)
        x = _seg(anchor, v, rng)
        if walking:
            anchor = x
    return x


@njit(cache=True)
def run_vertexnu(V, x0, iters, nu, rng, walking):
    s = V.shape[0]
    x = x0.copy()
    anchor = x
    for _ in range(iters):
        idx = rng.permutation(s)
        v = _seg(V[idx[0]], V[idx[1]], rng)
        for k in range(2, nu):
            v = _seg(v, V[idx[k]], rng)
        x = _seg(anchor, v, rng)
        if walking:
            anchor = x
    return x


@njit(cache=True)
def run_extrapolation(V, x0, iters, rng):
    s, e = V.shape
    x = x0.copy()
    for _ in range(iters):
        i = rng.integers(0, s)
        proj = np.full(e, -np.inf)
        for l in range(s):
            if l == i:
                continue
            lam = x[0] - V[l, 0]
            for k in range(1, e):
                t = x[k] - V[l, k]
                if t < lam:
                    lam = t
            for k in range(e):
                t = lam + V[l, k]
                if t > proj[k]:
                    proj[k] = t
        c = proj[0]
        for k in range(e):
            proj[k] -= c
        x = _seg(V[i], proj, rng)
    return x


@njit(cache=True)
def run_extrapolation_subset(V, x0, iters, rng):
    s, e = V.shape
    x = x0.copy()
    mask = np.empty(s, np.bool_)
    for _ in range(iters):
        while True:
            ones = 0
            for l in range(s):
                bit = rng.integers(0, 2) == 1
                mask[l] = bit
                if bit:
                    ones += 1
            if 0 < ones < s:
                break
        a = np.full(e, -np.inf)
        b = np.full(e, -np.inf)
        for l in range(s):
            lam = x[0] - V[l, 0]
            for k in range(1, e):
                t = x[k] - V[l, k]
                if t < lam:
                    lam = t
            tgt = a if mask[l] else b
            for k in range(e):
                t = lam + V[l, k]
                if t > tgt[k]:
                    tgt[k] = t
        ca = a[0]
        cb = b[0]
        for k in range(e):
            a[k] -= ca
            b[k] -= cb
        x = _seg(a, b, rng)
    return x


@njit(cache=True)
def _ext_sample(V, a, b, d, tol, max_rejects, rng):
    """Rejection draw from the d-fold extension of segment (a, b) within V.

    Returns (point, rejects); rejects = -1 signals an exhausted cap.
    """
    e = a.size
    big = 0.0
    for i in range(e):
        t = abs(a[i] - b[i])
        if t > big:
            big = t
    if big <= 1e-15:
        return a.copy(), 0
    # second-largest / second-smallest distinct values of b - a locate the
    # break points adjacent to the endpoints
    mx = -np.inf
    mn = np.inf
    for i in range(e):
        t = b[i] - a[i]
        if t > mx:
            mx = t
        if t < mn:
            mn = t
    mx2 = -np.inf
    mn2 = np.inf
    for i in range(e):
        t = b[i] - a[i]
        if t < mx and t > mx2:
            mx2 = t
        if t > mn and t < mn2:
            mn2 = t
    bu = np.empty(e)
    bv = np.empty(e)
    for i in range(e):
        t = mx2 + a[i]
        bu[i] = t if t > b[i] else b[i]
        t = mn2 + a[i]
        bv[i] = t if t > b[i] else b[i]
    cu = bu[0]
    cv = bv[0]
    a2 = np.empty(e)
    b2 = np.empty(e)
    for i in range(e):
        a2[i] = (bu[i] - cu) + d * (a[i] - bu[i] + cu)
        b2[i] = (bv[i] - cv) + d * (b[i] - bv[i] + cv)
    ca = a2[0]
    cb = b2[0]
    lo = np.inf
    hi = -np.inf
    for i in range(e):
        a2[i] -= ca
        b2[i] -= cb
    for i in range(e):
        t = b2[i] - a2[i]
        if t < lo:
            lo = t
        if t > hi:
            hi = t
    x = np.empty(e)
    for attempt in range(max_rejects):
        ell = rng.uniform(lo, hi)
        for i in range(e):
            t = ell + a2[i]
            x[i] = t if t > b2[i] else b2[i]
        c = x[0]
        for i in range(e):
            x[i] -= c
        if _proj_dist(V, x) <= tol:
            return x.copy(), attempt
    return x, -1


@njit(cache=True)
def run_vertex_ext(V, x0, iters, d, tol, max_rejects, rng):
    """Returns (point, total rejected draws); -1 rejects flags a cap hit."""
    s = V.shape[0]
    x = x0.copy()
    total = 0
    for _ in range(iters):
        perm = rng.permutation(s)
        v = _seg(V[perm[0]], V[perm[1]], rng)
        for j in range(2, s):
            v, r = _ext_sample(V, v, V[perm[j]], d, tol, max_rejects, rng)
            if r < 0:
                return x, -1
            total += r
        x, r = _ext_sample(V, x, v, d, tol, max_rejects, rng)
        if r < 0:
            return x, -1
        total += r
    return x, total
