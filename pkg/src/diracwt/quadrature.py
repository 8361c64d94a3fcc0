"""Quadrature helpers: batched adaptive Simpson, Gauss rules with optional
inverse-square-root endpoint weighting, and the epsilon-ladder extrapolation.

Integrands are supplied as batch evaluators: ``f(xs)`` takes a 1-D array of
points and returns an array whose leading axis matches ``xs`` (trailing axes
arbitrary).  The adaptive driver keeps a worklist of panels and evaluates
whole refinement levels in one batched call, so the per-point cost is the
evaluator's, not Python's.
"""

from __future__ import annotations

import numpy as np
from scipy.special import roots_jacobi

from .errors import NonConvergence, QuadratureError


def gauss_legendre(n: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def gauss_sqrt_singular(n: int, a: float, b: float, singular_end: str):
    """Nodes/weights for integrands with a (x-a)^(-1/2) or (b-x)^(-1/2) factor.

    Gauss-Jacobi rule with exponent -1/2 at the singular end; the returned
    weights absorb the singular factor, i.e. sum(w * g(x)) approximates the
    integral of g(x) / sqrt(x - a) (resp. / sqrt(b - x)).  Apply it to
    g = f * sqrt(distance-to-end) to integrate a singular f.
    """
    if singular_end == "left":
        xj, wj = roots_jacobi(n, 0.0, -0.5)  # weight (1+t)^(-1/2)
    elif singular_end == "right":
        xj, wj = roots_jacobi(n, -0.5, 0.0)  # weight (1-t)^(-1/2)
    else:
        raise ValueError("singular_end must be 'left' or 'right'")
    half = 0.5 * (b - a)
    x = half * xj + 0.5 * (a + b)
    # x - a = half*(1+t), dx = half dt  =>  overall factor half^(1/2).
    return x, wj * np.sqrt(half)


def adaptive_simpson_panels(fbatch, edges, tol: float = 1e-8, max_depth: int = 28):
    """Per-panel adaptive Simpson integrals.

    edges: sorted 1-D array; panel i is [edges[i], edges[i+1]].  Returns an
    array of shape (len(edges)-1, *value_shape) with one integral per panel,
    each refined independently to the absolute tolerance with one Richardson
    correction.  Raises QuadratureError when a panel hits the depth cap.
    """
    edges = np.asarray(edges, dtype=np.float64)
    n = edges.size - 1
    if n < 1:
        raise ValueError("need at least one panel")
    a = edges[:-1].copy()
    b = edges[1:].copy()
    nodes = np.concatenate([edges, 0.5 * (a + b)])
    vals = np.asarray(fbatch(nodes))
    vshape = vals.shape[1:]
    fa = vals[:n]
    fb = vals[1 : n + 1]
    fm = vals[n + 1 :]
    out = np.zeros((n,) + vshape, dtype=np.complex128)
    owner = np.arange(n)
    tols = np.full(n, float(tol))
    s_whole = ((b - a) / 6.0).reshape((-1,) + (1,) * len(vshape)) * (fa + 4.0 * fm + fb)
    depth = 0
    while a.size:
        if depth > max_depth:
            raise QuadratureError(f"adaptive Simpson: depth cap {max_depth} exceeded on {a.size} panels")
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        fv = np.asarray(fbatch(np.concatenate([lm, rm])))
        flm = fv[: a.size]
        frm = fv[a.size :]
        h6 = ((m - a) / 6.0).reshape((-1,) + (1,) * len(vshape))
        s_left = h6 * (fa + 4.0 * flm + fm)
        s_right = h6 * (fm + 4.0 * frm + fb)
        s2 = s_left + s_right
        err = np.abs(s2 - s_whole).reshape(a.size, -1).max(axis=1)
        done = err <= 15.0 * tols
        if done.any():
            corr = s2[done] + (s2[done] - s_whole[done]) / 15.0
            np.add.at(out, owner[done], corr)
        keep = ~done
        if not keep.any():
            break
        # Split surviving panels; each half inherits half the tolerance.
        a = np.concatenate([a[keep], m[keep]])
        b = np.concatenate([m[keep], b[keep]])
        fa = np.concatenate([fa[keep], fm[keep]])
        fb = np.concatenate([fm[keep], fb[keep]])
        fm = np.concatenate([flm[keep], frm[keep]])
        s_whole = np.concatenate([s_left[keep], s_right[keep]])
        owner = np.concatenate([owner[keep], owner[keep]])
        tols = np.concatenate([0.5 * tols[keep], 0.5 * tols[keep]])
        depth += 1
    return out


def adaptive_simpson(fbatch, a: float, b: float, tol: float = 1e-8, breaks=(), max_depth: int = 28):
    """Adaptive Simpson over [a, b] with mandatory interior panel boundaries."""
    pts = [a, b] + [float(c) for c in breaks if a < float(c) < b]
    edges = np.unique(np.asarray(pts, dtype=float))
    panels = adaptive_simpson_panels(fbatch, edges, tol=tol, max_depth=max_depth)
    return panels.sum(axis=0)


EPS_LADDER = tuple(1e-2 * 2.0 ** (-k) for k in range(13))


def richardson_ladder(fn, tol: float, ladder=EPS_LADDER):
    """First-order Richardson extrapolation down a geometric epsilon ladder.

    fn(eps) -> ndarray.  Assuming value(eps) = v + c*eps + O(eps^2) and a
    ratio-2 ladder, the extrapolant is 2*v(eps_{k+1}) - v(eps_k).  Returns
    (value, trail, converged) where trail is the list of (eps, raw value)
    pairs actually computed; converged means two successive extrapolants
    differed by less than tol in max norm.
    """
    trail = []
    prev_extrap = None
    for eps in ladder:
        trail.append((eps, np.asarray(fn(eps))))
        if len(trail) >= 2:
            extrap = 2.0 * trail[-1][1] - trail[-2][1]
            if prev_extrap is not None and np.abs(extrap - prev_extrap).max() < tol:
                return extrap, trail, True
            prev_extrap = extrap
    return prev_extrap, trail, False


def require_converged(value, converged, what: str, trail=None):
    if not converged:
        raise NonConvergence(f"{what}: epsilon ladder did not settle", trail=trail)
    return value
