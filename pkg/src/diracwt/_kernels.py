"""Hot numeric kernels: batched 2x2 transfer-matrix propagation and RK4.

Two interchangeable backends live here.  The numba backend JIT-compiles
straight loops over evaluation points; the numpy backend vectorises the same
closed-form expressions over point batches.  Selection happens once at import
time: numba is used when importable unless the environment variable
``DIRACWT_DISABLE_NUMBA`` is set to a truthy value ("1", "true", "yes").

Both backends are kept importable side by side (``*_numpy`` / ``*_numba``)
so the test suite can cross-check them; ``benchmarks/bench_backends.py``
compares their throughput.

The propagation model: the real line is split into regions by a sorted
breakpoint array ``edges`` (region i is [edges[i-1], edges[i]), with open
tails at both ends), each region carrying a constant generator ``gens[i]``,
and a solution frame is advanced by exp(gens[i] * dx) across each region.
``anchor_x``/``anchor_T`` hold, per region, a point inside the region's
closure together with the frame already accumulated there, so a single
matrix exponential finishes the job for any x.
"""

from __future__ import annotations

import cmath
import os

import numpy as np

_DISABLE = os.environ.get("DIRACWT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

if not _DISABLE:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        numba = None
else:
    numba = None

_ID2 = np.eye(2, dtype=np.complex128)


def _expm2_scaled_numpy(A, ts):
    """exp(A*t) for a (2,2) generator and an array of real t -> (n,2,2).

    Trace-split closed form: with a = tr(A)/2, B = A - a*I and
    delta = sqrt(-det B), exp(A*t) = e^{a t}(cosh(t delta) I + sinh(t delta)/delta B).
    The sinh/delta factor is even in delta, so the sqrt branch is immaterial;
    a short series covers the removable singularity at small |t*delta|.
    """
    ts = np.asarray(ts, dtype=np.float64)
    a = 0.5 * (A[0, 0] + A[1, 1])
    B = A - a * _ID2
    d = np.sqrt(-(B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]))
    td = ts * d
    ch = np.cosh(td)
    small = np.abs(td) < 1e-4
    with np.errstate(invalid="ignore", divide="ignore"):
        sh = np.where(small, ts * (1.0 + td * td / 6.0 * (1.0 + td * td / 20.0)),
                      np.divide(np.sinh(np.where(small, 1.0, td)), np.where(np.abs(d) == 0, 1.0, d),
                                where=~small))
    out = np.empty(ts.shape + (2, 2), dtype=np.complex128)
    ea = np.exp(a * ts)
    out[..., 0, 0] = ea * (ch + sh * B[0, 0])
    out[..., 0, 1] = ea * (sh * B[0, 1])
    out[..., 1, 0] = ea * (sh * B[1, 0])
    out[..., 1, 1] = ea * (ch + sh * B[1, 1])
    return out


def propagate_from_anchors_numpy(gens, anchor_x, anchor_T, region_idx, xs):
    """Frames at the points xs, given per-region anchors. xs need not be sorted."""
    out = np.empty((len(xs), 2, 2), dtype=np.complex128)
    for r in range(gens.shape[0]):
        sel = np.nonzero(region_idx == r)[0]
        if sel.size == 0:
            continue
        E = _expm2_scaled_numpy(gens[r], xs[sel] - anchor_x[r])
        out[sel] = E @ anchor_T[r]
    return out


def rk4_path_numpy(gens, leg_bounds, leg_region, F0, hmax):
    """Classical RK4 for F' = gens[region] F along consecutive legs.

    Integrates from leg_bounds[0] with frame F0; returns the frame at the end
    of every leg, shape (len(leg_region), 2, 2).  Legs may run in either
    direction; steps within a leg are uniform with |h| <= hmax.
    """
    F = np.array(F0, dtype=np.complex128)
    out = np.empty((len(leg_region), 2, 2), dtype=np.complex128)
    for j, reg in enumerate(leg_region):
        a, b = leg_bounds[j], leg_bounds[j + 1]
        A = gens[reg]
        n = max(1, int(np.ceil(abs(b - a) / hmax)))
        h = (b - a) / n
        for _ in range(n):
            k1 = A @ F
            k2 = A @ (F + 0.5 * h * k1)
            k3 = A @ (F + 0.5 * h * k2)
            k4 = A @ (F + h * k3)
            F = F + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[j] = F
    return out


if numba is not None:

    @numba.njit(cache=True)
    def _expm2_into(A, t, out):  # pragma: no cover - exercised via wrappers
        a = 0.5 * (A[0, 0] + A[1, 1])
        b00 = A[0, 0] - a
        b01 = A[0, 1]
        b10 = A[1, 0]
        b11 = A[1, 1] - a
        d = cmath.sqrt(-(b00 * b11 - b01 * b10))
        td = t * d
        ch = cmath.cosh(td)
        if abs(td) < 1e-4:
            sh = t * (1.0 + td * td / 6.0 * (1.0 + td * td / 20.0))
        else:
            sh = cmath.sinh(td) / d
        ea = cmath.exp(a * t)
        out[0, 0] = ea * (ch + sh * b00)
        out[0, 1] = ea * (sh * b01)
        out[1, 0] = ea * (sh * b10)
        out[1, 1] = ea * (ch + sh * b11)

    @numba.njit(cache=True)
    def propagate_from_anchors_numba(gens, anchor_x, anchor_T, region_idx, xs):  # pragma: no cover
        n = xs.shape[0]
        out = np.empty((n, 2, 2), dtype=np.complex128)
        E = np.empty((2, 2), dtype=np.complex128)
        for k in range(n):
            r = region_idx[k]
            _expm2_into(gens[r], xs[k] - anchor_x[r], E)
            T = anchor_T[r]
            out[k, 0, 0] = E[0, 0] * T[0, 0] + E[0, 1] * T[1, 0]
            out[k, 0, 1] = E[0, 0] * T[0, 1] + E[0, 1] * T[1, 1]
            out[k, 1, 0] = E[1, 0] * T[0, 0] + E[1, 1] * T[1, 0]
            out[k, 1, 1] = E[1, 0] * T[0, 1] + E[1, 1] * T[1, 1]
        return out

    @numba.njit(cache=True)
    def rk4_path_numba(gens, leg_bounds, leg_region, F0, hmax):  # pragma: no cover
        F = F0.copy()
        nleg = leg_region.shape[0]
        out = np.empty((nleg, 2, 2), dtype=np.complex128)
        for j in range(nleg):
            a = leg_bounds[j]
            b = leg_bounds[j + 1]
            A = gens[leg_region[j]]
            n = max(1, int(np.ceil(abs(b - a) / hmax)))
            h = (b - a) / n
            for _ in range(n):
                k1 = A @ F
                k2 = A @ (F + 0.5 * h * k1)
                k3 = A @ (F + 0.5 * h * k2)
                k4 = A @ (F + h * k3)
                F = F + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            out[j] = F
        return out

    BACKEND = "numba"
    propagate_from_anchors = propagate_from_anchors_numba
    rk4_path = rk4_path_numba
else:
    BACKEND = "numpy"
    propagate_from_anchors_numba = None
    rk4_path_numba = None
    propagate_from_anchors = propagate_from_anchors_numpy
    rk4_path = rk4_path_numpy

expm2_scaled = _expm2_scaled_numpy
