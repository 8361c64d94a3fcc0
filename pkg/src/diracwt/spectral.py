"""Spectral measures from boundary values of the M matrix, the associated
transform, spectral-projection bilinear forms computed two independent ways,
and the crossing-point blowup diagnostics of the focusing constant model.

Measures.  The self-adjoint density at Im-part epsilon is
(1/pi) Im M(lambda + i eps); the non-self-adjoint analogue is
(1/(2 pi i)) [M(lambda + i eps) - M(lambda - i eps)].  Interval values
integrate the density in lambda (Gauss-Legendre, with inverse-square-root
endpoint weighting near the band edges of a constant defocusing potential)
down a geometric epsilon ladder eps_k = 1e-2 * 2^-k, extrapolated assuming a
first-order bias in epsilon.

Projections.  <f, E((l1, l2]) g> is computed either from the transform and
the measure density, or from the resolvent difference across the real axis
(Stone route).  Their agreement is the central cross-validation of the
package.  On the Dirac side both routes are conjugated by U.

Caller obligations for the non-self-adjoint measure: the interval must be
separated from the rest of the spectrum by a complex strip (for the
constant-coefficient focusing model any interval avoiding lambda = 0
qualifies; the vertical spectral segment crosses at the origin).  This is
not verified programmatically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import UMAT
from .errors import NonConvergence
from .greens import resolvent_apply
from .potential import Model, ScalarPotential, Side
from .propagate import BoundaryFrame, Propagator, as_param
from .quadrature import (adaptive_simpson, gauss_legendre,
                         gauss_sqrt_singular, richardson_ladder)
from .testfuncs import TestFunction
from .weyl import _matrix_potential, m_matrix, m_pair

_EDGE_PROXIMITY = 1e-2  # switch to weighted endpoint rule inside this window


@dataclass(frozen=True)
class SpectralMeasureSample:
    interval: tuple[float, float]
    value: np.ndarray
    eps_trail: list
    converged: bool


@dataclass(frozen=True)
class TransformValue:
    lam: float
    value: np.ndarray


def stieltjes_density(pot: ScalarPotential, model: Model, lam: float, eps: float,
                      frame: BoundaryFrame | None = None) -> np.ndarray:
    """Measure density at distance eps from the axis (no extrapolation)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    frame = frame or BoundaryFrame()
    z = complex(lam, eps)
    M_up = m_matrix(*m_pair(pot, model, z, frame))
    if model is Model.DEFOCUSING:
        return (M_up - M_up.conj().T) / (2j * np.pi)
    M_dn = m_matrix(*m_pair(pot, model, np.conj(z), frame))
    return (M_up - M_dn) / (2j * np.pi)


def density_limit(pot: ScalarPotential, model: Model, lam: float,
                  frame: BoundaryFrame | None = None, tol: float = 1e-8):
    """Epsilon -> 0 density by ladder extrapolation: (value, converged)."""
    value, _, converged = richardson_ladder(
        lambda eps: stieltjes_density(pot, model, lam, eps, frame), tol)
    return value, converged


def _lambda_rule(pot: ScalarPotential, model: Model, lam1: float, lam2: float, nodes: int):
    """Quadrature nodes/weights on (lam1, lam2].

    For a constant defocusing potential the density behaves like an inverse
    square root at the band edges +-|q0|; the interval is split there and
    subintervals with an endpoint within 1e-2 of an edge (on the band side)
    use a Gauss-Jacobi rule whose weights absorb the singular factor.
    """
    edges = []
    if model is Model.DEFOCUSING and pot.is_constant:
        a = abs(pot.q_right)
        if a > 0:
            edges = [-a, a]
    cuts = np.unique([lam1, lam2] + [e for e in edges if lam1 < e < lam2])
    xs_all, ws_all = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        rule = None
        for e in edges:
            if abs(a - e) < _EDGE_PROXIMITY and a >= e > 0:
                rule = "left"      # singularity ~ (lambda - e)^(-1/2) at the left end
            elif abs(b - e) < _EDGE_PROXIMITY and b <= e < 0:
                rule = "right"     # mirrored edge on the negative axis
        if rule is None:
            x, w = gauss_legendre(nodes, a, b)
        else:
            x, w = gauss_sqrt_singular(nodes, a, b, rule)
            w = w * np.sqrt(x - a if rule == "left" else b - x)
        xs_all.append(x)
        ws_all.append(w)
    return np.concatenate(xs_all), np.concatenate(ws_all)


def omega_interval(pot: ScalarPotential, model: Model, lam1: float, lam2: float,
                   frame: BoundaryFrame | None = None, tol: float = 1e-6,
                   nodes: int = 24, strict: bool = False) -> SpectralMeasureSample:
    """Measure of (lam1, lam2] by the epsilon ladder with Richardson extrapolation."""
    if not lam1 < lam2:
        raise ValueError("need lam1 < lam2")
    frame = frame or BoundaryFrame()
    xs, ws = _lambda_rule(pot, model, lam1, lam2, nodes)

    def at_eps(eps):
        dens = np.stack([stieltjes_density(pot, model, x, eps, frame) for x in xs])
        return np.einsum("n,nij->ij", ws, dens)

    value, trail, converged = richardson_ladder(at_eps, tol)
    if strict and not converged:
        raise NonConvergence("spectral measure: epsilon ladder did not settle", trail=trail)
    return SpectralMeasureSample((lam1, lam2), value, trail, converged)


def _transform_row(prop: Propagator, fn, conjugate: bool, quad_tol: float = 1e-10):
    """int f(x)^* F(z,x) dx (conjugate=True) or int F(z,x)^T f(x) dx."""
    s0, s1 = fn.support
    breaks = [b for b in prop.pot.breakpoints if s0 < b < s1]

    if conjugate:
        def density(xs):
            return np.einsum("ni,nij->nj", fn(xs).conj(), prop.at(xs))
    else:
        def density(xs):
            return np.einsum("nji,nj->ni", prop.at(xs), fn(xs))

    return adaptive_simpson(density, s0, s1, tol=quad_tol, breaks=breaks)


def transform_t0(pot: ScalarPotential, model: Model, f: TestFunction, lam: float,
                 frame: BoundaryFrame | None = None) -> TransformValue:
    """(T0 f)(lambda) = int F^H(lambda, x)^T f(x) dx over the support of f."""
    frame = frame or BoundaryFrame()
    mp = _matrix_potential(pot, model, Side.HAMILTONIAN)
    prop = Propagator(mp, complex(lam), frame)
    return TransformValue(float(lam), _transform_row(prop, f, conjugate=False))


def _side_adjusted(f: TestFunction, g: TestFunction, side: Side):
    # The Dirac-side projection is the Hamiltonian-side one with f -> Uf, g -> Ug.
    if side is Side.DIRAC:
        return (f.with_weights(UMAT @ np.asarray(f.weights)),
                g.with_weights(UMAT @ np.asarray(g.weights)))
    return f, g


def projection_via_transform(pot: ScalarPotential, model: Model, f: TestFunction,
                             g: TestFunction, lam1: float, lam2: float,
                             frame: BoundaryFrame | None = None, tol: float = 1e-6,
                             nodes: int = 24, side: Side = Side.HAMILTONIAN,
                             strict: bool = False):
    """<f, E((lam1, lam2]) g> via the transform and the measure density.

    Self-adjoint route: (T0 f)(lambda)^* dOmega (T0 g)(lambda); the
    non-self-adjoint route pairs (T0 fbar)^T with the complex measure.  Both
    reduce to int f(x)^* F(lambda,x) dx . density . int F(lambda,x')^T g dx',
    which is what is computed (F is real at real lambda in the self-adjoint
    case, making the two readings coincide there).
    """
    frame = frame or BoundaryFrame()
    f, g = _side_adjusted(f, g, side)
    xs, ws = _lambda_rule(pot, model, lam1, lam2, nodes)
    mp = _matrix_potential(pot, model, Side.HAMILTONIAN)
    rows = []
    cols = []
    for lam in xs:
        prop = Propagator(mp, complex(lam), frame)
        rows.append(_transform_row(prop, f, conjugate=True))
        cols.append(_transform_row(prop, g, conjugate=False))
    rows = np.stack(rows)
    cols = np.stack(cols)

    def at_eps(eps):
        dens = np.stack([stieltjes_density(pot, model, x, eps, frame) for x in xs])
        return np.einsum("n,ni,nij,nj->", ws, rows, dens, cols)

    value, trail, converged = richardson_ladder(at_eps, tol)
    if strict and not converged:
        raise NonConvergence("projection (transform route): ladder did not settle", trail=trail)
    return complex(value)


def projection_via_stone(pot: ScalarPotential, model: Model, f: TestFunction,
                         g: TestFunction, lam1: float, lam2: float,
                         frame: BoundaryFrame | None = None, tol: float = 1e-6,
                         nodes: int = 24, side: Side = Side.HAMILTONIAN,
                         grid_h: float = 2e-3, quad_tol: float = 1e-9,
                         strict: bool = False):
    """<f, E((lam1, lam2]) g> via the resolvent difference across the axis.

    (1/(2 pi i)) int dlambda <f, [R(lambda + i eps) - R(lambda - i eps)] g>,
    with R applied through ``resolvent_apply`` on a grid covering both
    supports, epsilon-extrapolated down the ladder.
    """
    frame = frame or BoundaryFrame()
    lo = min(f.support[0], g.support[0]) - 2 * grid_h
    hi = max(f.support[1], g.support[1]) + 2 * grid_h
    n = int(np.ceil((hi - lo) / grid_h))
    n += n % 2
    grid = np.linspace(lo, hi, n + 1)
    xs, ws = _lambda_rule(pot, model, lam1, lam2, nodes)

    simpson_w = np.ones(n + 1)
    simpson_w[1:-1:2] = 4.0
    simpson_w[2:-1:2] = 2.0
    simpson_w *= (grid[1] - grid[0]) / 3.0
    fbar = f(grid).conj()

    def bracket(lam, eps):
        up = resolvent_apply(pot, model, complex(lam, eps), g, grid, frame, side, quad_tol).u
        dn = resolvent_apply(pot, model, complex(lam, -eps), g, grid, frame, side, quad_tol).u
        pair = np.einsum("n,ni,ni->", simpson_w, fbar, up - dn)
        return pair / (2j * np.pi)

    def at_eps(eps):
        return np.dot(ws, [bracket(lam, eps) for lam in xs])

    value, trail, converged = richardson_ladder(at_eps, tol)
    if strict and not converged:
        raise NonConvergence("projection (Stone route): ladder did not settle", trail=trail)
    return complex(value)


def blowup_norm(q0, lam1: float, lam2: float) -> float:
    """Operator norm of multiplication by (mu^2 - |q0|^2)^(-1/2) on the
    image [sqrt(lam1^2 + |q0|^2), sqrt(lam2^2 + |q0|^2)] of the interval.

    The function decreases in mu, so the essential supremum sits at the left
    endpoint, where mu^2 - |q0|^2 = lam1^2 exactly: the norm is 1/lam1,
    blowing up as the interval approaches the crossing point of the spectral
    arcs.  Evaluated in that cancellation-free form.
    """
    if complex(q0) == 0:
        raise ValueError("q0 must be nonzero (no crossing otherwise)")
    if not 0 < lam1 < lam2:
        raise ValueError("need 0 < lam1 < lam2")
    return 1.0 / lam1


@dataclass(frozen=True)
class QuadraticFormValue:
    mu_route: complex
    lambda_route: complex

    @property
    def value(self) -> complex:
        return self.mu_route


def _fourier_pair(h: TestFunction, mus: np.ndarray) -> np.ndarray:
    """(2 pi)^(-1/2) int e^(+-i mu x) h(x) dx for every mu; (n, 2) array.

    Direct oscillatory quadrature: composite Simpson on the support with a
    step resolving both the bump and the fastest oscillation present.
    """
    a, b = h.support
    mumax = float(np.abs(mus).max()) + abs(h.frequency)
    step = min((b - a) / 400.0, 2 * np.pi / (40.0 * max(mumax, 1.0)))
    n = int(np.ceil((b - a) / step))
    n += n % 2
    xs = np.linspace(a, b, n + 1)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (b - a) / (3.0 * n)
    hw = h.profile(xs) * w
    phase = np.exp(1j * np.outer(mus, xs))
    plus = phase @ hw
    minus = phase.conj() @ hw
    return np.column_stack([plus, minus]) / np.sqrt(2 * np.pi)


def focusing_quadratic_form(q0, h: TestFunction, lam1: float, lam2: float,
                            nodes: int = 96) -> QuadraticFormValue:
    """<(h,0), E((lam1,lam2]) (0,h)> for the focusing constant model.

    Closed form: -(i q0 / 2) integral of (mu^2 - |q0|^2)^(-1/2)
    [|hhat(mu)|^2 + |hcheck(mu)|^2] over mu in the transformed interval.
    Evaluated twice: on the original lambda variable, and after mu = |q0|
    cosh(s), which absorbs the inverse-square-root weight exactly.  The two
    results are returned for cross-checking; they agree up to quadrature
    error.
    """
    q0 = complex(q0)
    aq = abs(q0)
    if aq == 0:
        raise ValueError("q0 must be nonzero")
    if not 0 < lam1 < lam2:
        raise ValueError("need 0 < lam1 < lam2")
    # mu = |q0| cosh s turns the weight d mu / sqrt(mu^2 - q0^2) into ds.
    s_lo = float(np.arccosh(np.hypot(lam1, aq) / aq))
    s_hi = float(np.arccosh(np.hypot(lam2, aq) / aq))
    xs, ws = gauss_legendre(nodes, s_lo, s_hi)
    ft = _fourier_pair(h, aq * np.cosh(xs))
    mu_route = -0.5j * q0 * np.dot(ws, (np.abs(ft) ** 2).sum(axis=1))

    xl, wl = gauss_legendre(nodes, lam1, lam2)
    mus = np.hypot(xl, aq)
    ftl = _fourier_pair(h, mus)
    lambda_route = -0.5j * q0 * np.dot(wl / mus, (np.abs(ftl) ** 2).sum(axis=1))
    return QuadraticFormValue(complex(mu_route), complex(lambda_route))
