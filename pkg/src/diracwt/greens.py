"""Whole-line Green's matrices and resolvent application.

Assembly is from the x = 0 frame and the half-line coefficients: with
Gamma = Gamma(m_-, m_+) and F the fundamental matrix,

    Hamiltonian side:  G(z,x,x') = F(x) Gamma^T F(x')^T          (x < x')
                                   F(x) Gamma   F(x')^T          (x > x')
    Dirac side:        G(z,x,x') = -i F(x) Gamma^(T) F(x')^T sigma1

(the trailing sigma1 comes from the real-adjoint pairing on the Dirac side;
it is what makes G^H = U G^D U^{-1} hold).  One normalisation point, x = 0,
so no arbitrary constants enter.

``resolvent_apply`` integrates G(z, x, .) f against a compactly supported f
by adaptive Simpson with the kernel discontinuity at x' = x as a mandatory
panel boundary, then certifies the construction by the residual of the
differential equation with a 4th-order finite-difference derivative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import ID2, SIGMA1, SIGMA3, SIGMA4
from .errors import CoincidentPoints
from .potential import MatrixPotential, Model, ScalarPotential, Side
from .propagate import BoundaryFrame, Propagator, as_param
from .quadrature import adaptive_simpson_panels
from .weyl import _matrix_potential, gamma_matrix, m_pair


@dataclass(frozen=True)
class GreenEvaluation:
    z: complex
    x: float
    xp: float
    side: Side
    value: np.ndarray


def _green_parts(pot: ScalarPotential, model: Model, z, frame: BoundaryFrame, side: Side):
    mp = _matrix_potential(pot, model, side)
    zc = as_param(z).z
    mm, mp_ = m_pair(pot, model, zc, frame, side)
    gamma = gamma_matrix(mm, mp_)
    prop = Propagator(mp, zc, frame)
    if side is Side.DIRAC:
        return mp, prop, gamma, -1j, np.asarray(SIGMA1)
    return mp, prop, gamma, 1.0 + 0j, np.asarray(ID2)


def _green_value(prop, gamma, pre, sig, x: float, xp: float) -> np.ndarray:
    if x == xp:
        raise CoincidentPoints("Green matrix is defined off the diagonal x != x'")
    Fx, Fxp = prop.at([x, xp])
    core = gamma.T if x < xp else gamma
    return pre * (Fx @ core @ Fxp.T @ sig)


def green_dirac(pot: ScalarPotential, model: Model, z, x: float, xp: float,
                frame: BoundaryFrame | None = None) -> GreenEvaluation:
    frame = frame or BoundaryFrame()
    _, prop, gamma, pre, sig = _green_parts(pot, model, z, frame, Side.DIRAC)
    return GreenEvaluation(as_param(z).z, x, xp, Side.DIRAC, _green_value(prop, gamma, pre, sig, x, xp))


def green_hamiltonian(pot: ScalarPotential, model: Model, z, x: float, xp: float,
                      frame: BoundaryFrame | None = None) -> GreenEvaluation:
    frame = frame or BoundaryFrame()
    _, prop, gamma, pre, sig = _green_parts(pot, model, z, frame, Side.HAMILTONIAN)
    return GreenEvaluation(as_param(z).z, x, xp, Side.HAMILTONIAN, _green_value(prop, gamma, pre, sig, x, xp))


@dataclass(frozen=True)
class ResolventApplication:
    z: complex
    side: Side
    grid: np.ndarray
    u: np.ndarray          # (len(grid), 2)
    residual: float
    residual_mask: np.ndarray  # interior nodes entering the residual


def _panel_edges(grid: np.ndarray, support: tuple[float, float], breakpoints) -> np.ndarray:
    """Quadrature panel edges over the support: grid nodes inside it (the
    mandatory x' = x splits), the support endpoints, interior potential
    breakpoints, and same-spacing padding where the grid does not reach."""
    s0, s1 = support
    h = grid[1] - grid[0]
    pieces = [np.array([s0, s1])]
    inside = grid[(grid > s0) & (grid < s1)]
    pieces.append(inside)
    bps = np.asarray(breakpoints, dtype=float)
    pieces.append(bps[(bps > s0) & (bps < s1)])
    if inside.size:
        if inside[0] - s0 > h:
            pieces.append(np.arange(inside[0], s0, -h)[1:])
        if s1 - inside[-1] > h:
            pieces.append(np.arange(inside[-1], s1, h)[1:])
    else:
        pieces.append(np.arange(s0, s1, h)[1:])
    return np.unique(np.concatenate(pieces))


def resolvent_apply(pot: ScalarPotential, model: Model, z, f, grid,
                    frame: BoundaryFrame | None = None, side: Side = Side.DIRAC,
                    quad_tol: float = 1e-8) -> ResolventApplication:
    """u = integral of G(z, x, x') f(x') dx', sampled on a uniform grid.

    The x' integral is split at every grid node (so each sample point is a
    panel boundary), at the support edges of f, and at potential
    breakpoints; each panel is integrated by adaptive Simpson to quad_tol.

    The residual is the max norm of (system - z)u - f over interior grid
    nodes, with u' by the 4th-order central stencil.  Nodes whose stencil
    straddles a breakpoint with a nonzero coefficient jump are excluded:
    u' jumps there and the stencil does not apply.
    """
    frame = frame or BoundaryFrame()
    grid = np.asarray(grid, dtype=float)
    h = grid[1] - grid[0]
    if not np.allclose(np.diff(grid), h, rtol=0, atol=1e-9 * max(1.0, abs(h))):
        raise ValueError("resolvent_apply needs a uniform grid")
    zc = as_param(z).z
    mp, prop, gamma, pre, sig = _green_parts(pot, model, zc, frame, side)

    support = f.support
    edges = _panel_edges(grid, support, mp.breakpoints)

    def density(xs):
        F = prop.at(xs)
        rhs = f(xs) @ sig.T
        return np.einsum("nji,nj->ni", F, rhs)

    panels = adaptive_simpson_panels(density, edges, tol=quad_tol)
    cum = np.vstack([np.zeros((1, 2), np.complex128), np.cumsum(panels, axis=0)])
    pos = np.clip(np.searchsorted(edges, grid, side="left"), 0, len(edges) - 1)
    A = cum[pos]
    A[grid > edges[-1]] = cum[-1]
    total = cum[-1]

    Fg = prop.at(grid)
    mix = (gamma @ A.T).T + (gamma.T @ (total - A).T).T
    u = pre * np.einsum("nij,nj->ni", Fg, mix)

    # Residual of the differential system with the 4th-order derivative.
    du = (u[:-4] - 8.0 * u[1:-3] + 8.0 * u[3:-1] - u[4:]) / (12.0 * h)
    xi = grid[2:-2]
    ui = u[2:-2]
    fi = f(xi)
    Mi = mp.regions[np.searchsorted(mp.breakpoints, xi, side="right")]
    if side is Side.DIRAC:
        lhs = (1j * du @ SIGMA3.T) + np.einsum("nij,nj->ni", Mi, ui)
    else:
        lhs = -(du @ SIGMA4.T) + np.einsum("nij,nj->ni", Mi, ui)
    res_vec = lhs - zc * ui - fi
    jumps = np.abs(np.diff(mp.regions, axis=0)).max(axis=(1, 2))
    mask = np.ones(len(xi), dtype=bool)
    for bp, jump in zip(mp.breakpoints, jumps):
        if jump > 0:
            mask &= np.abs(xi - bp) >= 2.0 * h - 1e-12
    residual = float(np.abs(res_vec[mask]).max()) if mask.any() else float("nan")
    return ResolventApplication(zc, side, grid, u, residual, mask)
