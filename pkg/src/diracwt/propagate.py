"""Fundamental matrices of the first-order 2x2 systems by exact cell
exponentials.

Dirac side:        i sigma3 Psi' + Q Psi = z Psi   =>  Psi' = -i sigma3 (zI - Q) Psi
Hamiltonian side:  -sigma4 Psi' + B Psi = z Psi    =>  Psi' = sigma4 (zI - B) Psi

Each constant cell contributes exp(generator * length); propagation error is
therefore pure roundoff.  Backward propagation uses the exponential at
negative lengths, which is the exact inverse transfer.  An independent
fixed-step RK4 integrator of the same initial-value problem is provided as a
test oracle.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .algebra import ID2, SIGMA3, SIGMA4, UMAT, UMAT_INV, mat2_exp
from .potential import MatrixPotential, Side


class CutSide(enum.Enum):
    """One-sided limits onto a branch cut: lambda +- i0 or it +- 0."""

    ABOVE = "above"
    BELOW = "below"
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class SpectralParameter:
    z: complex
    boundary_side: CutSide | None = None

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))


def as_param(z) -> SpectralParameter:
    if isinstance(z, SpectralParameter):
        return z
    return SpectralParameter(complex(z))


@dataclass(frozen=True)
class BoundaryFrame:
    """x = 0 frame, parametrised by theta.

    alpha = (cos theta, sin theta); the Hamiltonian-side frame columns are
    (alpha^T | -sigma4 alpha^T) and the Dirac-side frame is U^{-1} times
    that, which keeps the frame Wronskian equal to 1 on both sides.
    """

    theta: float = 0.0

    @cached_property
    def alpha(self) -> np.ndarray:
        return np.array([np.cos(self.theta), np.sin(self.theta)])

    @cached_property
    def beta(self) -> np.ndarray:
        return self.alpha @ UMAT

    def frame(self, side: Side) -> np.ndarray:
        a = self.alpha.astype(np.complex128)
        fh = np.column_stack([a, -(SIGMA4 @ a)])
        if side is Side.HAMILTONIAN:
            return fh
        return UMAT_INV @ fh


def generator(z: complex, M: np.ndarray, side: Side) -> np.ndarray:
    """Coefficient matrix of Psi' = A Psi on a constant cell."""
    if side is Side.DIRAC:
        return -1j * (SIGMA3 @ (z * ID2 - M))
    return SIGMA4 @ (z * ID2 - M)


def cell_transfer(Mcell, z, L: float, side: Side = Side.DIRAC) -> np.ndarray:
    """Transfer matrix across a single constant cell of signed length L."""
    return mat2_exp(generator(complex(z), np.asarray(Mcell, dtype=np.complex128), side) * L)


@dataclass(frozen=True)
class FundamentalMatrix:
    z: complex
    x: float
    side: Side
    value: np.ndarray  # columns (Theta | Phi)

    @property
    def theta_column(self) -> np.ndarray:
        return self.value[:, 0]

    @property
    def phi_column(self) -> np.ndarray:
        return self.value[:, 1]


class Propagator:
    """Per-(potential, z) anchor table; evaluates frames at arbitrary x."""

    def __init__(self, pot: MatrixPotential, z: complex, frame: BoundaryFrame):
        self.pot = pot
        self.z = complex(z)
        self.frame = frame
        edges = pot.breakpoints
        self.edges = edges
        self.gens = np.stack([generator(self.z, M, pot.side) for M in pot.regions])
        nreg = self.gens.shape[0]
        r0 = int(np.searchsorted(edges, 0.0, side="right"))
        anchor_x = np.empty(nreg)
        anchor_T = np.empty((nreg, 2, 2), dtype=np.complex128)
        anchor_x[r0] = 0.0
        anchor_T[r0] = frame.frame(pot.side)
        for i in range(r0 + 1, nreg):
            anchor_x[i] = edges[i - 1]
            anchor_T[i] = mat2_exp(self.gens[i - 1] * (edges[i - 1] - anchor_x[i - 1])) @ anchor_T[i - 1]
        for i in range(r0 - 1, -1, -1):
            anchor_x[i] = edges[i]
            anchor_T[i] = mat2_exp(self.gens[i + 1] * (edges[i] - anchor_x[i + 1])) @ anchor_T[i + 1]
        self.anchor_x = anchor_x
        self.anchor_T = anchor_T

    def at(self, xs) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
        region_idx = np.searchsorted(self.edges, xs, side="right").astype(np.int64)
        return _kernels.propagate_from_anchors(self.gens, self.anchor_x, self.anchor_T, region_idx, xs)


def fundamental_matrix_grid(pot: MatrixPotential, z, xs, frame: BoundaryFrame | None = None) -> np.ndarray:
    """F(z, x) for every x in xs; shape (len(xs), 2, 2)."""
    frame = frame or BoundaryFrame()
    return Propagator(pot, as_param(z).z, frame).at(xs)


def fundamental_matrix(pot: MatrixPotential, z, x: float, frame: BoundaryFrame | None = None) -> FundamentalMatrix:
    frame = frame or BoundaryFrame()
    zc = as_param(z).z
    value = Propagator(pot, zc, frame).at([x])[0]
    return FundamentalMatrix(zc, float(x), pot.side, value)


def rk4_reference(pot: MatrixPotential, z, x: float, frame: BoundaryFrame | None = None,
                  h: float | None = None) -> FundamentalMatrix:
    """Fixed-step RK4 oracle for the same initial-value problem.

    Steps never cross a breakpoint, so the classical order 4 is clean even
    though the coefficient matrix jumps between cells.  Default step
    h = 1e-3 / max(1, |z|).  Test use only; the production path is exact.
    """
    frame = frame or BoundaryFrame()
    zc = as_param(z).z
    if h is None:
        h = 1e-3 / max(1.0, abs(zc))
    gens = np.stack([generator(zc, M, pot.side) for M in pot.regions])
    edges = pot.breakpoints
    x = float(x)
    # Leg bounds from 0 to x through every breakpoint strictly inside.
    if x >= 0:
        inner = edges[(edges > 0) & (edges < x)]
        bounds = np.concatenate(([0.0], inner, [x]))
    else:
        inner = edges[(edges < 0) & (edges > x)][::-1]
        bounds = np.concatenate(([0.0], inner, [x]))
    mids = 0.5 * (bounds[:-1] + bounds[1:])
    leg_region = np.searchsorted(edges, mids, side="right").astype(np.int64)
    F0 = frame.frame(pot.side)
    if bounds.size == 1:
        value = F0
    else:
        value = _kernels.rk4_path(gens, bounds, leg_region, F0, h)[-1]
    return FundamentalMatrix(zc, x, pot.side, value)


def _trace_factor(pot: MatrixPotential, x: float) -> complex:
    """exp of the exact cellwise integral of tr(generator) from 0 to x.

    Dirac side: tr A = i (Q11 - Q22); Hamiltonian side: tr A = B12 - B21.
    This is the growth law of the frame determinant (the Wronskian).
    """
    if pot.side is Side.DIRAC:
        dens = 1j * (pot.regions[:, 0, 0] - pot.regions[:, 1, 1])
    else:
        dens = pot.regions[:, 0, 1] - pot.regions[:, 1, 0]
    edges = pot.breakpoints
    lo, hi = (0.0, x) if x >= 0 else (x, 0.0)
    cuts = np.concatenate(([lo], edges[(edges > lo) & (edges < hi)], [hi]))
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    idx = np.searchsorted(edges, mids, side="right")
    total = np.sum(dens[idx] * np.diff(cuts))
    if x < 0:
        total = -total
    return complex(np.exp(total))


def wronskian_drift(pot: MatrixPotential, z, frame: BoundaryFrame | None = None, xs=()) -> float:
    """Max deviation of det F(z, x) from det F(z, 0) times the exact growth factor."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if xs.size == 0:
        raise ValueError("xs must be nonempty")
    frame = frame or BoundaryFrame()
    F = fundamental_matrix_grid(pot, z, xs, frame)
    dets = F[:, 0, 0] * F[:, 1, 1] - F[:, 0, 1] * F[:, 1, 0]
    F0 = frame.frame(pot.side)
    w0 = F0[0, 0] * F0[1, 1] - F0[0, 1] * F0[1, 0]
    expected = np.array([w0 * _trace_factor(pot, x) for x in xs])
    return float(np.abs(dets - expected).max())
