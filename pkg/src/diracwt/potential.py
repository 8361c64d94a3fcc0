"""Piecewise-constant potentials with constant tails.

A scalar potential q is stored as strictly increasing breakpoints
x_0 < ... < x_N, per-cell values q_k on [x_k, x_{k+1}) (left-continuous),
a left tail value for x < x_0 and a right tail value for x >= x_N.  The
constant tails are what make the decaying channels at +-infinity explicit.

Matrix potentials follow the same cell structure with 2x2 values and carry a
side tag (Dirac coefficient Q or Hamiltonian coefficient B).  The defocusing
map is q -> i[[0, -q], [qbar, 0]] and the focusing map q -> i[[0, -q],
[-qbar, 0]]; both have zero diagonal, hence equal diagonal entries, which is
exactly the symmetry the transfer theory needs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .algebra import UMAT, UMAT_INV
from .errors import PotentialFormatError, WrongSideError


class Model(enum.Enum):
    DEFOCUSING = "defocusing"
    FOCUSING = "focusing"
    GENERAL_JSA = "general"


class Side(enum.Enum):
    DIRAC = "dirac"
    HAMILTONIAN = "hamiltonian"


def _as_breaks(breakpoints):
    b = np.asarray(breakpoints, dtype=np.float64)
    if b.ndim != 1 or b.size == 0:
        raise ValueError("need at least one breakpoint")
    if not np.all(np.isfinite(b)):
        raise ValueError("breakpoints must be finite")
    if b.size > 1 and not np.all(np.diff(b) > 0):
        raise ValueError("breakpoints must be strictly increasing")
    return b


@dataclass(frozen=True)
class ScalarPotential:
    """q: complex-valued, piecewise constant, constant tails."""

    breakpoints: np.ndarray
    values: np.ndarray  # len(breakpoints) - 1 cell values
    q_left: complex = 0.0
    q_right: complex = 0.0

    def __post_init__(self):
        b = _as_breaks(self.breakpoints)
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (b.size - 1,):
            raise ValueError(f"expected {b.size - 1} cell values, got {v.shape}")
        if not (np.all(np.isfinite(v.view(np.float64))) and np.isfinite(self.q_left) and np.isfinite(self.q_right)):
            raise ValueError("potential values must be finite")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "q_left", complex(self.q_left))
        object.__setattr__(self, "q_right", complex(self.q_right))

    @classmethod
    def constant(cls, q0) -> "ScalarPotential":
        return cls(np.array([0.0]), np.array([], dtype=np.complex128), q0, q0)

    @classmethod
    def sample(cls, fn, grid, q_left=0.0, q_right=0.0) -> "ScalarPotential":
        """Midpoint-sample a callable onto a breakpoint grid."""
        grid = _as_breaks(grid)
        if grid.size < 2:
            raise ValueError("sampling grid needs at least two points")
        mids = 0.5 * (grid[:-1] + grid[1:])
        vals = np.array([complex(fn(x)) for x in mids])
        return cls(grid, vals, q_left, q_right)

    def region_values(self) -> np.ndarray:
        """Values on the len(breakpoints)+1 regions (left tail, cells, right tail)."""
        return np.concatenate(([self.q_left], self.values, [self.q_right]))

    def value_at(self, x) -> np.ndarray:
        """q(x), left-continuous, vectorised over x."""
        idx = np.searchsorted(self.breakpoints, np.asarray(x, dtype=float), side="right")
        return self.region_values()[idx]

    @property
    def is_constant(self) -> bool:
        rv = self.region_values()
        return bool(np.all(rv == rv[0]))

    def to_text(self) -> str:
        lines = [
            "tails %.17g %.17g %.17g %.17g"
            % (self.q_left.real, self.q_left.imag, self.q_right.real, self.q_right.imag)
        ]
        vals = list(self.values) + [self.q_right]
        for x, q in zip(self.breakpoints, vals):
            lines.append("%.17g %.17g %.17g" % (x, q.real, q.imag))
        return "\n".join(lines) + "\n"


def parse_potential(text: str) -> ScalarPotential:
    """Parse the potential file format.

    Header: ``tails <Re qL> <Im qL> <Re qR> <Im qR>``.  Body: one
    ``<x_break> <Re q> <Im q>`` line per breakpoint, sorted by x_break; each
    value runs from its breakpoint to the next.  The last line opens the
    right tail, so its value must repeat the header's q_R (a deliberate
    redundancy that catches misaligned edits).  Blank lines and ``#``
    comments are ignored.  Errors carry 1-based line numbers.
    """
    header = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if parts[0] != "tails":
                raise PotentialFormatError("expected header 'tails <Re qL> <Im qL> <Re qR> <Im qR>'", lineno)
            if len(parts) != 5:
                raise PotentialFormatError(f"header needs 4 numbers, got {len(parts) - 1}", lineno)
            try:
                header = [float(p) for p in parts[1:]]
            except ValueError as exc:
                raise PotentialFormatError(f"bad number in header: {exc}", lineno) from None
            continue
        if len(parts) != 3:
            raise PotentialFormatError(f"expected '<x> <Re q> <Im q>', got {len(parts)} fields", lineno)
        try:
            x, re_q, im_q = (float(p) for p in parts)
        except ValueError as exc:
            raise PotentialFormatError(f"bad number: {exc}", lineno) from None
        if rows and x <= rows[-1][1]:
            raise PotentialFormatError(f"breakpoint {x:g} not increasing", lineno)
        rows.append((lineno, x, complex(re_q, im_q)))
    if header is None:
        raise PotentialFormatError("missing 'tails' header", 1)
    if not rows:
        raise PotentialFormatError("no breakpoint lines", 1)
    q_left = complex(header[0], header[1])
    q_right = complex(header[2], header[3])
    last_line, _, last_val = rows[-1]
    if last_val != q_right:
        raise PotentialFormatError(
            f"last line value {last_val} must equal header right tail {q_right}", last_line
        )
    breaks = np.array([r[1] for r in rows])
    vals = np.array([r[2] for r in rows[:-1]], dtype=np.complex128)
    return ScalarPotential(breaks, vals, q_left, q_right)


def load_potential(path) -> ScalarPotential:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_potential(fh.read())


@dataclass(frozen=True)
class MatrixPotential:
    """2x2 coefficient matrix with the cell structure of ScalarPotential."""

    breakpoints: np.ndarray
    regions: np.ndarray  # (len(breakpoints)+1, 2, 2): left tail, cells, right tail
    side: Side = Side.DIRAC
    model: Model | None = field(default=None, compare=False)

    def __post_init__(self):
        b = _as_breaks(self.breakpoints)
        r = np.asarray(self.regions, dtype=np.complex128)
        if r.shape != (b.size + 1, 2, 2):
            raise ValueError(f"expected {b.size + 1} region matrices, got {r.shape}")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "regions", r)

    def region_at(self, x) -> np.ndarray:
        idx = int(np.searchsorted(self.breakpoints, float(x), side="right"))
        return self.regions[idx]

    @property
    def left_tail(self) -> np.ndarray:
        return self.regions[0]

    @property
    def right_tail(self) -> np.ndarray:
        return self.regions[-1]


def _dirac_cell(model: Model, q: complex) -> np.ndarray:
    if model is Model.DEFOCUSING:
        return 1j * np.array([[0.0, -q], [np.conj(q), 0.0]])
    if model is Model.FOCUSING:
        return 1j * np.array([[0.0, -q], [-np.conj(q), 0.0]])
    raise ValueError("general matrix potentials are built with MatrixPotential directly")


def build_matrix_potential(model: Model, q: ScalarPotential) -> MatrixPotential:
    """Dirac-side coefficient matrix for the defocusing/focusing models."""
    regions = np.stack([_dirac_cell(model, v) for v in q.region_values()])
    return MatrixPotential(q.breakpoints, regions, Side.DIRAC, model)


def to_hamiltonian_potential(Q: MatrixPotential) -> MatrixPotential:
    """Per-cell similarity B = U Q U^{-1}."""
    if Q.side is not Side.DIRAC:
        raise WrongSideError("to_hamiltonian_potential expects a Dirac-side potential")
    regions = UMAT @ Q.regions @ UMAT_INV
    return MatrixPotential(Q.breakpoints, regions, Side.HAMILTONIAN, Q.model)


def jsa_check(Q: MatrixPotential) -> tuple[bool, float]:
    """Equal-diagonal check: (exact equality on every region, max |Q11 - Q22|)."""
    if Q.side is not Side.DIRAC:
        raise WrongSideError("jsa_check expects a Dirac-side potential")
    diff = Q.regions[:, 0, 0] - Q.regions[:, 1, 1]
    return bool(np.all(diff == 0)), float(np.abs(diff).max())
