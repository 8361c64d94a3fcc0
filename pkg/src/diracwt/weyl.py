"""Branch functions, half-line Weyl-Titchmarsh coefficients, and the Gamma/M
matrices built from them.

Branch conventions.  For the defocusing model with constant modulus |q0| the
branch function is S(z) = sqrt(z^2 - |q0|^2), analytic with positive
imaginary part off the real rays |lambda| >= |q0|; for the focusing model it
is S(z) = sqrt(z^2 + |q0|^2), analytic with positive imaginary part off
(R union i[-|q0|, |q0|]).  On the split plane the principal square root of
the shifted argument never lands on [0, inf), so sign-normalising it
(flip when the imaginary part is <= 0) realises exactly the Im > 0 branch.
One-sided boundary values on the cuts are dispatched explicitly through
``CutSide`` tags:

    defocusing, lambda +- i0:  +-sqrt(lambda^2-q0^2) for lambda >= |q0|,
                               -+sqrt(lambda^2-q0^2) for lambda <= -|q0|
    focusing,   lambda +- i0:  +-sqrt(lambda^2+q0^2) for lambda > 0, sign
                               flipped for lambda < 0
    focusing,   it +- 0:       +-sqrt(q0^2-t^2) for 0 < t <= |q0|, sign
                               flipped for t < 0

Half-line coefficients.  m_+ (resp. m_-) is the unique coefficient making
Theta + m Phi square integrable towards +infinity (resp. -infinity).  The
closed forms for constant potentials (reference frame theta = 0) are

    defocusing: m_+- = (-Re q0 +- i S(z)) / (z + Im q0)
    focusing:   m_+- = (Im q0 -+ S(z)) / (i z + Re q0)

and the numeric path extracts the decaying tail channel and decomposes it at
x = 0, which reproduces the closed forms to roundoff for constant
potentials.  Both are exposed since their agreement is a primary check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (ChannelDegenerate, DegenerateWronskian, MFunctionPole,
                     NotInSplitPlane)
from .potential import (MatrixPotential, Model, ScalarPotential, Side,
                        build_matrix_potential, to_hamiltonian_potential)
from .propagate import (BoundaryFrame, CutSide, SpectralParameter, Propagator,
                        as_param, generator)

_REL_TOL = 1e-12  # channel separation / pole detection scale


@dataclass(frozen=True)
class BranchFn:
    model: Model
    q0: complex

    def __post_init__(self):
        if self.model is Model.GENERAL_JSA:
            raise ValueError("branch functions exist for the defocusing/focusing models only")
        object.__setattr__(self, "q0", complex(self.q0))

    @property
    def shift(self) -> float:
        """The constant subtracted from z^2 under the root: +-|q0|^2."""
        s = abs(self.q0) ** 2
        return -s if self.model is Model.DEFOCUSING else s


def _on_cut(model: Model, q0: complex, z: complex) -> bool:
    a = abs(q0)
    if model is Model.DEFOCUSING:
        return z.imag == 0.0 and abs(z.real) >= a
    return z.imag == 0.0 or (z.real == 0.0 and abs(z.imag) <= a)


def branch_sqrt(bf: BranchFn, z) -> complex:
    """S(z) on the split plane, or the tagged one-sided limit on a cut."""
    p = as_param(z)
    zc = p.z
    a = abs(bf.q0)
    if p.boundary_side is not None:
        side = p.boundary_side
        if bf.model is Model.DEFOCUSING:
            lam = zc.real
            if zc.imag != 0.0 or abs(lam) < a:
                raise NotInSplitPlane("boundary_side given but z is not on the defocusing cut")
            root = np.sqrt(lam * lam - a * a)
            if side not in (CutSide.ABOVE, CutSide.BELOW):
                raise NotInSplitPlane("defocusing cut takes sides 'above'/'below'")
            sgn = 1.0 if side is CutSide.ABOVE else -1.0
            return complex(sgn * root if lam > 0 else -sgn * root)
        if zc.imag == 0.0 and zc.real != 0.0:
            lam = zc.real
            root = np.sqrt(lam * lam + a * a)
            if side not in (CutSide.ABOVE, CutSide.BELOW):
                raise NotInSplitPlane("real focusing cut takes sides 'above'/'below'")
            sgn = 1.0 if side is CutSide.ABOVE else -1.0
            return complex(sgn * root if lam > 0 else -sgn * root)
        if zc.real == 0.0 and zc.imag != 0.0 and abs(zc.imag) <= a:
            t = zc.imag
            root = np.sqrt(a * a - t * t)
            if side not in (CutSide.RIGHT, CutSide.LEFT):
                raise NotInSplitPlane("imaginary focusing cut takes sides 'left'/'right'")
            sgn = 1.0 if side is CutSide.RIGHT else -1.0
            return complex(sgn * root if t > 0 else -sgn * root)
        raise NotInSplitPlane("z is not on a focusing cut (or sits at the crossing point)")
    if _on_cut(bf.model, bf.q0, zc):
        raise NotInSplitPlane(f"z = {zc} lies on a cut; pass a SpectralParameter with boundary_side")
    s = complex(np.sqrt(zc * zc + bf.shift))
    return s if s.imag > 0 else -s


@dataclass(frozen=True)
class MCoefficient:
    z: SpectralParameter
    sign: int  # +1 or -1
    frame: BoundaryFrame
    value: complex
    provenance: str  # "closed_form" | "numeric"


def m_closed_form(model: Model, q0, z, sign: int, frame: BoundaryFrame | None = None) -> MCoefficient:
    """Constant-potential coefficient in the reference frame theta = 0."""
    frame = frame or BoundaryFrame()
    if abs(frame.theta) > 1e-15:
        raise ValueError("closed forms hold in the reference frame theta = 0")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    p = as_param(z)
    q0 = complex(q0)
    bf = BranchFn(model, q0)
    S = branch_sqrt(bf, p)
    if model is Model.DEFOCUSING:
        den = p.z + q0.imag
        num = -q0.real + 1j * sign * S
    else:
        den = 1j * p.z + q0.real
        num = q0.imag - sign * S
    if abs(den) < _REL_TOL * max(1.0, abs(p.z)):
        raise MFunctionPole(f"half-line coefficient has a pole at z = {p.z}")
    return MCoefficient(p, sign, frame, complex(num / den), "closed_form")


def _decaying_channel(A: np.ndarray, direction: int) -> np.ndarray:
    """Eigenvector of the tail generator decaying toward direction*infinity.

    direction=+1 wants Re(eigenvalue) < 0, direction=-1 wants Re > 0.  A tie
    in the real parts (within 1e-12 of the eigenvalue scale) means z sits on
    the tail's essential spectrum: no decaying channel.
    """
    tr = A[0, 0] + A[1, 1]
    disc = np.sqrt(0.25 * tr * tr - (A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]))
    mu1 = 0.5 * tr + disc
    mu2 = 0.5 * tr - disc
    scale = max(1.0, abs(mu1), abs(mu2))
    if abs(mu1.real - mu2.real) <= _REL_TOL * scale:
        raise ChannelDegenerate("tail generator eigenvalues have equal real part")
    want = min if direction > 0 else max
    mu = want(mu1, mu2, key=lambda m: m.real)
    # Rows of (A - mu I) are proportional; take the better-conditioned cross vector.
    v1 = np.array([A[0, 1], mu - A[0, 0]])
    v2 = np.array([mu - A[1, 1], A[1, 0]])
    v = v1 if np.abs(v1).max() >= np.abs(v2).max() else v2
    return v / np.linalg.norm(v)


def _matrix_potential(pot: ScalarPotential, model: Model, side: Side) -> MatrixPotential:
    mp = build_matrix_potential(model, pot)
    return mp if side is Side.DIRAC else to_hamiltonian_potential(mp)


def m_numeric(pot: ScalarPotential, model: Model, z, sign: int,
              frame: BoundaryFrame | None = None, side: Side = Side.DIRAC) -> MCoefficient:
    """Half-line coefficient by decaying-channel extraction.

    The decaying eigenvector of the constant-tail generator is planted at the
    outermost breakpoint and propagated back to x = 0 by exact (inverse) cell
    transfers; solving F(z, 0) (c, c m)^T = Psi(0) cancels the arbitrary
    normalisation.  |c| below 1e-12 of |Psi(0)| means Psi is proportional to
    Phi: a half-line eigenvalue, reported as MFunctionPole.
    """
    frame = frame or BoundaryFrame()
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if model is Model.GENERAL_JSA:
        raise ValueError("m-functions are defined for the defocusing/focusing models only")
    p = as_param(z)
    mp = _matrix_potential(pot, model, side)
    prop = Propagator(mp, p.z, frame)
    if sign > 0:
        x_out = mp.breakpoints[-1]
        tail = mp.right_tail
    else:
        x_out = mp.breakpoints[0]
        tail = mp.left_tail
    A = generator(p.z, tail, side)
    v = _decaying_channel(A, sign)
    F_out = prop.at([x_out])[0]
    # Psi(0) = F(0) F(x_out)^{-1} v; F(0) is the frame, so solve in one step:
    # F(x_out) c_vec = v with c_vec = (c, c m)^T the frame coordinates.
    cvec = np.linalg.solve(F_out, v)
    if abs(cvec[0]) < _REL_TOL * np.linalg.norm(cvec):
        raise MFunctionPole(f"Psi_{'+' if sign > 0 else '-'} proportional to Phi at z = {p.z}")
    return MCoefficient(p, sign, frame, complex(cvec[1] / cvec[0]), "numeric")


def m_pair(pot: ScalarPotential, model: Model, z, frame: BoundaryFrame | None = None,
           side: Side = Side.DIRAC) -> tuple[complex, complex]:
    """(m_-, m_+) values by the numeric path."""
    return (m_numeric(pot, model, z, -1, frame, side).value,
            m_numeric(pot, model, z, +1, frame, side).value)


def gamma_matrix(m_minus: complex, m_plus: complex) -> np.ndarray:
    """[[1, m-], [m+, m- m+]] / (m- - m+)."""
    den = m_minus - m_plus
    if abs(den) <= _REL_TOL * max(1.0, abs(m_minus), abs(m_plus)):
        raise DegenerateWronskian("m_- equals m_+")
    return np.array([[1.0, m_minus], [m_plus, m_minus * m_plus]], dtype=np.complex128) / den


def m_matrix(m_minus: complex, m_plus: complex) -> np.ndarray:
    """Symmetric part of Gamma: the whole-line M matrix."""
    g = gamma_matrix(m_minus, m_plus)
    return 0.5 * (g + g.T)


def jsym_residual(pot: ScalarPotential, z, frame: BoundaryFrame | None = None,
                  side: Side = Side.DIRAC) -> float:
    """Focusing-model conjugation identity: conj(m(z)) * m(zbar) = -1.

    Returns the worse of the two residuals |conj(m_+-(z)) m_+-(zbar) + 1|,
    each computed from two independent numeric extractions.
    """
    frame = frame or BoundaryFrame()
    p = as_param(z)
    res = 0.0
    for sign in (+1, -1):
        m_z = m_numeric(pot, Model.FOCUSING, p.z, sign, frame, side).value
        m_zbar = m_numeric(pot, Model.FOCUSING, np.conj(p.z), sign, frame, side).value
        res = max(res, abs(np.conj(m_z) * m_zbar + 1.0))
    return res
