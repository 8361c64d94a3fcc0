"""Exact 2x2 complex linear algebra: the constant matrices, conjugation
operators, the Dirac<->Hamiltonian similarity U, and a closed-form matrix
exponential.

Vectors are numpy arrays of shape (2,), matrices of shape (2, 2), scalars
plain Python/numpy complex.  Everything here is a pure function of its
arguments.
"""

from __future__ import annotations

import enum

import numpy as np


def _const(rows):
    m = np.array(rows, dtype=np.complex128)
    m.setflags(write=False)
    return m


SIGMA1 = _const([[0, 1], [1, 0]])
ID2 = _const([[1, 0], [0, 1]])
SIGMA3 = _const([[1, 0], [0, -1]])
SIGMA4 = _const([[0, 1], [-1, 0]])

#: Unitary similarity between the Dirac and Hamiltonian forms:
#: U sigma3 U^{-1} = i sigma4 and U sigma1 U^T = -i I_2.
UMAT = _const([[(-1 + 1j) / 2, (-1 + 1j) / 2], [(1 + 1j) / 2, (-1 - 1j) / 2]])
UMAT_INV = _const(UMAT.conj().T)


def wronskian(f, g) -> complex:
    """W(F, G) = f1 g2 - f2 g1 = F^T sigma4 G."""
    return complex(f[0] * g[1] - f[1] * g[0])


class Conjugation(enum.Enum):
    """Conjugate-linear operators on C^2.

    C is plain componentwise conjugation; J = sigma1 C squares to the
    identity; K = sigma4 C squares to minus the identity; JTILDE = i C also
    squares to minus the identity.
    """

    C = "C"
    J = "J"
    K = "K"
    JTILDE = "Jtilde"


def apply_conjugation(op: Conjugation, v) -> np.ndarray:
    vbar = np.asarray(v, dtype=np.complex128).conj()
    if op is Conjugation.C:
        return vbar
    if op is Conjugation.J:
        return SIGMA1 @ vbar
    if op is Conjugation.K:
        return SIGMA4 @ vbar
    if op is Conjugation.JTILDE:
        return 1j * vbar
    raise ValueError(f"unknown conjugation {op!r}")


def conjugate_by_U(M, direction: str = "forward") -> np.ndarray:
    """U M U^{-1} ("forward") or U^{-1} M U ("inverse")."""
    M = np.asarray(M, dtype=np.complex128)
    if direction == "forward":
        return UMAT @ M @ UMAT_INV
    if direction == "inverse":
        return UMAT_INV @ M @ UMAT
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def mat2_exp(A) -> np.ndarray:
    """Closed-form exponential of a 2x2 complex matrix.

    Trace split: a = tr(A)/2, B = A - a I, delta = sqrt(-det B).  Then
    e^A = e^a (cosh(delta) I + sinhc(delta) B) with sinhc(d) = sinh(d)/d.
    cosh and sinhc are even, so the sqrt branch does not matter; sinhc is
    evaluated by series below |delta| = 1e-4 where the direct quotient
    cancels.
    """
    A = np.asarray(A, dtype=np.complex128)
    a = 0.5 * (A[0, 0] + A[1, 1])
    B = A - a * ID2
    d2 = -(B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0])
    d = np.sqrt(d2)
    if abs(d) < 1e-4:
        sinhc = 1.0 + d2 / 6.0 + d2 * d2 / 120.0 + d2 * d2 * d2 / 5040.0
    else:
        sinhc = np.sinh(d) / d
    return np.exp(a) * (np.cosh(d) * ID2 + sinhc * B)
