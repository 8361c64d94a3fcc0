import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from diracwt import (ID2, SIGMA1, SIGMA3, SIGMA4, UMAT, UMAT_INV, Conjugation,
                     apply_conjugation, conjugate_by_U, mat2_exp, wronskian)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)
vec2 = st.tuples(cplx, cplx).map(lambda t: np.array(t, dtype=complex))


def taylor_expm(A, scale_norm=0.25):
    """Scaling-and-squaring Taylor oracle, independent of the closed form."""
    A = np.asarray(A, dtype=complex)
    k = 0
    while np.linalg.norm(A) > scale_norm:
        A = A / 2.0
        k += 1
    term = np.eye(2, dtype=complex)
    out = np.eye(2, dtype=complex)
    for n in range(1, 30):
        term = term @ A / n
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


class TestWronskian:
    def test_identity_columns(self):
        assert wronskian([1, 0], [0, 1]) == 1

    def test_direct_determinant(self):
        assert wronskian([1, 2], [3, 4]) == -2

    def test_frame_columns_unit(self):
        # (Theta | Phi) at x = 0 has Wronskian 1 for every frame angle.
        from diracwt import BoundaryFrame, Side
        for theta in np.linspace(0, 2 * np.pi, 17, endpoint=False):
            for side in (Side.DIRAC, Side.HAMILTONIAN):
                F = BoundaryFrame(theta).frame(side)
                assert abs(wronskian(F[:, 0], F[:, 1]) - 1) < 1e-14

    @given(vec2)
    def test_self_wronskian_zero(self, v):
        assert wronskian(v, v) == 0

    @given(vec2, vec2)
    def test_antisymmetry(self, f, g):
        assert wronskian(f, g) == -wronskian(g, f)


class TestConjugations:
    def test_j_squared_identity(self):
        v = np.array([1 + 1j, 2.0])
        out = apply_conjugation(Conjugation.J, apply_conjugation(Conjugation.J, v))
        assert_allclose(out, v, atol=0)

    def test_k_squared_negation(self):
        v = np.array([1.0, 1j])
        out = apply_conjugation(Conjugation.K, apply_conjugation(Conjugation.K, v))
        assert_allclose(out, np.array([-1.0, -1j]), atol=0)

    def test_componentwise(self):
        out = apply_conjugation(Conjugation.C, np.array([1j, 1 - 1j]))
        assert_allclose(out, np.array([-1j, 1 + 1j]), atol=0)

    @given(vec2)
    def test_jtilde_squared_identity(self, v):
        # i*C conjugates the i away: an involution, unlike K.
        out = apply_conjugation(Conjugation.JTILDE, apply_conjugation(Conjugation.JTILDE, v))
        assert_allclose(out, v, atol=1e-15)

    @given(cplx, vec2)
    def test_conjugate_linearity(self, a, v):
        for op in Conjugation:
            lhs = apply_conjugation(op, a * v)
            rhs = np.conj(a) * apply_conjugation(op, v)
            assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, abs(a))


class TestUnitaryU:
    def test_unitary(self):
        assert np.abs(UMAT @ UMAT.conj().T - ID2).max() < 1e-15

    def test_sigma3_similarity(self):
        assert np.abs(UMAT @ SIGMA3 @ UMAT_INV - 1j * SIGMA4).max() < 1e-15

    def test_sigma1_transpose_identity(self):
        assert np.abs(UMAT @ SIGMA1 @ UMAT.T + 1j * ID2).max() < 1e-15

    def test_forward_sigma3(self):
        assert_allclose(conjugate_by_U(SIGMA3, "forward"), 1j * SIGMA4, atol=1e-15)

    def test_forward_identity(self):
        assert_allclose(conjugate_by_U(ID2, "forward"), ID2, atol=1e-15)

    def test_round_trip(self, rng):
        M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        back = conjugate_by_U(conjugate_by_U(M, "forward"), "inverse")
        assert np.abs(back - M).max() < 1e-15

    def test_determinant_preservation(self, rng):
        for _ in range(50):
            eta = rng.normal(size=2) + 1j * rng.normal(size=2)
            xi = rng.normal(size=2) + 1j * rng.normal(size=2)
            d0 = np.linalg.det(np.column_stack([eta, xi]))
            d1 = np.linalg.det(np.column_stack([UMAT @ eta, UMAT @ xi]))
            d2 = np.linalg.det(np.column_stack([UMAT_INV @ eta, UMAT_INV @ xi]))
            assert abs(d1 - d0) < 1e-12 * max(1, abs(d0))
            assert abs(d2 - d0) < 1e-12 * max(1, abs(d0))


class TestMat2Exp:
    def test_zero(self):
        assert_allclose(mat2_exp(np.zeros((2, 2))), ID2, atol=0)

    def test_diagonal(self):
        a = 0.7 - 0.3j
        out = mat2_exp(np.diag([a, -a]))
        assert_allclose(out, np.diag([np.exp(a), np.exp(-a)]), rtol=1e-14, atol=1e-14)

    def test_against_taylor_oracle(self, rng):
        worst = 0.0
        for _ in range(200):
            A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            A *= rng.uniform(0, 5) / max(np.linalg.norm(A), 1e-12)
            worst = max(worst, np.abs(mat2_exp(A) - taylor_expm(A)).max())
        assert worst < 1e-12

    def test_small_delta_series_branch(self):
        # near-degenerate eigenvalues exercise the sinhc series
        A = np.array([[1.0, 1e-6], [1e-7, 1.0 + 1e-9]], dtype=complex)
        assert_allclose(mat2_exp(A), taylor_expm(A), rtol=1e-13, atol=1e-13)

    def test_liouville_identity(self, rng):
        for _ in range(200):
            A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            A *= rng.uniform(0, 5) / max(np.linalg.norm(A), 1e-12)
            det = np.linalg.det(mat2_exp(A))
            expect = np.exp(np.trace(A))
            assert abs(det - expect) < 1e-12 * abs(expect)


@pytest.mark.parametrize("direction", ["forward", "inverse"])
def test_conjugate_by_u_rejects_bad_direction(direction):
    conjugate_by_U(ID2, direction)  # valid ones pass
    with pytest.raises(ValueError):
        conjugate_by_U(ID2, "sideways")
