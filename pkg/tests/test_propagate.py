import numpy as np
import pytest
from numpy.testing import assert_allclose

from diracwt import (ID2, SIGMA4, UMAT, UMAT_INV, BoundaryFrame, Conjugation,
                     Model, ScalarPotential, Side, apply_conjugation,
                     build_matrix_potential, cell_transfer,
                     fundamental_matrix, fundamental_matrix_grid,
                     rk4_reference, to_hamiltonian_potential, wronskian_drift)
from diracwt.potential import MatrixPotential
from diracwt.propagate import generator

from conftest import bump_potential, random_potential


def mp_of(model, pot, side=Side.DIRAC):
    q = build_matrix_potential(model, pot)
    return q if side is Side.DIRAC else to_hamiltonian_potential(q)


class TestCellTransfer:
    def test_free_dirac_diagonal(self):
        z, L = 0.7 - 0.2j, 1.3
        T = cell_transfer(np.zeros((2, 2)), z, L, Side.DIRAC)
        assert_allclose(T, np.diag([np.exp(-1j * z * L), np.exp(1j * z * L)]), atol=1e-15)

    def test_free_hamiltonian_rotation(self):
        lam, L = 0.9, 0.6
        T = cell_transfer(np.zeros((2, 2)), lam, L, Side.HAMILTONIAN)
        c, s = np.cos(lam * L), np.sin(lam * L)
        assert_allclose(T, np.array([[c, s], [-s, c]]), atol=1e-15)

    def test_constant_defocusing_vs_rk4_and_eigenvalues(self):
        pot = ScalarPotential.constant(1.0)
        mp = mp_of(Model.DEFOCUSING, pot)
        z = 2j
        T = cell_transfer(mp.regions[0], z, 1.0, Side.DIRAC)
        Trk = rk4_reference(mp, z, 1.0, BoundaryFrame()).value @ np.linalg.inv(BoundaryFrame().frame(Side.DIRAC))
        assert np.abs(T - Trk).max() < 1e-10
        eigs = np.sort_complex(np.linalg.eigvals(generator(z, mp.regions[0], Side.DIRAC)))
        # -+ i * sqrt(z^2 - |q0|^2) = -+ i * (i sqrt 5) = +- sqrt 5
        assert_allclose(eigs, [-np.sqrt(5), np.sqrt(5)], atol=1e-12)

    def test_semigroup(self, rng):
        pot = random_potential(rng)
        mp = mp_of(Model.FOCUSING, pot)
        Q = mp.regions[2]
        z = 1.1 + 0.3j
        T1 = cell_transfer(Q, z, 0.4)
        T2 = cell_transfer(Q, z, 0.9)
        assert np.abs(T2 @ T1 - cell_transfer(Q, z, 1.3)).max() < 1e-12

    def test_negative_length_inverse(self, rng):
        pot = random_potential(rng)
        Q = mp_of(Model.DEFOCUSING, pot).regions[1]
        z = -0.5 + 0.8j
        T = cell_transfer(Q, z, 0.7)
        Tinv = cell_transfer(Q, z, -0.7)
        assert np.abs(Tinv @ T - ID2).max() < 1e-12


class TestFundamentalMatrix:
    def test_free_hamiltonian_identity_at_zero(self):
        mp = mp_of(Model.DEFOCUSING, ScalarPotential.constant(0.0), Side.HAMILTONIAN)
        F = fundamental_matrix(mp, 1j, 0.0, BoundaryFrame(0.0))
        assert_allclose(F.value, ID2, atol=1e-15)

    def test_dirac_frame_columns(self):
        mp = mp_of(Model.DEFOCUSING, ScalarPotential.constant(0.5), Side.DIRAC)
        for theta in (0.0, 0.7, 4.0):
            F = fundamental_matrix(mp, 2j, 0.0, BoundaryFrame(theta))
            a = np.array([np.cos(theta), np.sin(theta)])
            assert_allclose(F.theta_column, UMAT_INV @ a, atol=1e-15)
            assert_allclose(F.phi_column, UMAT_INV @ (-(SIGMA4 @ a)), atol=1e-15)

    def test_determinant_constant_in_x(self, rng):
        pot = random_potential(rng)
        for model in (Model.DEFOCUSING, Model.FOCUSING):
            mp = mp_of(model, pot)
            F = fundamental_matrix_grid(mp, 0.8 + 0.6j, np.array([-3.0, -1.0, 2.0, 7.0]))
            dets = np.linalg.det(F)
            assert np.abs(dets - dets[0]).max() < 1e-10

    def test_side_equivalence(self, rng):
        pot = random_potential(rng)
        z = 1.4 - 0.9j
        frame = BoundaryFrame(0.4)
        xs = np.linspace(-2.5, 2.5, 11)
        for model in (Model.DEFOCUSING, Model.FOCUSING):
            FD = fundamental_matrix_grid(mp_of(model, pot, Side.DIRAC), z, xs, frame)
            FH = fundamental_matrix_grid(mp_of(model, pot, Side.HAMILTONIAN), z, xs, frame)
            assert np.abs(FH - np.einsum("ij,njk->nik", UMAT, FD)).max() < 1e-12


class TestRK4Oracle:
    def test_agreement_random_potentials(self, rng):
        for _ in range(3):
            pot = random_potential(rng)
            model = Model.FOCUSING if rng.uniform() < 0.5 else Model.DEFOCUSING
            mp = mp_of(model, pot)
            z = rng.uniform(-5, 5) + 1j * rng.uniform(-5, 5)
            x = rng.uniform(-5, 5)
            F = fundamental_matrix(mp, z, x).value
            Frk = rk4_reference(mp, z, x).value
            assert np.abs(F - Frk).max() < 1e-8

    def test_free_case(self):
        mp = mp_of(Model.DEFOCUSING, ScalarPotential.constant(0.0))
        z, x = 1.0 + 0.5j, 2.0
        F = rk4_reference(mp, z, x).value @ np.linalg.inv(BoundaryFrame().frame(Side.DIRAC))
        assert_allclose(F, np.diag([np.exp(-1j * z * x), np.exp(1j * z * x)]), atol=1e-8)

    def test_fourth_order_convergence(self):
        mp = mp_of(Model.FOCUSING, bump_potential())
        z, x = 2.0 + 1.0j, 1.5
        exact = fundamental_matrix(mp, z, x).value
        err = [np.abs(rk4_reference(mp, z, x, h=h).value - exact).max() for h in (0.05, 0.025)]
        assert err[0] / err[1] > 10  # ~16 for clean order 4


class TestConjugationMaps:
    @pytest.mark.parametrize("model,op", [(Model.FOCUSING, Conjugation.K),
                                          (Model.DEFOCUSING, Conjugation.J)])
    def test_wavefunction_map(self, rng, model, op):
        # conj-map of a z-solution solves at zbar: propagate both, compare.
        pot = random_potential(rng)
        mp = mp_of(model, pot)
        z = 1.2 + 0.7j
        frame = BoundaryFrame(0.3)
        for x in (0.8, -1.7):
            psi_x = fundamental_matrix(mp, z, x, frame).value[:, 0]
            mapped_at_x = apply_conjugation(op, psi_x)
            # solution at zbar with initial value K psi(0): coordinates in the zbar frame
            F0 = fundamental_matrix(mp, np.conj(z), 0.0, frame).value
            coeff = np.linalg.solve(F0, apply_conjugation(op, fundamental_matrix(mp, z, 0.0, frame).value[:, 0]))
            propagated = fundamental_matrix(mp, np.conj(z), x, frame).value @ coeff
            assert np.abs(propagated - mapped_at_x).max() < 1e-10

    def test_k_fails_for_defocusing(self, rng):
        # the swap of conjugations between the models is essential: K does
        # not map defocusing solutions to zbar-solutions (generic potential).
        pot = random_potential(rng)
        mp = mp_of(Model.DEFOCUSING, pot)
        z, x = 1.2 + 0.7j, 0.8
        psi_x = fundamental_matrix(mp, z, x).value[:, 0]
        F0 = fundamental_matrix(mp, np.conj(z), 0.0).value
        coeff = np.linalg.solve(F0, apply_conjugation(Conjugation.K, fundamental_matrix(mp, z, 0.0).value[:, 0]))
        propagated = fundamental_matrix(mp, np.conj(z), x).value @ coeff
        assert np.abs(propagated - apply_conjugation(Conjugation.K, psi_x)).max() > 1e-4


class TestWronskianLaw:
    def test_balanced_potential_constant(self, rng):
        pot = random_potential(rng)
        xs = np.linspace(-10, 10, 21)
        for model in (Model.DEFOCUSING, Model.FOCUSING):
            for z in (2j, 3.0 + 4.0j, -4.0 + 1.0j):
                assert wronskian_drift(mp_of(model, pot), z, xs=xs) < 1e-10

    def _shifted_diagonal(self, c):
        # Q11 - Q22 = c on every region
        M = np.array([[c, 0.4 - 0.2j], [0.1j, 0.0]], dtype=complex)
        return MatrixPotential(np.array([0.0]), np.stack([M, M]), Side.DIRAC)

    def test_exponential_growth_law(self):
        c = 0.8 + 0.5j
        mp = self._shifted_diagonal(c)
        frame = BoundaryFrame()
        z = 1.0 + 1.0j
        assert wronskian_drift(mp, z, frame, xs=np.linspace(-3, 3, 13)) < 1e-10
        for x in (0.7, -1.3, 2.2):
            F = fundamental_matrix_grid(mp, z, np.array([0.0, x]), frame)
            w0, wx = np.linalg.det(F[0]), np.linalg.det(F[1])
            assert abs(wx / w0 - np.exp(1j * c * x)) < 1e-10

    def test_real_imbalance_constant_magnitude(self):
        mp = self._shifted_diagonal(0.9)  # Im(Q11 - Q22) = 0
        F = fundamental_matrix_grid(mp, 0.5 + 0.5j, np.linspace(-4, 4, 9))
        mags = np.abs(np.linalg.det(F))
        assert np.abs(mags - mags[0]).max() < 1e-10

    def test_empty_xs_rejected(self):
        mp = mp_of(Model.DEFOCUSING, ScalarPotential.constant(1.0))
        with pytest.raises(ValueError):
            wronskian_drift(mp, 1j, xs=[])
