import numpy as np
import pytest
from numpy.testing import assert_allclose

from diracwt import (Model, PotentialFormatError, ScalarPotential, Side,
                     WrongSideError, build_matrix_potential, conjugate_by_U,
                     jsa_check, parse_potential, to_hamiltonian_potential)
from diracwt.potential import MatrixPotential

from conftest import bump_potential


class TestBuild:
    def test_defocusing_unit(self):
        mp = build_matrix_potential(Model.DEFOCUSING, ScalarPotential.constant(1.0))
        expect = np.array([[0, -1j], [1j, 0]])
        for region in mp.regions:
            assert_allclose(region, expect, atol=0)

    def test_focusing_imaginary_unit(self):
        mp = build_matrix_potential(Model.FOCUSING, ScalarPotential.constant(1j))
        expect = np.array([[0, 1], [-1, 0]])
        for region in mp.regions:
            assert_allclose(region, expect, atol=0)

    def test_zero(self):
        for model in (Model.DEFOCUSING, Model.FOCUSING):
            mp = build_matrix_potential(model, ScalarPotential.constant(0.0))
            assert np.abs(mp.regions).max() == 0

    def test_general_rejected(self):
        with pytest.raises(ValueError):
            build_matrix_potential(Model.GENERAL_JSA, ScalarPotential.constant(1.0))


class TestHamiltonianSide:
    def test_defocusing_real_unit(self):
        mp = build_matrix_potential(Model.DEFOCUSING, ScalarPotential.constant(1.0))
        B = to_hamiltonian_potential(mp)
        assert_allclose(B.regions[0], np.array([[0, -1], [-1, 0]]), atol=1e-16)

    def test_focusing_real_unit(self):
        mp = build_matrix_potential(Model.FOCUSING, ScalarPotential.constant(1.0))
        B = to_hamiltonian_potential(mp)
        assert_allclose(B.regions[0], np.array([[-1j, 0], [0, 1j]]), atol=1e-16)

    def test_zero(self):
        mp = build_matrix_potential(Model.DEFOCUSING, ScalarPotential.constant(0.0))
        assert np.abs(to_hamiltonian_potential(mp).regions).max() == 0

    def test_round_trip(self, rng):
        pot = ScalarPotential(np.array([-1.0, 0.5, 2.0]),
                              rng.normal(size=2) + 1j * rng.normal(size=2),
                              0.3 - 0.1j, 1.0)
        for model in (Model.DEFOCUSING, Model.FOCUSING):
            Q = build_matrix_potential(model, pot)
            B = to_hamiltonian_potential(Q)
            for b_region, q_region in zip(B.regions, Q.regions):
                assert np.abs(conjugate_by_U(b_region, "inverse") - q_region).max() < 1e-15

    def test_structure(self, rng):
        q = rng.normal() + 1j * rng.normal()
        B_def = to_hamiltonian_potential(
            build_matrix_potential(Model.DEFOCUSING, ScalarPotential.constant(q))).regions[0]
        assert np.abs(B_def.imag).max() < 1e-15          # real
        assert abs(B_def[0, 1] - B_def[1, 0]) < 1e-15    # symmetric
        B_foc = to_hamiltonian_potential(
            build_matrix_potential(Model.FOCUSING, ScalarPotential.constant(q))).regions[0]
        assert np.abs((B_foc / 1j).imag).max() < 1e-15   # i * real
        assert abs(B_foc[0, 1] - B_foc[1, 0]) < 1e-15

    def test_wrong_side_rejected(self):
        mp = build_matrix_potential(Model.DEFOCUSING, ScalarPotential.constant(1.0))
        B = to_hamiltonian_potential(mp)
        with pytest.raises(WrongSideError):
            to_hamiltonian_potential(B)


class TestJsaCheck:
    def test_built_potentials_balanced(self, rng):
        for model in (Model.DEFOCUSING, Model.FOCUSING):
            q = rng.normal() + 1j * rng.normal()
            ok, imbalance = jsa_check(build_matrix_potential(model, ScalarPotential.constant(q)))
            assert ok and imbalance == 0

    def test_unbalanced_diagonal(self):
        M = np.array([[1.0, 0.0], [0.0, 2.0]], dtype=complex)
        mp = MatrixPotential(np.array([0.0]), np.stack([M, M]), Side.DIRAC)
        ok, imbalance = jsa_check(mp)
        assert not ok
        assert imbalance == 1.0

    def test_equal_complex_diagonal(self):
        c = 3 + 4j
        M = np.diag([c, c]).astype(complex)
        mp = MatrixPotential(np.array([0.0]), np.stack([M, M]), Side.DIRAC)
        ok, imbalance = jsa_check(mp)
        assert ok and imbalance == 0


class TestScalarPotential:
    def test_left_continuity(self):
        pot = bump_potential(values=(2.0,), breaks=(0.0, 1.0), tail=1.0)
        assert pot.value_at(0.0) == 2.0
        assert pot.value_at(1.0) == 1.0   # right tail starts at the last break
        assert pot.value_at(-1e-12) == 1.0
        assert_allclose(pot.value_at(np.array([0.5, 1.5, -3.0])), [2.0, 1.0, 1.0])

    def test_breakpoints_must_increase(self):
        with pytest.raises(ValueError):
            ScalarPotential(np.array([0.0, 0.0]), np.array([1.0 + 0j]), 0, 0)

    def test_sample_midpoints(self):
        pot = ScalarPotential.sample(lambda x: x ** 2, np.linspace(-1, 1, 5), 1.0, 1.0)
        mids = np.array([-0.75, -0.25, 0.25, 0.75])
        assert_allclose(pot.values, mids ** 2)

    def test_is_constant(self):
        assert ScalarPotential.constant(2j).is_constant
        assert not bump_potential().is_constant


class TestPotentialFile:
    def test_round_trip(self):
        pot = bump_potential(values=(2.0 + 0.5j,), breaks=(0.0, 1.0), tail=1.0)
        back = parse_potential(pot.to_text())
        assert_allclose(back.breakpoints, pot.breakpoints)
        assert_allclose(back.values, pot.values)
        assert back.q_left == pot.q_left and back.q_right == pot.q_right

    def test_parse_basic(self):
        text = """# a bump
tails 1 0 1 0
0.0 2.0 0.5
1.0 1 0
"""
        pot = parse_potential(text)
        assert_allclose(pot.breakpoints, [0.0, 1.0])
        assert pot.values[0] == 2.0 + 0.5j
        assert pot.q_left == 1.0 and pot.q_right == 1.0

    def test_missing_header(self):
        with pytest.raises(PotentialFormatError) as exc:
            parse_potential("0.0 1 0\n")
        assert exc.value.line == 1

    def test_bad_number_line_reported(self):
        with pytest.raises(PotentialFormatError) as exc:
            parse_potential("tails 0 0 0 0\n0.0 one 0\n")
        assert exc.value.line == 2

    def test_non_increasing_breaks(self):
        with pytest.raises(PotentialFormatError) as exc:
            parse_potential("tails 0 0 0 0\n1.0 1 0\n0.5 1 0\n")
        assert exc.value.line == 3

    def test_right_tail_mismatch(self):
        with pytest.raises(PotentialFormatError) as exc:
            parse_potential("tails 0 0 1 0\n0.0 1 0\n2.0 5 0\n")
        assert exc.value.line == 3

    def test_wrong_field_count(self):
        with pytest.raises(PotentialFormatError) as exc:
            parse_potential("tails 0 0 0 0\n0.0 1\n")
        assert exc.value.line == 2
