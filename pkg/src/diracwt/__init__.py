"""Weyl-Titchmarsh coefficients, Green's matrices, and spectral measures for
1-D self-adjoint and J-self-adjoint Dirac-type operators and their unitarily
equivalent Hamiltonian forms, with exact closed-form references for constant
potentials."""

from ._kernels import BACKEND
from .algebra import (ID2, SIGMA1, SIGMA3, SIGMA4, UMAT, UMAT_INV,
                      Conjugation, apply_conjugation, conjugate_by_U,
                      mat2_exp, wronskian)
from .errors import (ChannelDegenerate, CoincidentPoints, ConfigError,
                     DegenerateWronskian, DiracwtError, MFunctionPole,
                     NonConvergence, NotInSplitPlane, PotentialFormatError,
                     QuadratureError, WrongSideError)
from .greens import (GreenEvaluation, ResolventApplication, green_dirac,
                     green_hamiltonian, resolvent_apply)
from .potential import (MatrixPotential, Model, ScalarPotential, Side,
                        build_matrix_potential, jsa_check, load_potential,
                        parse_potential, to_hamiltonian_potential)
from .propagate import (BoundaryFrame, CutSide, FundamentalMatrix,
                        SpectralParameter, cell_transfer, fundamental_matrix,
                        fundamental_matrix_grid, rk4_reference,
                        wronskian_drift)
from .spectral import (QuadraticFormValue, SpectralMeasureSample,
                       TransformValue, blowup_norm, density_limit,
                       focusing_quadratic_form, omega_interval,
                       projection_via_stone, projection_via_transform,
                       stieltjes_density, transform_t0)
from .testfuncs import BumpKind, TestFunction
from .weyl import (BranchFn, MCoefficient, branch_sqrt, gamma_matrix,
                   jsym_residual, m_closed_form, m_matrix, m_numeric, m_pair)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ID2", "SIGMA1", "SIGMA3", "SIGMA4", "UMAT", "UMAT_INV",
    "Conjugation", "apply_conjugation", "conjugate_by_U", "mat2_exp", "wronskian",
    "ChannelDegenerate", "CoincidentPoints", "ConfigError", "DegenerateWronskian",
    "DiracwtError", "MFunctionPole", "NonConvergence", "NotInSplitPlane",
    "PotentialFormatError", "QuadratureError", "WrongSideError",
    "GreenEvaluation", "ResolventApplication", "green_dirac", "green_hamiltonian",
    "resolvent_apply",
    "MatrixPotential", "Model", "ScalarPotential", "Side", "build_matrix_potential",
    "jsa_check", "load_potential", "parse_potential", "to_hamiltonian_potential",
    "BoundaryFrame", "CutSide", "FundamentalMatrix", "SpectralParameter",
    "cell_transfer", "fundamental_matrix", "fundamental_matrix_grid",
    "rk4_reference", "wronskian_drift",
    "QuadraticFormValue", "SpectralMeasureSample", "TransformValue", "blowup_norm",
    "density_limit", "focusing_quadratic_form", "omega_interval",
    "projection_via_stone", "projection_via_transform", "stieltjes_density",
    "transform_t0",
    "BumpKind", "TestFunction",
    "BranchFn", "MCoefficient", "branch_sqrt", "gamma_matrix", "jsym_residual",
    "m_closed_form", "m_matrix", "m_numeric", "m_pair",
]
