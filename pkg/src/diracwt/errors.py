"""Exception types shared across the package."""


class DiracwtError(Exception):
    """Base class for all package errors."""


class WrongSideError(DiracwtError):
    """A potential arrived in the wrong representation (Dirac vs Hamiltonian)."""


class PotentialFormatError(DiracwtError):
    """Malformed potential file; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NotInSplitPlane(DiracwtError):
    """Spectral parameter sits on a branch cut and no cut side was selected."""


class MFunctionPole(DiracwtError):
    """The half-line coefficient has a pole at the requested point."""


class ChannelDegenerate(DiracwtError):
    """Tail generator eigenvalues have equal real part: no decaying channel."""


class DegenerateWronskian(DiracwtError):
    """m_- coincides with m_+; the whole-line Green construction degenerates."""


class CoincidentPoints(DiracwtError):
    """Green matrix requested on the diagonal x == x'."""


class NonConvergence(DiracwtError):
    """A limit (quadrature refinement or the epsilon ladder) failed to settle."""

    def __init__(self, message, trail=None):
        super().__init__(message)
        self.trail = trail


class QuadratureError(NonConvergence):
    """Adaptive quadrature hit the depth cap before reaching tolerance."""


class ConfigError(DiracwtError):
    """Invalid CLI configuration."""
