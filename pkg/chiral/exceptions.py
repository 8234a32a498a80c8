"""
Chiral Dicke lab - Exception hierarchy

Every solver error derives from ChiralDickeError so that sweeps can turn a
failing grid point into an error row without aborting the whole run.
"""


class ChiralDickeError(Exception):
    """Base class for all errors raised by the laboratory"""


class ParameterError(ChiralDickeError, ValueError):
    """A parameter set violates a construction guard or an operation's precondition"""


class DomainError(ChiralDickeError):
    """Condensate occupation outside the Holstein-Primakoff domain 0 <= |alpha3|^2 < N"""


class SingularityError(ChiralDickeError):
    """The dressed cavity frequency in a denominator vanished or turned negative"""


class PairingError(ChiralDickeError):
    """Dynamical-matrix eigenvalues could not be matched into +/- pairs"""

    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class ConsistencyError(ChiralDickeError):
    """Two independent spectrum routes disagree"""

    def __init__(self, message, matrix_spectrum=None, charpoly_spectrum=None):
        super().__init__(message)
        self.matrix_spectrum = matrix_spectrum
        self.charpoly_spectrum = charpoly_spectrum


class SingularSlopeError(ChiralDickeError):
    """The linear gap slope diverges on the degeneracy line"""


class NoDegeneracyError(ChiralDickeError):
    """The degeneracy condition cos(2 phi) = -omega_c/omega_z has no solution"""


class FitError(ChiralDickeError):
    """Exponent fit could not be set up (bad window, too few points)"""


class BranchError(FitError):
    """No spectral branch vanishes inside the requested fit window"""


class ResourceError(ChiralDickeError):
    """Exact-diagonalization basis exceeds the configured memory budget"""


class SolverError(ChiralDickeError):
    """An eigensolver did not converge"""
