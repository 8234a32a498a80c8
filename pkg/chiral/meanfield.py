"""
Chiral Dicke lab - Mean-field ground state

After the Holstein-Primakoff mapping the collective spin becomes a boson a3;
shifting every mode by its condensate amplitude and eliminating the photon
amplitudes leaves an energy landscape that depends on |alpha3|^2 only. This
module minimises it, labels the phase and classifies stationary points.
"""

import cmath
import logging
import math
from dataclasses import dataclass, replace

from .constants import CRITICAL_BAND, FLAT_CURVATURE_TOL, STATIONARITY_TOL, Phase, Stability
from .exceptions import ConsistencyError, DomainError, SingularityError
from .params import ModelParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeanFieldSolution:
    """
    Condensate amplitudes of one stationary point.

    energy_per_atom is E_G/N with the constant -omega_z/2 per atom left out;
    absolute_energy_per_atom restores it.
    """

    alpha3_abs2: float
    theta: float
    alpha1: complex
    alpha2: complex
    phase: str
    energy_per_atom: float
    mu_tilde: float
    params: ModelParams

    @property
    def alpha3(self):
        return math.sqrt(self.alpha3_abs2) * cmath.exp(1j * self.theta)

    @property
    def photon_occupations(self):
        return abs(self.alpha1) ** 2, abs(self.alpha2) ** 2

    @property
    def absolute_energy_per_atom(self):
        return self.energy_per_atom - self.params.omega_z / 2

    def rotated(self, theta):
        """The same solution in another U(1) gauge: a1 -> e^{i t} a1, a2 -> e^{-i t} a2, a3 -> e^{i t} a3"""
        shift = theta - self.theta
        return replace(
            self,
            theta=theta,
            alpha1=self.alpha1 * cmath.exp(1j * shift),
            alpha2=self.alpha2 * cmath.exp(-1j * shift),
        )


def mu_tilde(p):
    """omega_z * omega_c_tilde / (g1^2 + g2^2); infinite without coupling"""
    if p.coupling_sq == 0.0:
        return math.inf
    return p.omega_z * p.omega_c_tilde / p.coupling_sq


def critical_coupling(p):
    """Radius g_c = sqrt(omega_z * omega_c_tilde) of the normal region in the (g1, g2) plane"""
    return math.sqrt(p.omega_z * p.omega_c_tilde)


def _dressed_cavity(p, alpha3_abs2):
    return p.omega_c_tilde + p.U * alpha3_abs2


def _energy(p, alpha3_abs2):
    # Unchecked landscape; finite differences may step slightly outside [0, N)
    n = float(p.N)
    return p.omega_z * alpha3_abs2 - p.coupling_sq * alpha3_abs2 * (n - alpha3_abs2) / (
        n * _dressed_cavity(p, alpha3_abs2)
    )


def _check_domain(p, alpha3_abs2):
    if not (0.0 <= alpha3_abs2 < p.N):
        raise DomainError(f"|alpha3|^2 = {alpha3_abs2} outside the Holstein-Primakoff domain [0, {p.N})")
    if _dressed_cavity(p, alpha3_abs2) <= 0.0:
        raise SingularityError(
            f"Dressed cavity frequency omega_c_tilde + U|alpha3|^2 = {_dressed_cavity(p, alpha3_abs2)} is not positive"
        )


def effective_energy(p, alpha3_abs2):
    """Mean-field energy after eliminating the photon amplitudes, as a function of |alpha3|^2"""
    alpha3_abs2 = float(alpha3_abs2)
    _check_domain(p, alpha3_abs2)
    return _energy(p, alpha3_abs2)


def energy_gradient(p, alpha3_abs2):
    """Analytic derivative dE_G/d|alpha3|^2"""
    x = float(alpha3_abs2)
    _check_domain(p, x)
    n = float(p.N)
    w = p.omega_c_tilde
    dressed = _dressed_cavity(p, x)
    return p.omega_z - p.coupling_sq * (n * w - 2 * w * x - p.U * x * x) / (n * dressed ** 2)


def meanfield_energy(p, alpha1, alpha2, alpha3):
    """Mean-field functional before the photon amplitudes are eliminated"""
    x = abs(alpha3) ** 2
    _check_domain(p, x)
    photons = abs(alpha1) ** 2 + abs(alpha2) ** 2
    reduction = math.sqrt((p.N - x) / p.N)
    coupling = p.g1 * (alpha1 * alpha3.conjugate() + alpha1.conjugate() * alpha3) + p.g2 * (
        alpha2 * alpha3 + alpha2.conjugate() * alpha3.conjugate()
    )
    return (p.omega_c_tilde * photons + p.omega_z * x + p.U * x * photons + reduction * coupling).real


def superradiant_occupation(p, mu=None):
    """
    Nonzero stationary |alpha3|^2 for mu_tilde < 1.

    Written as wN(1 - mu)/((w + mu UN)(sqrt(r) + 1)) with
    r = (w + UN)/(w + mu UN), which is the rationalised form of
    (w/U)(sqrt(r) - 1) and reduces to N(1 - mu)/2 at U = 0 without a 0/0.
    """
    if mu is None:
        mu = mu_tilde(p)
    w = p.omega_c_tilde
    un = p.UN
    ratio = (w + un) / (w + mu * un)
    return w * p.N * (1.0 - mu) / ((w + mu * un) * (math.sqrt(ratio) + 1.0))


def _photon_amplitudes(p, alpha3_abs2, theta):
    # Stationarity of the functional in alpha1*, alpha2*
    dressed = _dressed_cavity(p, alpha3_abs2)
    reduction = math.sqrt(1.0 - alpha3_abs2 / p.N)
    alpha3 = math.sqrt(alpha3_abs2) * cmath.exp(1j * theta)
    alpha1 = -p.g1 * reduction * alpha3 / dressed
    alpha2 = -p.g2 * reduction * alpha3.conjugate() / dressed
    return complex(alpha1), complex(alpha2)


def _build_solution(p, alpha3_abs2, phase, mu):
    alpha1, alpha2 = _photon_amplitudes(p, alpha3_abs2, 0.0)
    return MeanFieldSolution(
        alpha3_abs2=alpha3_abs2,
        theta=0.0,
        alpha1=alpha1,
        alpha2=alpha2,
        phase=phase,
        energy_per_atom=effective_energy(p, alpha3_abs2) / p.N,
        mu_tilde=mu,
        params=p,
    )


def trivial_solution(p):
    """The alpha = 0 stationary point, whether or not it is the ground state"""
    return _build_solution(p, 0.0, Phase.NORMAL, mu_tilde(p))


def solve(p):
    """Mean-field ground state, gauge fixed to theta = 0 (alpha3 real and nonnegative)"""
    mu = mu_tilde(p)
    if abs(mu - 1.0) <= CRITICAL_BAND:
        logger.debug(f"mu_tilde={mu!r} inside the critical band, returning the critical point")
        return _build_solution(p, 0.0, Phase.CRITICAL, mu)
    if mu > 1.0:
        return _build_solution(p, 0.0, Phase.NORMAL, mu)

    alpha3_abs2 = superradiant_occupation(p, mu)
    _check_domain(p, alpha3_abs2)

    gradient = energy_gradient(p, alpha3_abs2)
    scale = p.omega_z + p.coupling_sq / p.omega_c_tilde
    if abs(gradient) > STATIONARITY_TOL * scale:
        raise ConsistencyError(
            f"Superradiant occupation {alpha3_abs2} is not stationary: gradient {gradient} (scale {scale})"
        )
    return _build_solution(p, alpha3_abs2, Phase.SUPERRADIANT, mu)


def _curvature_along_amplitude(p, amplitude, step):
    def second_difference(h):
        return (
            _energy(p, (amplitude + h) ** 2) - 2 * _energy(p, amplitude ** 2) + _energy(p, (amplitude - h) ** 2)
        ) / (h * h)

    # Richardson extrapolation removes the O(h^2) term
    return (4 * second_difference(step / 2) - second_difference(step)) / 3


def classify_stability(p, alpha3_abs2):
    """
    Minimum / Maximum / Saddle-Flat from the curvature of E along the
    condensate amplitude |alpha3|. E depends on |alpha3|^2, so it is even in
    the amplitude and the trivial point is an interior point of the scan.
    """
    alpha3_abs2 = float(alpha3_abs2)
    _check_domain(p, alpha3_abs2)
    amplitude = math.sqrt(alpha3_abs2)
    edge = math.sqrt(p.N)
    step = min(1e-2 * edge, (edge - amplitude) / 4)
    curvature = _curvature_along_amplitude(p, amplitude, step)
    if abs(curvature) < FLAT_CURVATURE_TOL:
        return Stability.FLAT
    return Stability.MINIMUM if curvature > 0 else Stability.MAXIMUM
