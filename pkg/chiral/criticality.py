"""
Chiral Dicke lab - Gap closing at the superradiant transition

Analytic slope and square-root prefactor of the lowest normal-phase branch,
the signed lower polariton along the critical circle, and numerical
log-log fits of the gap exponent z*nu.

All closed forms use omega_c_tilde = omega_c - UN/2: at and below g_c the
fluctuation blocks are the U = 0 ones with omega_c renormalised.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats

from . import bogoliubov, meanfield
from .constants import (
    DEFAULT_FIT_POINTS,
    DEFAULT_FIT_WINDOW,
    DEGENERACY_TOL,
    MAX_FIT_WINDOW,
    MIN_FIT_POINTS,
    MIN_R_SQUARED,
    VANISHING_RATIO,
    Side,
)
from .exceptions import BranchError, FitError, NoDegeneracyError, ParameterError, SingularSlopeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CriticalFit:
    """
    Result of log(gap) = log(prefactor) + z_nu * log|g_c - g|.

    window is the relative distance (g_c - g)/g_c, lower edge first.
    """

    z_nu: float
    prefactor: float
    window: tuple
    r_squared: float
    side: str
    phi: float = None
    points: int = DEFAULT_FIT_POINTS
    warnings: tuple = field(default=())

    @property
    def poor_fit(self):
        return self.r_squared < MIN_R_SQUARED


def _detuning(p, phi):
    return p.omega_c_tilde + math.cos(2 * phi) * p.omega_z


def analytic_slope(p, phi):
    """Linear gap slope 2 g_c / |omega_c_tilde + cos(2 phi) omega_z| of the lowest branch below g_c"""
    detuning = _detuning(p, phi)
    if abs(detuning) <= DEGENERACY_TOL * max(p.omega_c_tilde, p.omega_z):
        raise SingularSlopeError(
            f"phi = {phi!r} sits on the degeneracy line; the gap closes as a square root, use analytic_sqrt_prefactor"
        )
    return 2 * meanfield.critical_coupling(p) / abs(detuning)


def degeneracy_angle(p):
    """phi* = arccos(-omega_c_tilde/omega_z)/2, or None when omega_z < omega_c_tilde"""
    ratio = p.omega_c_tilde / p.omega_z
    if ratio > 1.0:
        return None
    return 0.5 * math.acos(-ratio)


def analytic_sqrt_prefactor(p, phi=None, side=Side.FROM_NORMAL):
    """
    Prefactor of the square-root gap closing on the degeneracy line:
    sqrt(2) omega_c_tilde / sqrt(g_c) below g_c, 2 omega_c / sqrt(g_c) above
    (the latter for U = 0 only).
    """
    if degeneracy_angle(p) is None:
        raise NoDegeneracyError(
            f"cos(2 phi) = -omega_c_tilde/omega_z has no solution for omega_z={p.omega_z} < omega_c_tilde={p.omega_c_tilde}"
        )
    if phi is not None and abs(math.cos(2 * phi) + p.omega_c_tilde / p.omega_z) > DEGENERACY_TOL:
        raise ParameterError(f"phi = {phi!r} is not on the degeneracy line (phi* = {degeneracy_angle(p)!r})")

    root_gc = math.sqrt(meanfield.critical_coupling(p))
    if side == Side.FROM_NORMAL:
        return math.sqrt(2) * p.omega_c_tilde / root_gc
    if p.U != 0.0:
        raise ParameterError("The superradiant-side prefactor is only known in closed form for U = 0")
    return 2 * p.omega_c / root_gc


def critical_line_polariton(p, phi):
    """
    Signed lower polariton eps_- on the critical circle g = g_c.

    There eps_- eps_+ = omega_c_tilde |omega_c_tilde + omega_z cos(2 phi)|;
    dividing by eps_+ avoids the cancellation in the difference of roots and
    keeps the sign, so the zero is a sign change.
    """
    w = p.omega_c_tilde
    wz = p.omega_z
    cos2 = math.cos(2 * phi)
    shifted = w * (w + wz * cos2)
    c2 = wz * wz + 2 * w * w + 2 * wz * w * cos2
    upper = (c2 + math.sqrt(max(c2 * c2 - 4 * shifted * shifted, 0.0))) / 2
    if upper <= 0.0:
        return 0.0
    return shifted / math.sqrt(upper)


def locate_critical_zero(p, xtol=1e-14):
    """Zero of the signed eps_-(phi) on [0, pi/2], or None when the branch never closes"""
    lower, upper = 0.0, math.pi / 2
    at_lower = critical_line_polariton(p, lower)
    at_upper = critical_line_polariton(p, upper)
    if at_lower == 0.0:
        return lower
    if at_upper == 0.0:
        return upper
    if at_lower * at_upper > 0:
        return None
    return optimize.brentq(lambda phi: critical_line_polariton(p, phi), lower, upper, xtol=xtol)


def _check_window(window, points):
    lower, upper = window
    if not (0.0 < lower < upper <= MAX_FIT_WINDOW):
        raise FitError(f"Fit window {window!r} must satisfy 0 < lower < upper <= {MAX_FIT_WINDOW}")
    if points < MIN_FIT_POINTS:
        raise FitError(f"At least {MIN_FIT_POINTS} sample points are needed, got {points}")


def gap_at(p, side):
    """Lowest non-Goldstone mode at p on the given side of the transition"""
    if side == Side.FROM_NORMAL:
        result = bogoliubov.spectrum_charpoly_normal(p)
    elif p.U == 0.0:
        result = bogoliubov.spectrum_charpoly_superradiant(p)
    else:
        result = bogoliubov.spectrum(p, cross_check=False)
    if not result.stable:
        raise FitError(f"Spectrum is unstable at g={p.g!r}, side {side}")
    return result.gap


def gap_samples(p, phi, side=Side.FROM_NORMAL, window=DEFAULT_FIT_WINDOW, points=DEFAULT_FIT_POINTS):
    """
    (distance, gap) arrays with distance = |g_c - g| log-spaced over the
    relative window on the requested side of the transition.
    """
    side = Side(side)
    gc = meanfield.critical_coupling(p)
    relative = np.logspace(math.log10(window[0]), math.log10(window[1]), points)
    sign = -1.0 if side == Side.FROM_NORMAL else 1.0
    gaps = np.array([gap_at(p.with_polar(gc * (1 + sign * r), phi), side) for r in relative])
    return gc * relative, gaps


def fit_exponent(p, phi, side=Side.FROM_NORMAL, window=DEFAULT_FIT_WINDOW, points=DEFAULT_FIT_POINTS):
    """
    Least-squares fit of log(gap) against log|g_c - g| on the lowest branch
    that is not a Goldstone mode. A fit whose gap does not shrink across the
    window (the lower polariton stays open above g_c away from phi*) raises
    BranchError.
    """
    side = Side(side)
    window = (float(window[0]), float(window[1]))
    _check_window(window, points)

    distance, gaps = gap_samples(p, phi, side, window, points)
    if np.any(gaps <= 0.0):
        raise FitError(f"Gap vanished numerically inside the window {window!r} at phi={phi!r}")
    if gaps[0] / gaps[-1] > VANISHING_RATIO:
        raise BranchError(
            f"No branch vanishes in window {window!r} at phi={phi!r} ({side}): gap {gaps[0]!r} -> {gaps[-1]!r}"
        )

    fit = stats.linregress(np.log(distance), np.log(gaps))
    r_squared = float(fit.rvalue ** 2)
    warnings = ()
    if r_squared < MIN_R_SQUARED:
        message = f"Poor fit at phi={phi!r}: r^2 = {r_squared:.6f} < {MIN_R_SQUARED}"
        logger.warning(message)
        warnings = (message,)
    return CriticalFit(
        z_nu=float(fit.slope),
        prefactor=float(math.exp(fit.intercept)),
        window=window,
        r_squared=r_squared,
        side=side.value,
        phi=float(phi),
        points=points,
        warnings=warnings,
    )


def analytic_reference(p, phi):
    """(exponent, prefactor) the closed forms predict below g_c: linear away from phi*, square root on it"""
    try:
        return 1.0, analytic_slope(p, phi)
    except SingularSlopeError:
        return 0.5, analytic_sqrt_prefactor(p)


def exponent_map(p, phis, window=DEFAULT_FIT_WINDOW, points=DEFAULT_FIT_POINTS):
    """One below-g_c fit per angle"""
    return [fit_exponent(p, phi, Side.FROM_NORMAL, window, points) for phi in phis]
