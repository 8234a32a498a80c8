"""
Chiral Dicke lab - Gaussian fluctuations around the mean-field state

The quadratic Hamiltonian

    H_B = sum_ij A_ij a_i^+ a_j + 1/2 B_ij a_i^+ a_j^+ + 1/2 B*_ij a_i a_j

is built for the two photon modes and the Holstein-Primakoff boson, in both
phases and for any dispersive coupling U. Its three excitation energies are
computed two ways: eigenvalues of the 6x6 dynamical matrix (always), and the
characteristic cubic in eps^2 (closed forms, U = 0 or normal phase).
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import meanfield
from .constants import (
    BRANCH_LABELS,
    DEGENERACY_TOL,
    GOLDSTONE_TOL,
    IMAG_TOL,
    NEGATIVE_ROOT_TOL,
    PAIRING_TOL,
    ROUTE_AGREEMENT_TOL,
    Phase,
)
from .cubic import real_cubic_roots
from .exceptions import ConsistencyError, DomainError, PairingError, ParameterError, SingularityError, SolverError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BogoliubovMatrices:
    """Hermitian A and symmetric B blocks; scale is omega_c, the unit tolerances refer to"""

    A: np.ndarray
    B: np.ndarray
    scale: float = 1.0


@dataclass(frozen=True)
class FluctuationSpectrum:
    """
    Three mode energies, ascending.

    Goldstone modes (below the Goldstone tolerance) are reported as exactly
    zero. For unstable points the real parts go into modes and the imaginary
    parts into growth_rates.
    """

    modes: tuple
    goldstone_count: int
    stable: bool
    branch_labels: tuple = None
    growth_rates: tuple = field(default=(0.0, 0.0, 0.0))
    route: str = "matrix"

    @property
    def gap(self):
        """Lowest mode that is not a Goldstone mode"""
        if self.goldstone_count >= len(self.modes):
            return 0.0
        return self.modes[self.goldstone_count]


def build_matrices(p, mf):
    """
    Coefficient blocks of the fluctuation Hamiltonian around mf.

    For |alpha3|^2 = 0 they reduce to the normal-phase blocks with omega_c
    replaced by omega_c_tilde; in the superradiant phase the photon modes see
    the dressed frequency omega_c_tilde + U|alpha3|^2.
    """
    x = float(mf.alpha3_abs2)
    n = float(p.N)
    if not (0.0 <= x < n):
        raise DomainError(f"Holstein-Primakoff breakdown: |alpha3|^2 = {x} with N = {p.N}")
    dressed = p.omega_c_tilde + p.U * x
    if dressed <= 0.0:
        raise SingularityError(f"Dressed cavity frequency {dressed} is not positive")

    coupling_sq = p.coupling_sq
    rest = n - x
    root_rest = math.sqrt(rest)
    dispersive = p.U * x * root_rest / dressed

    atomic = (
        p.omega_z
        + p.U * coupling_sq * x * rest / (n * dressed ** 2)
        + coupling_sq * x * (4 * n - 3 * x) / (2 * dressed * n * rest)
    )
    # Number-conserving and anomalous parts of the atom-photon vertex
    direct = ((2 * n - 3 * x) / (2 * root_rest) - dispersive) / math.sqrt(n)
    anomalous = (x / (2 * root_rest) + dispersive) / math.sqrt(n)
    squeezing = coupling_sq * x * (2 * n - x) / (4 * dressed * n * rest)

    phase = np.exp(2j * mf.theta)
    g1, g2 = p.g1, p.g2

    A = np.array(
        [
            [dressed, 0.0, g1 * direct],
            [0.0, dressed, -g2 * anomalous * np.conj(phase)],
            [g1 * direct, -g2 * anomalous * phase, atomic],
        ],
        dtype=complex,
    )
    B = np.array(
        [
            [0.0, 0.0, -g1 * anomalous * phase],
            [0.0, 0.0, g2 * direct],
            [-g1 * anomalous * phase, g2 * direct, 2 * squeezing * phase],
        ],
        dtype=complex,
    )
    return BogoliubovMatrices(A=A, B=B, scale=p.omega_c)


def dynamical_matrix(m):
    """(A, B; -B*, -A*) in units of m.scale"""
    A = m.A / m.scale
    B = m.B / m.scale
    return np.block([[A, B], [-B.conj(), -A.conj()]])


def _pair_eigenvalues(eigenvalues):
    order = sorted(range(len(eigenvalues)), key=lambda k: (-abs(eigenvalues[k]), -eigenvalues[k].real))
    pairs = []
    while order:
        i = order.pop(0)
        mismatch = [abs(eigenvalues[i] + eigenvalues[j]) for j in order]
        best = int(np.argmin(mismatch))
        if mismatch[best] > PAIRING_TOL:
            raise PairingError(
                f"Eigenvalue {eigenvalues[i]!r} has no partner within {PAIRING_TOL} (closest mismatch {mismatch[best]!r})",
                eigenvalues=eigenvalues,
            )
        j = order.pop(best)
        pairs.append((eigenvalues[i], eigenvalues[j]))
    return pairs


def _assemble(energies, growth, scale, route, labels=None):
    # energies/growth are in units of omega_c
    order = np.lexsort((growth, energies))
    energies = np.asarray(energies, dtype=float)[order]
    growth = np.asarray(growth, dtype=float)[order]

    threshold = GOLDSTONE_TOL * max(1.0, float(np.max(energies)))
    goldstone = np.hypot(energies, growth) < threshold
    energies[goldstone] = 0.0
    growth[goldstone] = 0.0
    stable = bool(np.all(growth <= IMAG_TOL))

    return FluctuationSpectrum(
        modes=tuple(float(e) * scale for e in energies),
        goldstone_count=int(np.count_nonzero(goldstone)),
        stable=stable,
        branch_labels=labels,
        growth_rates=tuple(float(r) * scale for r in growth),
        route=route,
    )


def eigenvalue_pairs(m):
    """The six dynamical-matrix eigenvalues matched into (+eps, -eps) pairs, units of m.scale"""
    try:
        eigenvalues = np.linalg.eigvals(dynamical_matrix(m))
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"Dynamical-matrix eigenvalues did not converge: {exc}") from exc
    return _pair_eigenvalues(eigenvalues)


def spectrum_matrix(m):
    """Excitation energies from the eigenvalues of the 6x6 dynamical matrix"""
    pairs = eigenvalue_pairs(m)
    energies = [(abs(a.real) + abs(b.real)) / 2 for a, b in pairs]
    growth = [(abs(a.imag) + abs(b.imag)) / 2 for a, b in pairs]
    return _assemble(energies, growth, m.scale, "matrix")


def characteristic_coefficients(m):
    """
    (c2, c1, c0) of eps^6 - c2 eps^4 + c1 eps^2 - c0 for real blocks, from
    M = (A - B)(A + B) whose eigenvalues are eps^2. Units of m.scale.
    """
    if np.abs(m.A.imag).max() > 0 or np.abs(m.B.imag).max() > 0:
        raise ParameterError("Characteristic coefficients need real blocks (gauge theta = 0)")
    lower = (m.A - m.B).real / m.scale
    upper = (m.A + m.B).real / m.scale
    product = lower @ upper
    c2 = float(np.trace(product))
    c1 = float((c2 ** 2 - np.trace(product @ product)) / 2)
    c0 = float(np.linalg.det(lower) * np.linalg.det(upper))
    return c2, c1, c0


def _from_squares(squares, scale, route, labels=None):
    squares = np.asarray(squares)
    if np.iscomplexobj(squares):
        roots = np.sqrt(squares.astype(complex))
        return _assemble(np.abs(roots.real), np.abs(roots.imag), scale, route, labels)
    energies, growth = [], []
    for value in squares:
        if value >= -NEGATIVE_ROOT_TOL:
            energies.append(math.sqrt(max(value, 0.0)))
            growth.append(0.0)
        else:
            energies.append(0.0)
            growth.append(math.sqrt(-value))
    spectrum = _assemble(energies, growth, scale, route, labels)
    if not spectrum.stable:
        logger.debug(f"{route}: negative eps^2 roots {squares!r}, reporting an instability")
    return spectrum


def normal_charpoly_coefficients(p):
    """Cubic in eps^2 for the normal-phase blocks, omega_c -> omega_c_tilde, units of omega_c"""
    q = p.normalized()
    w = q.omega_c_tilde
    shifted = w * w + q.g1 ** 2 - q.g2 ** 2
    c2 = q.omega_z ** 2 + 2 * shifted
    c1 = 2 * q.omega_z ** 2 * w * w + shifted ** 2 - 2 * q.omega_z * w * q.coupling_sq
    c0 = w * w * (q.coupling_sq - q.omega_z * w) ** 2
    return c2, c1, c0


def normal_signed_coefficients(p):
    """
    (c2, c1, c0) of the factor P(eps) = eps^3 - c2 eps^2 + c1 eps - c0 with
    P(eps) P(-eps) = -(cubic in eps^2). Its roots are the eigenvalues of the
    closed (a1, b, a2^+) block, so the two members of a degenerate pair come
    out as +eps and -eps instead of a double root. Units of omega_c.
    """
    q = p.normalized()
    w = q.omega_c_tilde
    shifted = w * w + q.g1 ** 2 - q.g2 ** 2
    return q.omega_z, -shifted, w * (q.coupling_sq - q.omega_z * w)


def spectrum_charpoly_normal(p):
    """
    Normal-phase spectrum from the closed-form characteristic polynomial.

    The cubic in eps^2 is solved through its signed factor: the three roots
    lambda_i give eps_i^2 = lambda_i^2. Above g_c the normal state is a
    saddle, the factor acquires a complex pair and that is reported through
    stable = False.
    """
    roots, real = real_cubic_roots(*normal_signed_coefficients(p))
    if real:
        squares = roots * roots
    else:
        squares = roots.astype(complex) ** 2
    return _from_squares(squares, p.omega_c, "charpoly_normal")


def superradiant_charpoly_coefficients(p):
    """
    (c2, c1, c0) of the U = 0 superradiant cubic in eps^2, units of omega_c.
    The constant term vanishes identically (Goldstone root).
    """
    q = p.normalized()
    s = q.coupling_sq
    wz = q.omega_z
    imbalance = q.g1 ** 2 - q.g2 ** 2
    c2 = 2.0 + s * s + 2 * wz * imbalance / s
    c1 = 1.0 + s * s + 2 * wz * imbalance / s - 4 * wz ** 2 * q.g1 ** 2 * q.g2 ** 2 / (s * s)
    return c2, c1, 0.0


def spectrum_charpoly_superradiant(p):
    """Goldstone mode plus the two dispersive polaritons eps_-, eps_+ in closed form (U = 0 only)"""
    if p.U != 0.0:
        raise ParameterError("The superradiant closed form exists only for U = 0; use spectrum_matrix")
    if meanfield.mu_tilde(p) >= 1.0:
        raise ParameterError(f"Parameters are not superradiant (mu = {meanfield.mu_tilde(p)})")

    q = p.normalized()
    s = q.coupling_sq
    wz = q.omega_z
    c2, c1, _ = superradiant_charpoly_coefficients(p)
    # s^4 + 4 wz (g1^4 - g2^4) + 4 wz^2 as a sum of squares; it vanishes only where eps_- = eps_+
    root = math.hypot(s * s + 2 * wz * (q.g1 ** 2 - q.g2 ** 2) / s, 4 * wz * q.g1 * q.g2 / s)
    upper = (c2 + root) / 2
    lower = c1 / upper  # product of the two nonzero roots, free of the b - sqrt(b^2 - 4c) cancellation
    return _from_squares([0.0, lower, upper], p.omega_c, "charpoly_superradiant", BRANCH_LABELS)


def limiting_branches(p):
    """
    Normal-phase (eps_-, eps_+) when one coupling vanishes; the photon mode
    of the vanishing coupling decouples at omega_c_tilde.
    """
    w = p.omega_c_tilde
    wz = p.omega_z
    base = wz * wz + w * w
    if p.g1 == 0.0:
        g_sq = p.g2 ** 2
        trace = base - 2 * g_sq
        radicand = (wz * wz - w * w) ** 2 - 4 * g_sq * (wz - w) ** 2
    elif p.g2 == 0.0:
        g_sq = p.g1 ** 2
        trace = base + 2 * g_sq
        radicand = (wz * wz - w * w) ** 2 + 4 * g_sq * (wz + w) ** 2
    else:
        raise ParameterError("Limiting branches need g1 = 0 or g2 = 0")
    upper = (trace + math.sqrt(max(radicand, 0.0))) / 2
    lower = (g_sq - wz * w) ** 2 / upper
    return math.sqrt(max(lower, 0.0)), math.sqrt(upper)


def degenerate_branches(p, g=None):
    """On cos(2 phi) = -omega_c_tilde/omega_z: (omega_z, sqrt(w^2 - g^2 w/omega_z)), the latter doubly degenerate"""
    w = p.omega_c_tilde
    if g is None:
        g = p.g
        imbalance = p.g1 ** 2 - p.g2 ** 2
        if abs(imbalance + g * g * w / p.omega_z) > DEGENERACY_TOL * max(1.0, g * g):
            raise ParameterError("Couplings are not on the degeneracy line cos(2 phi) = -omega_c_tilde/omega_z")
    return p.omega_z, math.sqrt(max(w * w - g * g * w / p.omega_z, 0.0))


def gaussian_ground_energy(m, spectrum):
    """Zero-point shift of the quadratic Hamiltonian: (sum eps - tr A)/2"""
    return 0.5 * (sum(spectrum.modes) - float(np.trace(m.A).real))


def route_mismatch(matrix_route, charpoly_route, scale):
    """Largest absolute mode difference in units of scale; infinite if the routes disagree on stability"""
    if matrix_route.stable != charpoly_route.stable:
        return math.inf
    return max(abs(a - b) for a, b in zip(matrix_route.modes, charpoly_route.modes)) / scale


def spectrum(p, cross_check=True):
    """
    Ground-state fluctuation spectrum of p through the dynamical-matrix
    route; at U = 0 the closed-form route is evaluated too and both must
    agree to ROUTE_AGREEMENT_TOL (units of omega_c).
    """
    mf = meanfield.solve(p)
    matrices = build_matrices(p, mf)
    result = spectrum_matrix(matrices)
    superradiant = mf.phase == Phase.SUPERRADIANT
    if superradiant:
        result = FluctuationSpectrum(
            modes=result.modes,
            goldstone_count=result.goldstone_count,
            stable=result.stable,
            branch_labels=BRANCH_LABELS,
            growth_rates=result.growth_rates,
            route=result.route,
        )

    if cross_check and p.U == 0.0:
        reference = spectrum_charpoly_superradiant(p) if superradiant else spectrum_charpoly_normal(p)
        mismatch = route_mismatch(result, reference, p.omega_c)
        if mismatch > ROUTE_AGREEMENT_TOL:
            raise ConsistencyError(
                f"Spectrum routes disagree by {mismatch!r} at {p!r}: matrix {result.modes}, charpoly {reference.modes}",
                matrix_spectrum=result,
                charpoly_spectrum=reference,
            )
    return result
