"""
Chiral Dicke lab - Exact diagonalization oracle

Finite-N diagonalization of the full two-mode Hamiltonian

    H = omega_c (n1 + n2) + omega_z S^z + U S^z (n1 + n2)
        + g1/sqrt(N) (a1 S^+ + a1^+ S^-) + g2/sqrt(N) (a2 S^- + a2^+ S^+)

in a truncated Fock x Dicke-ladder basis |n1, n2, k> with k = S^z + N/2.

Both couplings conserve q = n1 - n2 + k, the angular momentum
L^z = q - N/2 measured from the trivial vacuum (q = 0). The photon cutoffs
respect this charge, so the truncated operator is exactly block-diagonal in q.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from scipy import linalg, sparse, stats
from scipy.sparse import linalg as sparse_linalg

from . import meanfield
from .cache_utils import cache_function_result, get_ground_state_cache_key, get_sector_scan_cache_key
from .constants import ED_DENSE_LIMIT, ED_MAX_DOUBLINGS, ED_MIN_CUTOFF, ED_SECTOR_WEIGHT, ED_TOL
from .exceptions import ParameterError, ResourceError, SolverError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BasisSpec:
    """Photon cutoffs, atom number and an optional charge sector q = n1 - n2 + k"""

    n_max1: int
    n_max2: int
    N: int
    sector: int = None

    def __post_init__(self):
        for name in ("n_max1", "n_max2"):
            if int(getattr(self, name)) < 0:
                raise ParameterError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        if int(self.N) < 1:
            raise ParameterError(f"N must be >= 1, got {self.N!r}")

    @property
    def full_dimension(self):
        return (self.n_max1 + 1) * (self.n_max2 + 1) * (self.N + 1)

    @property
    def lz(self):
        """Angular momentum of the selected sector, None for the full space"""
        return None if self.sector is None else self.sector - self.N / 2

    def doubled(self):
        return BasisSpec(max(2 * self.n_max1, 1), max(2 * self.n_max2, 1), self.N, self.sector)

    def in_sector(self, sector):
        return BasisSpec(self.n_max1, self.n_max2, self.N, sector)

    @property
    def sector_range(self):
        return range(-self.n_max2, self.n_max1 + self.N + 1)


@dataclass(frozen=True)
class EDResult:
    ground_energy: float
    ground_energy_per_atom: float
    lz_expectation: float
    photon_occupations: tuple
    sz_expectation: float
    converged: bool
    basis: BasisSpec = None
    sector: int = None
    delta_energy_per_atom: float = math.nan
    doublings: int = 0

    @property
    def sector_lz(self):
        """L^z = q - N/2 of the ground-state sector"""
        if self.sector is None or self.basis is None:
            return None
        return self.sector - self.basis.N / 2


def basis_states(b):
    """(n1, n2, k) arrays of the basis, ordered with k fastest, restricted to b.sector if set"""
    n1, n2, k = np.meshgrid(
        np.arange(b.n_max1 + 1), np.arange(b.n_max2 + 1), np.arange(b.N + 1), indexing="ij"
    )
    n1, n2, k = n1.ravel(), n2.ravel(), k.ravel()
    if b.sector is not None:
        mask = n1 - n2 + k == b.sector
        n1, n2, k = n1[mask], n2[mask], k[mask]
    return n1, n2, k


def sector_dimensions(b):
    """{q: block dimension} over every nonempty charge sector of the full space"""
    n1, n2, k = basis_states(BasisSpec(b.n_max1, b.n_max2, b.N))
    charges, counts = np.unique(n1 - n2 + k, return_counts=True)
    return {int(q): int(c) for q, c in zip(charges, counts)}


def _check_budget(dimension):
    budget = getattr(settings, "CHIRAL_ED_MAX_DIMENSION", 2_000_000)
    if dimension > budget:
        raise ResourceError(f"Basis dimension {dimension} exceeds CHIRAL_ED_MAX_DIMENSION={budget}")


def build_hamiltonian(p, b):
    """Sparse symmetric CSR matrix of H on the (possibly sector-restricted) truncated basis"""
    if b.N != p.N:
        raise ParameterError(f"Basis is built for N={b.N}, parameters have N={p.N}")
    n1, n2, k = basis_states(b)
    dimension = len(k)
    _check_budget(dimension)

    # full-space position -> row in this basis (-1 if outside the sector)
    width2, width3 = b.n_max2 + 1, b.N + 1
    position = (n1 * width2 + n2) * width3 + k
    lookup = np.full(b.full_dimension, -1, dtype=np.int64)
    lookup[position] = np.arange(dimension)

    m = k - b.N / 2
    photons = n1 + n2
    rows = [np.arange(dimension)]
    cols = [np.arange(dimension)]
    values = [p.omega_c * photons + p.omega_z * m + p.U * m * photons]

    ladder = np.sqrt((k + 1.0) * (b.N - k))
    scale = 1.0 / math.sqrt(b.N)

    # a1 S^+ : (n1, k) -> (n1 - 1, k + 1)
    mask = (n1 >= 1) & (k < b.N)
    source = np.nonzero(mask)[0]
    target = lookup[position[mask] - width2 * width3 + 1]
    amplitude = p.g1 * scale * np.sqrt(n1[mask]) * ladder[mask]
    rows += [target, source]
    cols += [source, target]
    values += [amplitude, amplitude]

    # a2^+ S^+ : (n2, k) -> (n2 + 1, k + 1)
    mask = (n2 < b.n_max2) & (k < b.N)
    source = np.nonzero(mask)[0]
    target = lookup[position[mask] + width3 + 1]
    amplitude = p.g2 * scale * np.sqrt(n2[mask] + 1.0) * ladder[mask]
    rows += [target, source]
    cols += [source, target]
    values += [amplitude, amplitude]

    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    values = np.concatenate(values)
    if np.any(rows < 0) or np.any(cols < 0):
        raise ParameterError("Charge-conserving term left the sector; basis ordering is inconsistent")
    return sparse.coo_matrix((values, (rows, cols)), shape=(dimension, dimension)).tocsr()


def lz_operator(b):
    """Diagonal L^z = n1 - n2 + k - N/2 on the basis of b"""
    n1, n2, k = basis_states(b)
    return sparse.diags((n1 - n2 + k) - b.N / 2.0, format="csr")


def lz_commutator_norm(p, b):
    """Frobenius norm of [H, L^z] on the truncated space"""
    hamiltonian = build_hamiltonian(p, b)
    lz = lz_operator(b)
    return float(sparse_linalg.norm(hamiltonian @ lz - lz @ hamiltonian))


def _lowest_eigenpair(hamiltonian):
    dimension = hamiltonian.shape[0]
    try:
        if dimension <= ED_DENSE_LIMIT:
            energies, vectors = linalg.eigh(hamiltonian.toarray())
        else:
            start = np.ones(dimension) / math.sqrt(dimension)
            energies, vectors = sparse_linalg.eigsh(hamiltonian, k=1, which="SA", v0=start)
    except (sparse_linalg.ArpackError, linalg.LinAlgError) as exc:
        raise SolverError(f"Lowest eigenpair of a {dimension}-dimensional block failed: {exc}") from exc
    return float(energies[0]), vectors[:, 0]


def _observables(b, vector):
    n1, n2, k = basis_states(b)
    weight = np.abs(vector) ** 2
    weight = weight / weight.sum()
    occupations = (float(weight @ n1), float(weight @ n2))
    sz = float(weight @ k) - b.N / 2
    lz = float(weight @ (n1 - n2 + k)) - b.N / 2
    return occupations, sz, lz


def _solve_basis(p, b):
    """Lowest state of the full truncated space, pinned to a definite charge sector"""
    full = BasisSpec(b.n_max1, b.n_max2, b.N)
    energy, vector = _lowest_eigenpair(build_hamiltonian(p, full))
    n1, n2, k = basis_states(full)
    charges = n1 - n2 + k
    weight = np.abs(vector) ** 2
    candidates = [int(q) for q in np.unique(charges) if weight[charges == q].sum() > ED_SECTOR_WEIGHT]

    best = None
    for q in candidates:
        block = full.in_sector(q)
        sector_energy, sector_vector = _lowest_eigenpair(build_hamiltonian(p, block))
        if best is None or sector_energy < best[0]:
            best = (sector_energy, sector_vector, block)
    if best is None or best[0] > energy + ED_TOL * p.omega_z * p.N:
        logger.debug(f"Sector re-solve did not reproduce E={energy!r}, using the full-space state")
        return energy, vector, full
    return best


def suggest_basis(p, mf=None):
    """Cutoffs max(8, ceil(4 |alpha_i|^2)) from the mean-field photon occupations"""
    if mf is None:
        mf = meanfield.solve(p)
    occupation1, occupation2 = mf.photon_occupations
    return BasisSpec(
        n_max1=max(ED_MIN_CUTOFF, math.ceil(4 * occupation1)),
        n_max2=max(ED_MIN_CUTOFF, math.ceil(4 * occupation2)),
        N=p.N,
    )


def ground_state(p, b=None):
    """
    Ground state with photon-cutoff doubling until |dE|/N < ED_TOL * omega_z.
    After ED_MAX_DOUBLINGS (or when the next basis would exceed the memory
    budget) the last result is returned with converged = False.
    """
    if b is None:
        b = suggest_basis(p)
    energy, vector, solved = _solve_basis(p, b)
    converged = False
    delta = math.nan
    doublings = 0
    while doublings < ED_MAX_DOUBLINGS:
        larger = b.doubled()
        try:
            next_energy, next_vector, next_solved = _solve_basis(p, larger)
        except ResourceError as exc:
            logger.warning(f"Stopping cutoff doubling at {b}: {exc}")
            break
        doublings += 1
        delta = abs(next_energy - energy) / p.N
        logger.debug(f"ED N={p.N} cutoffs ({larger.n_max1}, {larger.n_max2}): E={next_energy!r}, |dE|/N={delta!r}")
        b, energy, vector, solved = larger, next_energy, next_vector, next_solved
        if delta < ED_TOL * p.omega_z:
            converged = True
            break
    if not converged:
        logger.warning(f"ED N={p.N} not converged in photon cutoff: last |dE|/N={delta!r} at {b}")

    occupations, sz, lz = _observables(solved, vector)
    return EDResult(
        ground_energy=energy,
        ground_energy_per_atom=energy / p.N,
        lz_expectation=lz,
        photon_occupations=occupations,
        sz_expectation=sz,
        converged=converged,
        basis=b,
        sector=solved.sector,
        delta_energy_per_atom=delta,
        doublings=doublings,
    )


@cache_function_result(get_ground_state_cache_key, ttl_key='ed_ground_state')
def cached_ground_state(p, basis=None):
    return ground_state(p, basis)


def sector_scan(p, b, sectors):
    """
    [(q, lowest energy)] for each requested charge sector; empty sectors are
    skipped. The angular momentum of sector q is L^z = q - N/2.
    """
    results = []
    for q in sectors:
        block = b.in_sector(int(q))
        n1, _, _ = basis_states(block)
        if len(n1) == 0:
            logger.info(f"Sector q={q} (L^z={int(q) - b.N / 2}) is empty for cutoffs ({b.n_max1}, {b.n_max2}), skipping")
            continue
        energy, _ = _lowest_eigenpair(build_hamiltonian(p, block))
        results.append((int(q), energy))
    return results


@cache_function_result(get_sector_scan_cache_key, ttl_key='ed_sector_scan')
def cached_sector_scan(p, b, sectors):
    return sector_scan(p, b, sectors)


def sector_gap(p, result):
    """
    Lowest energy in the neighbouring sectors q +/- 1 minus the ground
    energy. It closes with N in the superradiant phase, where the L^z
    sectors merge into the broken-symmetry manifold. None when the ground
    state has no definite sector or no neighbour is populated.
    """
    if result.sector is None:
        return None
    neighbours = [q for q in (result.sector - 1, result.sector + 1) if q in result.basis.sector_range]
    levels = [energy for _, energy in cached_sector_scan(p, result.basis, neighbours)]
    if not levels:
        return None
    return min(levels) - result.ground_energy


def _coherent_amplitudes(beta, cutoff):
    n = np.arange(cutoff + 1)
    amplitudes = np.sqrt(stats.poisson.pmf(n, abs(beta) ** 2)) * np.exp(1j * n * np.angle(beta))
    return amplitudes / np.linalg.norm(amplitudes)


def product_state(p, b, mf=None):
    """Truncated coherent photons times the spin-coherent state of the mean-field solution, normalised"""
    if mf is None:
        mf = meanfield.solve(p)
    photon1 = _coherent_amplitudes(mf.alpha1, b.n_max1)
    photon2 = _coherent_amplitudes(mf.alpha2, b.n_max2)
    k = np.arange(b.N + 1)
    spin = np.sqrt(stats.binom.pmf(k, b.N, mf.alpha3_abs2 / b.N)) * np.exp(1j * k * mf.theta)
    spin = spin / np.linalg.norm(spin)
    return np.kron(np.kron(photon1, photon2), spin)


def product_state_energy(p, b, mf=None):
    """<H> in the mean-field product state on the full truncated space (variational upper bound)"""
    full = BasisSpec(b.n_max1, b.n_max2, b.N)
    state = product_state(p, full, mf)
    hamiltonian = build_hamiltonian(p, full)
    return float(np.vdot(state, hamiltonian @ state).real)
