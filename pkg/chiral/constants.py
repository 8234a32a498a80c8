"""
Chiral Dicke lab - Tolerances, defaults and label choices

Energies are measured in units of the cavity frequency omega_c wherever a
tolerance is absolute.
"""

import math

from django.db import models


class Phase(models.TextChoices):
    NORMAL = "Normal", "Normal (U(1) symmetric)"
    SUPERRADIANT = "Superradiant", "Superradiant (U(1) broken)"
    CRITICAL = "Critical", "Critical"


class Stability(models.TextChoices):
    MINIMUM = "Minimum", "Local minimum"
    MAXIMUM = "Maximum", "Local maximum"
    FLAT = "Saddle/Flat", "Saddle or flat"


class Side(models.TextChoices):
    FROM_NORMAL = "from_normal", "Approach from the normal phase"
    FROM_SUPERRADIANT = "from_superradiant", "Approach from the superradiant phase"


# Mean field
CRITICAL_BAND = 1e-12  # |mu_tilde - 1| inside this band is labelled Critical
STATIONARITY_TOL = 1e-9  # relative gradient at a returned superradiant point
FLAT_CURVATURE_TOL = 1e-10  # |d2E/da2| below this is Saddle/Flat

# Bogoliubov spectrum
GOLDSTONE_TOL = 1e-7  # relative to max(omega_c, largest mode)
PAIRING_TOL = 1e-8  # +/- eigenvalue matching window
IMAG_TOL = 1e-9  # |Im eps| above this marks an instability
NEGATIVE_ROOT_TOL = 1e-12  # eps^2 below -tol is an instability in the charpoly routes
ROUTE_AGREEMENT_TOL = 1e-10  # charpoly vs dynamical matrix, absolute
CUBIC_POLISH_STEPS = 3  # Newton refinements per cubic root
BRANCH_LABELS = ("eps_delta", "eps_minus", "eps_plus")

# Criticality
DEGENERACY_TOL = 1e-9
DEFAULT_FIT_WINDOW = (1e-4, 1e-2)
DEFAULT_FIT_POINTS = 40
MIN_FIT_POINTS = 20
MAX_FIT_WINDOW = 0.05
MIN_R_SQUARED = 0.999
VANISHING_RATIO = 0.5  # gap at the inner window edge / gap at the outer edge

# Exact diagonalization
ED_TOL = 1e-8  # |dE|/N under cutoff doubling, in units of omega_z
ED_MIN_CUTOFF = 8
ED_MAX_DOUBLINGS = 4
ED_SECTOR_WEIGHT = 1e-6  # sectors carrying less weight are not re-solved
ED_DENSE_LIMIT = 400  # blocks up to this size use a dense eigensolver

# Sweeps
DEFAULT_N = 1000
DEFAULT_MAP_POINTS = 200
DEFAULT_CUT_POINTS = 400
DEFAULT_PHI_SERIES = (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2)
DEFAULT_OMEGA_Z_SERIES = (1.5, 1.0, 0.5)
DEFAULT_N_LIST = (4, 8, 12)
DEFAULT_EXPONENT_MAP_POINTS = 50
CSV_FLOAT_FORMAT = "{:.17g}"
SCHEMA_VERSION = 1
