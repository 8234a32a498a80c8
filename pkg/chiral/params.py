"""
Chiral Dicke lab - Model parameters

ModelParams is the single source of truth for one model instance: cavity
frequency, atomic splitting, co- and counter-rotating couplings, dispersive
coupling U and the atom number N.
"""

import dataclasses
import math
from dataclasses import dataclass

from .exceptions import ParameterError


@dataclass(frozen=True)
class CouplingPolar:
    """Coupling plane in polar form: g1 = g cos(phi), g2 = g sin(phi)"""

    g: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.g) and self.g >= 0):
            raise ParameterError(f"Radial coupling must be finite and >= 0, got {self.g!r}")
        if not (0.0 <= self.phi <= math.pi / 2):
            raise ParameterError(f"Coupling angle must lie in [0, pi/2], got {self.phi!r}")


def to_polar(g1, g2):
    """Cartesian couplings (g1, g2) -> CouplingPolar; phi = 0 when both vanish"""
    g1, g2 = float(g1), float(g2)
    if g1 < 0 or g2 < 0:
        raise ParameterError(f"Couplings must be >= 0, got g1={g1!r}, g2={g2!r}")
    if g1 == 0.0 and g2 == 0.0:
        return CouplingPolar(g=0.0, phi=0.0)
    return CouplingPolar(g=math.hypot(g1, g2), phi=math.atan2(g2, g1))


def from_polar(coupling):
    """CouplingPolar -> (g1, g2)"""
    if coupling.phi == math.pi / 2:
        return 0.0, coupling.g
    return coupling.g * math.cos(coupling.phi), coupling.g * math.sin(coupling.phi)


@dataclass(frozen=True)
class ModelParams:
    """
    Physical couplings plus atom number.

    Energies may be given in any unit; tolerances downstream are applied in
    units of omega_c (see normalized()). N stays an exact integer: the ED
    oracle uses it as the Dicke ladder size, mean-field formulas as a real
    thermodynamic scale.
    """

    omega_c: float
    omega_z: float
    g1: float = 0.0
    g2: float = 0.0
    U: float = 0.0
    N: int = 1

    def __post_init__(self):
        for name in ("omega_c", "omega_z", "g1", "g2", "U"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ParameterError(f"{name} must be a number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise ParameterError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))

        if self.omega_c <= 0:
            raise ParameterError(f"omega_c must be > 0, got {self.omega_c}")
        if self.omega_z <= 0:
            raise ParameterError(f"omega_z must be > 0, got {self.omega_z}")
        if self.g1 < 0 or self.g2 < 0:
            raise ParameterError(f"Couplings must be >= 0, got g1={self.g1}, g2={self.g2}")
        if self.N < 1:
            raise ParameterError(f"N must be >= 1, got {self.N}")
        # Mean-field energy is bounded only while |UN| < 2 omega_c
        if 4 * self.omega_c ** 2 <= (self.U * self.N) ** 2:
            raise ParameterError(
                f"Boundedness guard 4*omega_c^2 > (U*N)^2 violated: omega_c={self.omega_c}, U*N={self.U * self.N}"
            )

    @classmethod
    def create(cls, omega_c=1.0, omega_z=1.0, g1=None, g2=None, g=None, phi=None, U=None, UN=None, N=1):
        """
        Build from either Cartesian (g1, g2) or polar (g, phi) couplings and
        either U or the product UN (UN takes precedence when both are given).
        """
        if g is not None or phi is not None:
            if g1 is not None or g2 is not None:
                raise ParameterError("Give couplings either as g1/g2 or as g/phi, not both")
            g1, g2 = from_polar(CouplingPolar(g=float(g or 0.0), phi=float(phi or 0.0)))
        if UN is not None:
            U = float(UN) / int(N)
        return cls(
            omega_c=omega_c,
            omega_z=omega_z,
            g1=0.0 if g1 is None else g1,
            g2=0.0 if g2 is None else g2,
            U=0.0 if U is None else U,
            N=N,
        )

    @property
    def UN(self):
        return self.U * self.N

    @property
    def omega_c_tilde(self):
        return omega_c_tilde(self)

    @property
    def coupling_sq(self):
        return self.g1 ** 2 + self.g2 ** 2

    @property
    def polar(self):
        return to_polar(self.g1, self.g2)

    @property
    def g(self):
        return math.hypot(self.g1, self.g2)

    @property
    def phi(self):
        return self.polar.phi

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def with_polar(self, g, phi):
        g1, g2 = from_polar(CouplingPolar(g=float(g), phi=float(phi)))
        return dataclasses.replace(self, g1=g1, g2=g2)

    def with_UN(self, UN):
        return dataclasses.replace(self, U=float(UN) / self.N)

    def normalized(self):
        """Same model with every energy divided by omega_c (omega_c = 1)"""
        scale = self.omega_c
        return dataclasses.replace(
            self,
            omega_c=1.0,
            omega_z=self.omega_z / scale,
            g1=self.g1 / scale,
            g2=self.g2 / scale,
            U=self.U / scale,
        )

    def as_row(self):
        """Full parameter tuple carried by every sweep output row"""
        polar = self.polar
        return {
            "omega_c": self.omega_c,
            "omega_z": self.omega_z,
            "g1": self.g1,
            "g2": self.g2,
            "g": polar.g,
            "phi": polar.phi,
            "U": self.U,
            "UN": self.UN,
            "N": self.N,
        }


def omega_c_tilde(p):
    """Cavity frequency renormalised by the dispersive coupling: omega_c - U*N/2"""
    return p.omega_c - p.U * p.N / 2
