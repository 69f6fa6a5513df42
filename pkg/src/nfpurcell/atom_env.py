"""Atom-surface interaction weights for the spatial averaging.

Three ingredients, each a function of the distance r from the fiber surface:
the smoothly-joined van der Waals / Casimir-Polder potential

    U(r) = -C4 / (r^3 (r + C4/C3)),

the thermal steady-state density depletion rho(r)/rho0 = 1/(1 - U_g/E) with
E = (3/2) kB T, and the surface-shifted absorption probability

    p_abs(r) = 1 / (1 + s + 4 (delta/gamma0)^2),  delta = (U_e - U_g)/h.

delta and gamma0 are ordinary frequencies; the excited potential is deeper
than the ground one, so delta < 0 everywhere (red shift).  Distances are nm
at the interface, converted to metres internally for the SI coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import constants as cn
from .errors import DomainError, RangeError

__all__ = [
    "VdwCoefficients",
    "EnvSpec",
    "EnvProfile",
    "GROUND_COEFFS",
    "EXCITED_COEFFS",
    "R_MIN_NM",
    "potential",
    "density",
    "absorption",
    "build_profile",
]

# Grid floor: below this the potential diverges and both rho and p_abs are
# effectively zero, so the averaging integrand carries no weight there.
R_MIN_NM = 5.0


@dataclass(frozen=True)
class VdwCoefficients:
    """C3 (J m^3) and C4 (J m^4) for one atomic level."""
    c3: float
    c4: float
    level: str = "ground"

    def __post_init__(self):
        if self.c3 <= 0 or self.c4 <= 0:
            raise DomainError("C3 and C4 must be positive")

    @property
    def crossover_m(self) -> float:
        return self.c4 / self.c3


GROUND_COEFFS = VdwCoefficients(cn.C3_GROUND, cn.C4_GROUND, "ground")
EXCITED_COEFFS = VdwCoefficients(cn.C3_EXCITED, cn.C4_EXCITED, "excited")


@dataclass(frozen=True)
class EnvSpec:
    """Cloud and probe parameters entering the weight functions."""
    temperature_uk: float = cn.TEMPERATURE_UK
    density_far: float = 1.0
    saturation: float = 0.0
    linewidth_hz: float = cn.GAMMA0_HZ

    def __post_init__(self):
        if self.temperature_uk <= 0:
            raise DomainError("temperature must be positive")
        if self.saturation < 0:
            raise DomainError("saturation parameter must be >= 0")

    @property
    def mean_energy_j(self) -> float:
        return 1.5 * cn.K_BOLTZMANN * self.temperature_uk * 1e-6


def potential(coeffs: VdwCoefficients, r_nm) -> np.ndarray:
    """U(r) in joules at distance r (nm) from the surface."""
    r = np.asarray(r_nm, dtype=float) * 1e-9
    if np.any(r <= 0):
        raise DomainError("distance must be positive")
    out = -coeffs.c4 / (r ** 3 * (r + coeffs.crossover_m))
    if np.isscalar(r_nm):
        return float(out)
    return out


def density(spec: EnvSpec, u_ground_j) -> np.ndarray:
    """Relative density rho/rho0 = 1/(1 - U_g/E) for U_g <= 0."""
    u = np.asarray(u_ground_j, dtype=float)
    if np.any(u > 0):
        raise DomainError("ground potential must be attractive (U_g <= 0)")
    out = 1.0 / (1.0 - u / spec.mean_energy_j)
    if np.isscalar(u_ground_j):
        return float(out)
    return out


def absorption(spec: EnvSpec, u_ground_j, u_excited_j) -> tuple:
    """(delta in MHz, unnormalized p_abs) from the level shifts at one r.

    The normalization factor of the Lorentzian is taken as 1 (it cancels in
    the weighted averages); at zero detuning p_abs = 1/(1+s).
    """
    ug = np.asarray(u_ground_j, dtype=float)
    ue = np.asarray(u_excited_j, dtype=float)
    delta_hz = (ue - ug) / cn.PLANCK_H
    p = 1.0 / (1.0 + spec.saturation + 4.0 * (delta_hz / spec.linewidth_hz) ** 2)
    if np.isscalar(u_ground_j) and np.isscalar(u_excited_j):
        return float(delta_hz) * 1e-6, float(p)
    return delta_hz * 1e-6, p


@dataclass(frozen=True)
class EnvProfile:
    """Sampled weight functions on a radial grid (distances from surface)."""
    r_nm: np.ndarray
    u_ground_j: np.ndarray
    u_excited_j: np.ndarray
    rho_rel: np.ndarray
    delta_mhz: np.ndarray
    p_abs: np.ndarray
    spec: EnvSpec = field(default_factory=EnvSpec)

    def weight_at(self, r_nm) -> np.ndarray:
        """rho * p_abs interpolated at r (the alpha factor lives elsewhere)."""
        r = np.asarray(r_nm, dtype=float)
        return (np.interp(r, self.r_nm, self.rho_rel)
                * np.interp(r, self.r_nm, self.p_abs))


def build_profile(spec: EnvSpec, ground: VdwCoefficients = GROUND_COEFFS,
                  excited: VdwCoefficients = EXCITED_COEFFS,
                  grid_nm=None) -> EnvProfile:
    """Evaluate all weight functions on a strictly increasing grid (nm)."""
    if grid_nm is None:
        grid_nm = np.geomspace(R_MIN_NM, 1200.0, 400)
    r = np.asarray(grid_nm, dtype=float)
    if r.ndim != 1 or r.size < 2 or np.any(np.diff(r) <= 0):
        raise DomainError("grid must be a strictly increasing 1-D sequence")
    if r[0] < R_MIN_NM - 1e-12:
        raise RangeError(f"grid floor {r[0]} nm below r_min = {R_MIN_NM} nm")
    ug = potential(ground, r)
    ue = potential(excited, r)
    rho = density(spec, ug)
    delta_mhz, p = absorption(spec, ug, ue)
    return EnvProfile(r, ug, ue, rho, delta_mhz, p, spec)
