"""Run configuration and validation for the FDTD solver.

Internal solver units: lengths in nm, c = eps0 = mu0 = 1, so time is also
in nm and the angular frequency of the extraction equals k = 2 pi / lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from ..errors import DomainError
from ..fiber import FiberSpec

__all__ = ["SimulationConfig", "default_run_steps", "COARSE_GRID_LIMIT_FACTOR"]

# Default grid bound: lambda/30 inside the dielectric.
COARSE_GRID_LIMIT_FACTOR = 30.0

VALID_ORIENTATIONS = ("z", "phi", "r")


@dataclass(frozen=True)
class SimulationConfig:
    """Geometry, discretization, and source description for one dipole run.

    distance_nm is measured from the fiber surface; the dipole sits at
    azimuth azimuth_rad in the transverse plane.  fiber=None gives a
    vacuum-only run (self-normalization check); distance_nm is then the
    distance from the coordinate origin.
    """
    fiber: FiberSpec | None
    distance_nm: float
    orientation: str
    azimuth_rad: float = 0.0
    grid_nm: float = 10.0
    courant: float = 0.5
    pml_cells: int = 10
    pad_lateral_nm: float = 320.0   # structure/dipole to PML, transverse axes
    pad_axial_nm: float = 130.0     # outer flux box to PML along the fiber
    flux_gap_nm: float = 150.0      # structure/dipole to inner flux box
    flux_sep_nm: float = 60.0       # between nested flux boxes
    flux_halflength_nm: float = 350.0   # inner flux box half-length along fiber
    source_periods: float = 1.0     # Gaussian envelope sigma, optical periods
    run_crossings: float = 8.0      # tail length in max-domain light crossings
    steps: int | None = None        # explicit override of the run length
    dtype: str = "float64"
    use_symmetry: bool = True
    subcell_samples: int = 8
    allow_coarse_grid: bool = False

    def __post_init__(self):
        if self.orientation not in VALID_ORIENTATIONS:
            raise DomainError(
                f"orientation {self.orientation!r} not in {VALID_ORIENTATIONS}")
        if self.grid_nm <= 0:
            raise DomainError("grid spacing must be positive")
        if not (0 < self.courant <= 1.0 / math.sqrt(3.0)):
            raise DomainError(
                f"Courant factor {self.courant} outside (0, 1/sqrt(3)]")
        if self.pml_cells < 4:
            raise DomainError("need at least 4 PML cells")
        if self.dtype not in ("float64", "float32"):
            raise DomainError(f"unsupported dtype {self.dtype!r}")
        if self.fiber is not None:
            limit = self.wavelength_nm / (COARSE_GRID_LIMIT_FACTOR
                                          * self.fiber.core_index)
            if self.grid_nm > limit * (1 + 1e-9) and not self.allow_coarse_grid:
                raise DomainError(
                    f"grid {self.grid_nm} nm coarser than lambda/30 inside the "
                    f"dielectric ({limit:.2f} nm); set allow_coarse_grid=True "
                    f"to accept the extra staircase error")
            if self.distance_nm < 2.0 * self.grid_nm:
                raise DomainError(
                    f"dipole {self.distance_nm} nm from the surface is closer "
                    f"than 2 cells ({2 * self.grid_nm} nm)")
        if self.distance_nm < 0:
            raise DomainError("distance must be >= 0")

    @property
    def wavelength_nm(self) -> float:
        return self.fiber.wavelength_nm if self.fiber is not None else 780.241

    @property
    def dt_nm(self) -> float:
        return self.courant * self.grid_nm

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.wavelength_nm

    def with_(self, **kw) -> "SimulationConfig":
        return replace(self, **kw)


def default_run_steps(config: SimulationConfig, max_extent_nm: float) -> int:
    """Run length: source duration plus run_crossings light crossings of the
    largest domain extent, which empirically covers the guided-mode ring-down."""
    tau = config.source_periods * config.wavelength_nm
    t_source = 5.0 * tau + 6.5 * tau
    total = t_source + config.run_crossings * max_extent_nm
    return int(math.ceil(total / config.dt_nm))
