"""3-D Yee-lattice FDTD for the radiated power of a dipole near a dielectric
cylinder, with uniaxial-PML termination and single-frequency field extraction.

The observable is the total radiated-power ratio P/P0 (equal to the
decay-rate ratio of the equivalent quantum emitter), obtained from the
time-averaged Poynting flux through a closed box around the dipole and a
segment of the fiber, normalized by an identical-geometry vacuum run.
"""

from .config import SimulationConfig, default_run_steps
from .solver import PowerResult, run_dipole, raw_power_run, vacuum_dipole_power
from .sweep import DecayMap, interpolate, sweep

__all__ = [
    "SimulationConfig",
    "PowerResult",
    "DecayMap",
    "default_run_steps",
    "run_dipole",
    "raw_power_run",
    "vacuum_dipole_power",
    "sweep",
    "interpolate",
]
