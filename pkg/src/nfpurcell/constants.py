"""Physical constants and default experiment parameters.

Lengths are in nanometers unless a name says otherwise; energies in joules;
ordinary (not angular) frequencies in Hz.  The van der Waals / Casimir-Polder
coefficients are for Rb ground (5S1/2) and excited (5P3/2) levels in front of
a fused-silica half space.
"""

import math

# SI constants
C_LIGHT = 299_792_458.0            # m/s
HBAR = 1.054_571_817e-34           # J s
PLANCK_H = 2.0 * math.pi * HBAR    # J s
K_BOLTZMANN = 1.380_649e-23        # J/K

# Probe transition (Rb D2)
WAVELENGTH_NM = 780.241
FIBER_INDEX = 1.45367
TAU0_NS = 26.24                       # free-space lifetime
GAMMA0_HZ = 1.0 / (2.0 * math.pi * TAU0_NS * 1e-9)   # ordinary linewidth, ~6.065 MHz
SATURATION_INTENSITY_MW_CM2 = 3.58

# Surface-interaction coefficients, SI (J m^3 and J m^4)
C3_GROUND = 4.94e-49
C4_GROUND = 4.47e-56
C3_EXCITED = 7.05e-49
C4_EXCITED = 12.2e-56

# Cold-cloud defaults
TEMPERATURE_UK = 150.0

# Multilevel branching for linearly polarized pumping on F=2 -> F'=3
P_PI = 0.55
P_SIGMA = 0.45
GROUND_POPULATIONS = {2: 0.04, 1: 0.24, 0: 0.43}   # by |m_F|

# Measured reference ratios (used only for comparison reports)
MEASURED_VERTICAL = (1.088, 0.015)
MEASURED_HORIZONTAL = (0.943, 0.014)
MEASURED_FREE_SPACE = (0.989, 0.012)
