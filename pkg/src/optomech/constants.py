"""Physical constants (CODATA 2018, exact SI values where defined).

Kept in one place so derived-parameter checks are bit-stable across modules.
"""

HBAR = 1.054571817e-34  # reduced Planck constant [J s]
KB = 1.380649e-23       # Boltzmann constant [J/K]
C = 299792458.0         # speed of light [m/s]
