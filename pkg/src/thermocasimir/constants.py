"""Physical constants shared by every module.

Frequencies are carried in eV (hbar = 1), lengths in nm. SI conversions
happen only at the public boundaries that return J/m^2, Pa or N.
"""

import math

CONSTANTS_VERSION = "codata2018-v1"

HBAR_C = 197.3269804  # eV nm
K_B = 8.617333262e-5  # eV / K
EV = 1.602176634e-19  # J
EPS0 = 8.8541878128e-12  # F / m
ZETA3 = 1.2020569031595942
NM = 1e-9  # m

# eV/nm^2 -> J/m^2 and eV/nm^3 -> Pa
EV_PER_NM2 = EV / NM**2
EV_PER_NM3 = EV / NM**3

PI = math.pi
