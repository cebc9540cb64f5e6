"""Large-separation expansions of the plate-plate Casimir pressure.

Both forms are second order in the penetration depth ``delta = c/omega_p``
and cheap enough to sit inside a fit objective. The Drude form adds the
classical zero-frequency TM term, which is what survives of the thermal
correction for a dissipative metal at room temperature.
"""

from __future__ import annotations

import math

import numpy as np

from .constants import EV_PER_NM2, EV_PER_NM3, HBAR_C, K_B, ZETA3
from .dielectric import DomainError

__all__ = [
    "ExpansionRangeError",
    "plasma_pressure",
    "drude_pressure",
    "thermal_pressure_term",
    "plasma_free_energy",
    "drude_free_energy",
]


class ExpansionRangeError(DomainError):
    """Penetration depth too large for the two-term series (delta >= d/3)."""


def _check(d, delta, T=0.0):
    d = np.asarray(d, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if np.any(~(d > 0)):
        raise DomainError("separation must be > 0")
    if np.any(~(delta >= 0)):
        raise DomainError("penetration depth must be >= 0")
    if np.any(delta >= d / 3.0):
        raise ExpansionRangeError(
            f"delta={delta} nm is not small against d={d} nm (need delta < d/3)"
        )
    if not T >= 0:
        raise DomainError("temperature must be >= 0")
    return d, delta


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def plasma_pressure(d, delta):
    """Pressure in Pa between plasma-model plates at zero temperature.

    ``d`` and ``delta`` in nm; broadcasts over arrays.
    """
    d, delta = _check(d, delta)
    x = delta / d
    ideal = -math.pi**2 * HBAR_C / (240.0 * d**4) * EV_PER_NM3
    return _scalar(ideal * (1.0 - 16.0 / 3.0 * x + 24.0 * x * x))


def thermal_pressure_term(d, delta, T):
    """The repulsive zero-frequency correction of the Drude form, Pa."""
    d, delta = _check(d, delta, T)
    x = delta / d
    term = K_B * T * ZETA3 / (8.0 * math.pi * d**3) * EV_PER_NM3
    return _scalar(term * (1.0 - 6.0 * x + 24.0 * x * x))


def drude_pressure(d, delta, T):
    """Drude-model pressure in Pa: the plasma form plus the thermal term."""
    return _scalar(np.asarray(plasma_pressure(d, delta)) + thermal_pressure_term(d, delta, T))


def plasma_free_energy(d, delta):
    """Free energy per area (J/m^2) obtained by integrating the plasma form over d."""
    d, delta = _check(d, delta)
    x = delta / d
    ideal = -math.pi**2 * HBAR_C / (720.0 * d**3) * EV_PER_NM2
    return _scalar(ideal * (1.0 - 4.0 * x + 72.0 / 5.0 * x * x))


def drude_free_energy(d, delta, T):
    """Integrated Drude form; the thermal part carries ``k_B T zeta(3)/(16 pi d^2)``."""
    d, delta = _check(d, delta, T)
    x = delta / d
    thermal = K_B * T * ZETA3 / (16.0 * math.pi * d**2) * EV_PER_NM2
    return _scalar(np.asarray(plasma_free_energy(d, delta)) + thermal * (1.0 - 4.0 * x + 12.0 * x * x))
