"""Sphere-plate forces from plate-plate free energies.

The proximity force approximation maps the plate free energy per unit
area onto a sphere of radius ``R`` at closest distance ``d``:
``F = 2 pi R F_pp(d)``. For ideal metals at zero temperature the exact
first correction in ``d/R`` is known and available here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .constants import EV, HBAR_C, K_B, NM
from .dielectric import DomainError, Drude, Plasma
from .lifshitz import PlatePair, free_energy_per_area, pressure

__all__ = [
    "SeriesRangeError",
    "SpherePlateGeometry",
    "RegimeReport",
    "ENERGY_CORRECTION",
    "FORCE_CORRECTION",
    "pfa_force",
    "plate_free_energy",
    "ideal_energy_corrected",
    "ideal_force_corrected",
    "classify_regime",
    "q_ratio",
]

# first-order d/R coefficients of the exact ideal-metal sphere-plate result
ENERGY_CORRECTION = 1.0 / 3.0 - 20.0 / math.pi**2
FORCE_CORRECTION = 1.0 / 6.0 - 10.0 / math.pi**2

SERIES_LIMIT = 0.1
PFA_WINDOW = (0.001, 0.007)


class SeriesRangeError(DomainError):
    """``d/R`` too large for the two-term correction series."""


@dataclass(frozen=True)
class SpherePlateGeometry:
    """Closest separation and sphere radius, both in nm."""

    separation: float
    radius: float

    def __post_init__(self):
        if not self.separation > 0:
            raise DomainError("separation must be > 0")
        if not self.radius > 0:
            raise DomainError("radius must be > 0")

    @property
    def aspect(self) -> float:
        return self.separation / self.radius


FreeEnergyFn = Callable[[float, float], float]


def plate_free_energy(material_1, material_2=None, **kwargs) -> FreeEnergyFn:
    """``(d_nm, T) -> J/m^2`` backed by the Lifshitz engine."""
    material_2 = material_1 if material_2 is None else material_2

    def fn(d, T):
        return free_energy_per_area(PlatePair(material_1, material_2, d, T), **kwargs)

    return fn


def pfa_force(geometry: SpherePlateGeometry, free_energy_fn: FreeEnergyFn, T: float) -> float:
    """Sphere-plate force in N; negative is attractive."""
    R = geometry.radius * NM
    return 2.0 * math.pi * R * free_energy_fn(geometry.separation, T)


def _check_series(geometry):
    if geometry.aspect >= SERIES_LIMIT:
        raise SeriesRangeError(
            f"d/R = {geometry.aspect:.3g} is outside the correction series (need < {SERIES_LIMIT})"
        )


def ideal_energy_corrected(geometry: SpherePlateGeometry) -> float:
    """Ideal-metal sphere-plate energy at T = 0 with the first d/R correction, J."""
    _check_series(geometry)
    d, R = geometry.separation, geometry.radius
    pfa = -math.pi**3 * R * HBAR_C / (720.0 * d**2) * EV
    return pfa * (1.0 + ENERGY_CORRECTION * geometry.aspect)


def ideal_force_corrected(geometry: SpherePlateGeometry) -> float:
    """Ideal-metal sphere-plate force at T = 0 with the first d/R correction, N."""
    _check_series(geometry)
    d, R = geometry.separation, geometry.radius
    pfa = -math.pi**3 * R * HBAR_C / (360.0 * d**3) * EV / NM
    return pfa * (1.0 + FORCE_CORRECTION * geometry.aspect)


@dataclass(frozen=True)
class RegimeReport:
    label: str
    expected_q: float | None
    conditions: list[tuple[str, bool]] = field(default_factory=list)


def classify_regime(geometry: SpherePlateGeometry, T: float, omega_p: float,
                    strictness: float = 10.0) -> RegimeReport:
    """Label the (d, R, T, omega_p) point by which asymptotic q regime it sits in.

    ``a << b`` is read as ``strictness * a <= b``. The experimental PFA
    window ``0.001 <= d/R <= 0.007`` is checked as printed and wins over the
    asymptotic regimes.
    """
    if not (T > 0 and omega_p > 0):
        raise DomainError("temperature and plasma frequency must be > 0")
    d, R, s = geometry.separation, geometry.radius, strictness
    thermal = HBAR_C / (2.0 * K_B * T)  # nm
    plasma = 2.0 * math.pi * HBAR_C / omega_p  # nm

    lo, hi = PFA_WINDOW
    window = lo <= geometry.aspect <= hi
    classical = (s * thermal <= d, s * d <= R)
    transition = (s * plasma <= R, s * R <= d)
    tiny = (s * R <= d, s * thermal <= d, R <= plasma)

    conditions = [
        (f"{lo} <= d/R <= {hi}", window),
        ("hbar c/(2 k_B T) << d", classical[0]),
        ("d << R", classical[1]),
        ("2 pi c/omega_p << R", transition[0]),
        ("R << d", transition[1]),
        ("R <= 2 pi c/omega_p", tiny[2]),
    ]
    if window:
        return RegimeReport("PFA-valid", None, conditions)
    if all(classical):
        return RegimeReport("classical-PFA", 2.0, conditions)
    if all(transition):
        return RegimeReport("sphere-small-transition", 1.5, conditions)
    if all(tiny):
        return RegimeReport("sphere-tiny", 1.0, conditions)
    return RegimeReport("outside-all", None, conditions)


def q_ratio(d: float, T: float, omega_p: float = HBAR_C / 22.0, gamma: float = 0.035,
            *, quantity: str = "force", **kwargs) -> float:
    """Plasma-to-Drude ratio for simple metals (no core oscillators).

    ``quantity="force"`` uses the PFA sphere-plate force, i.e. the ratio
    of plate free energies; ``"pressure"`` compares plate pressures. The
    radius cancels in either case.
    """
    plasma = PlatePair(Plasma(omega_p=omega_p), Plasma(omega_p=omega_p), d, T)
    drude = PlatePair(Drude(omega_p=omega_p, gamma=gamma), Drude(omega_p=omega_p, gamma=gamma), d, T)
    if quantity == "pressure":
        return pressure(plasma, **kwargs) / pressure(drude, **kwargs)
    if quantity != "force":
        raise ValueError(f"quantity must be 'force' or 'pressure', not {quantity!r}")
    geometry = SpherePlateGeometry(d, 1.0)
    fp = pfa_force(geometry, lambda dd, TT: free_energy_per_area(plasma, **kwargs), T)
    fd = pfa_force(geometry, lambda dd, TT: free_energy_per_area(drude, **kwargs), T)
    return fp / fd
