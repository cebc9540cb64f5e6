"""Thermal Casimir forces from Lifshitz theory, with fitting and background tools.

Units: frequencies in eV, separations in nm, temperatures in K. Public
results come back in SI (J/m^2, Pa, N).
"""

from .dielectric import CoreOnly, DcConductivity, Drude, Plasma, Tabulated, load_material
from .lifshitz import PlatePair, entropy_per_area, free_energy_per_area, pressure

__version__ = "0.1.0"

__all__ = [
    "CoreOnly",
    "DcConductivity",
    "Drude",
    "Plasma",
    "Tabulated",
    "load_material",
    "PlatePair",
    "free_energy_per_area",
    "pressure",
    "entropy_per_area",
]
