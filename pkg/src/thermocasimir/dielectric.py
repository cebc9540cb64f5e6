"""Dielectric permittivity models on the real and imaginary frequency axes.

All frequencies are photon energies in eV. The models are immutable and
every evaluation is a pure function, so they can be shared between threads.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .constants import HBAR_C

__all__ = [
    "DomainError",
    "UnsupportedVariantError",
    "TableTooSparseError",
    "OscillatorSet",
    "OpticalTable",
    "ZeroFrequencyLimit",
    "PermittivityModel",
    "CoreOnly",
    "DcConductivity",
    "Drude",
    "Plasma",
    "Tabulated",
    "eval_real_axis",
    "eval_imag_axis",
    "zero_frequency_limit",
    "kk_to_imag_axis",
    "penetration_depth",
    "plasma_frequency",
    "material_from_dict",
    "load_material",
    "read_optical_table",
]

VARIANTS = ("core", "dc", "drude", "plasma", "tabulated")


class DomainError(ValueError):
    """Argument outside the domain of a model or formula."""


class UnsupportedVariantError(ValueError):
    pass


class TableTooSparseError(ValueError):
    pass


def _positive(x, what):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{what} must be > 0, got {x!r}")
    return arr


@dataclass(frozen=True)
class OscillatorSet:
    """Core-electron oscillators ``(g_j [eV^2], omega_j [eV], gamma_j [eV])``."""

    oscillators: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in row) for row in self.oscillators)
        for g, w, gam in rows:
            if g < 0 or w <= 0 or gam < 0:
                raise DomainError(f"invalid oscillator (g={g}, omega={w}, gamma={gam})")
        object.__setattr__(self, "oscillators", rows)

    @property
    def count(self) -> int:
        return len(self.oscillators)

    def real_axis(self, omega):
        omega = np.asarray(omega, dtype=float)
        eps = np.ones_like(omega, dtype=complex)
        for g, w, gam in self.oscillators:
            eps = eps + g / (w * w - omega * omega - 1j * gam * omega)
        return eps

    def imag_axis(self, xi):
        xi = np.asarray(xi, dtype=float)
        eps = np.ones_like(xi)
        for g, w, gam in self.oscillators:
            eps = eps + g / (w * w + xi * xi + gam * xi)
        return eps

    def static(self) -> float:
        return 1.0 + sum(g / (w * w) for g, w, _ in self.oscillators)


@dataclass(frozen=True)
class OpticalTable:
    """Measured ``Im eps`` against photon energy, ascending in energy."""

    omega: np.ndarray
    im_eps: np.ndarray

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float)
        im_eps = np.array(self.im_eps, dtype=float)
        if omega.ndim != 1 or omega.shape != im_eps.shape:
            raise ValueError("omega and im_eps must be 1-D arrays of equal length")
        if omega.size < 2:
            raise ValueError("an optical table needs at least 2 rows")
        if np.any(np.diff(omega) <= 0) or omega[0] <= 0:
            raise ValueError("table energies must be positive and strictly increasing")
        if np.any(im_eps < 0):
            raise ValueError("Im eps must be non-negative (passive medium)")
        omega.setflags(write=False)
        im_eps.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "im_eps", im_eps)

    @property
    def omega_min(self) -> float:
        return float(self.omega[0])

    @property
    def omega_max(self) -> float:
        return float(self.omega[-1])

    # arrays break the generated __eq__/__hash__
    def __eq__(self, other):
        return (
            isinstance(other, OpticalTable)
            and np.array_equal(self.omega, other.omega)
            and np.array_equal(self.im_eps, other.im_eps)
        )

    def __hash__(self):
        return hash((self.omega.tobytes(), self.im_eps.tobytes()))


@dataclass(frozen=True)
class ZeroFrequencyLimit:
    """Behaviour of eps(i xi) as xi -> 0.

    ``kind`` is ``"finite"`` (``value`` is eps(0)), ``"inverse"``
    (eps ~ value / xi) or ``"inverse_square"`` (eps ~ value / xi^2).
    """

    kind: str
    value: float


class PermittivityModel:
    """Base class of the permittivity variants."""

    variant: str = ""

    def real_axis(self, omega):
        raise UnsupportedVariantError(f"{type(self).__name__} has no real-axis form")

    def imag_axis(self, xi):
        raise NotImplementedError

    def zero_frequency(self) -> ZeroFrequencyLimit:
        raise NotImplementedError


@dataclass(frozen=True)
class CoreOnly(PermittivityModel):
    core: OscillatorSet = field(default_factory=OscillatorSet)
    variant = "core"

    def real_axis(self, omega):
        return self.core.real_axis(omega)

    def imag_axis(self, xi):
        return self.core.imag_axis(xi)

    def zero_frequency(self):
        return ZeroFrequencyLimit("finite", self.core.static())


@dataclass(frozen=True)
class DcConductivity(PermittivityModel):
    """Core oscillators plus a static conductivity, stored as ``4 pi sigma0`` in eV."""

    core: OscillatorSet = field(default_factory=OscillatorSet)
    four_pi_sigma0: float = 0.0
    variant = "dc"

    def __post_init__(self):
        if not self.four_pi_sigma0 >= 0:
            raise DomainError("4*pi*sigma0 must be >= 0")

    def real_axis(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.core.real_axis(omega) + 1j * self.four_pi_sigma0 / omega

    def imag_axis(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.core.imag_axis(xi) + self.four_pi_sigma0 / xi

    def zero_frequency(self):
        if self.four_pi_sigma0 == 0:
            return ZeroFrequencyLimit("finite", self.core.static())
        return ZeroFrequencyLimit("inverse", self.four_pi_sigma0)


@dataclass(frozen=True)
class Drude(PermittivityModel):
    core: OscillatorSet = field(default_factory=OscillatorSet)
    omega_p: float = 9.0
    gamma: float = 0.035
    variant = "drude"

    def __post_init__(self):
        if not self.omega_p > 0:
            raise DomainError("omega_p must be > 0")
        if not self.gamma >= 0:
            raise DomainError("gamma must be >= 0")

    def real_axis(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.core.real_axis(omega) - self.omega_p**2 / (omega * (omega + 1j * self.gamma))

    def imag_axis(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.core.imag_axis(xi) + self.omega_p**2 / (xi * (xi + self.gamma))

    def zero_frequency(self):
        if self.gamma == 0:
            return ZeroFrequencyLimit("inverse_square", self.omega_p**2)
        return ZeroFrequencyLimit("inverse", self.omega_p**2 / self.gamma)


@dataclass(frozen=True)
class Plasma(PermittivityModel):
    core: OscillatorSet = field(default_factory=OscillatorSet)
    omega_p: float = 9.0
    variant = "plasma"

    def __post_init__(self):
        if not self.omega_p > 0:
            raise DomainError("omega_p must be > 0")

    def real_axis(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.core.real_axis(omega) - self.omega_p**2 / omega**2 + 0j

    def imag_axis(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.core.imag_axis(xi) + self.omega_p**2 / xi**2

    def zero_frequency(self):
        return ZeroFrequencyLimit("inverse_square", self.omega_p**2)


@dataclass(frozen=True)
class Tabulated(PermittivityModel):
    """Optical data with a Drude extrapolation below the first row.

    ``omega_p``/``gamma`` describe the low-frequency Drude tail; pass
    ``omega_p=None`` to treat Im eps as zero below the table.
    """

    table: OpticalTable
    omega_p: float | None = None
    gamma: float = 0.0
    variant = "tabulated"

    def imag_axis(self, xi):
        return kk_to_imag_axis(self.table, self.extrapolation, xi)

    @property
    def extrapolation(self):
        return None if self.omega_p is None else (self.omega_p, self.gamma)

    def zero_frequency(self):
        if self.omega_p is None:
            # Im eps = 0 below the table: eps(0) from the KK integral
            value = 1.0 + 2.0 / math.pi * float(
                np.trapezoid(self.table.im_eps / self.table.omega, self.table.omega)
            )
            return ZeroFrequencyLimit("finite", value)
        if self.gamma == 0:
            return ZeroFrequencyLimit("inverse_square", self.omega_p**2)
        return ZeroFrequencyLimit("inverse", self.omega_p**2 / self.gamma)


def eval_real_axis(model: PermittivityModel, omega):
    """eps(omega) on the real axis; complex with Im eps >= 0."""
    _positive(omega, "omega")
    out = model.real_axis(omega)
    return complex(out) if np.ndim(out) == 0 else out


def eval_imag_axis(model: PermittivityModel, xi):
    """eps(i xi) for xi > 0. Real, >= 1."""
    _positive(xi, "xi")
    out = model.imag_axis(xi)
    return float(out) if np.ndim(out) == 0 else out


def zero_frequency_limit(model: PermittivityModel) -> ZeroFrequencyLimit:
    return model.zero_frequency()


def _drude_tail(omega_p, gamma, upper, xi):
    """Closed form of int_0^upper w ImEps_D(w) / (w^2 + xi^2) dw."""
    a = omega_p**2 * gamma
    if gamma == 0:
        return np.zeros_like(xi)
    at_g = math.atan(upper / gamma) / gamma
    diff = xi * xi - gamma * gamma
    near = np.abs(xi - gamma) < 1e-6 * gamma
    safe = np.where(near, 2 * gamma, xi)
    general = a / np.where(near, 1.0, diff) * (at_g - np.arctan(upper / safe) / safe)
    degenerate = a / (2 * gamma**2) * (upper / (upper**2 + gamma**2) + at_g)
    return np.where(near, degenerate, general)


def kk_to_imag_axis(table: OpticalTable, extrapolation, xi, *, chunk: int = 2048):
    """Kramers-Kronig transform of tabulated Im eps to eps(i xi).

    Trapezoid rule on the table grid, a closed-form Drude integral below
    ``table.omega_min`` when ``extrapolation=(omega_p, gamma)`` is given, and
    nothing above ``table.omega_max``.
    """
    xi_arr = _positive(xi, "xi")
    flat = np.atleast_1d(xi_arr).ravel()
    w = table.omega
    inside = (flat >= table.omega_min) & (flat <= table.omega_max)
    if np.any(inside):
        lo = np.searchsorted(w, flat[inside] / 10.0, side="left")
        hi = np.searchsorted(w, flat[inside] * 10.0, side="right")
        if np.any(hi - lo < 2):
            raise TableTooSparseError("fewer than 2 table rows around the integrand peak")

    num = w * table.im_eps
    out = np.empty_like(flat)
    for start in range(0, flat.size, chunk):
        x = flat[start : start + chunk, None]
        out[start : start + chunk] = np.trapezoid(num / (w * w + x * x), w, axis=1)
    if extrapolation is not None:
        omega_p, gamma = extrapolation
        out += _drude_tail(float(omega_p), float(gamma), table.omega_min, flat)
    out = 1.0 + 2.0 / math.pi * out
    if np.ndim(xi_arr) == 0:
        return float(out[0])
    return out.reshape(xi_arr.shape)


def penetration_depth(omega_p: float) -> float:
    """Penetration depth c/omega_p in nm."""
    if not omega_p > 0:
        raise DomainError("omega_p must be > 0")
    return HBAR_C / omega_p


def plasma_frequency(delta_nm: float) -> float:
    """Inverse of :func:`penetration_depth`: omega_p in eV for a depth in nm."""
    if not delta_nm > 0:
        raise DomainError("penetration depth must be > 0")
    return HBAR_C / delta_nm


def read_optical_table(path) -> OpticalTable:
    """Read a CSV with header ``omega_eV,im_eps``."""
    omega, im_eps = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(row for row in fh if not row.startswith("#"))
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["omega_eV", "im_eps"]:
            raise ValueError(f"{path}: expected header 'omega_eV,im_eps'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                omega.append(float(row[0]))
                im_eps.append(float(row[1]))
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from exc
    return OpticalTable(np.array(omega), np.array(im_eps))


def material_from_dict(spec: dict, variant: str | None = None, base_dir=None) -> PermittivityModel:
    """Build a model from the material-file schema.

    ``variant`` overrides the file's own variant so one file can feed both
    the Drude and the plasma computation.
    """
    variant = (variant or spec.get("variant", "")).lower()
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    core = OscillatorSet(tuple(tuple(r) for r in spec.get("oscillators", [])))
    if variant == "core":
        return CoreOnly(core)
    if variant == "dc":
        return DcConductivity(core, float(spec.get("four_pi_sigma0_eV", 0.0)))
    if variant == "drude":
        return Drude(core, float(spec["omega_p_eV"]), float(spec["gamma_eV"]))
    if variant == "plasma":
        return Plasma(core, float(spec["omega_p_eV"]))
    table_path = Path(spec["table_csv"])
    if base_dir is not None and not table_path.is_absolute():
        table_path = Path(base_dir) / table_path
    omega_p = spec.get("omega_p_eV")
    return Tabulated(
        read_optical_table(table_path),
        None if omega_p is None else float(omega_p),
        float(spec.get("gamma_eV", 0.0)),
    )


def load_material(path, variant: str | None = None) -> tuple[str, PermittivityModel]:
    """Load a material JSON file; returns ``(name, model)``."""
    path = Path(path)
    with open(path) as fh:
        spec = json.load(fh)
    model = material_from_dict(spec, variant, base_dir=path.parent)
    return spec.get("name", path.stem), model


def oscillators_from_rows(rows: Sequence[Sequence[float]]) -> OscillatorSet:
    return OscillatorSet(tuple(tuple(r) for r in rows))
