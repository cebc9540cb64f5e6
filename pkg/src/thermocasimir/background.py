"""Electrostatic background forces and residual signals.

Everything here is SI: radius and separation in metres, voltages in
volts, forces in newtons. Callers holding nm separations convert at the
boundary (``thermocasimir.constants.NM``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .constants import EPS0
from .dielectric import DomainError

__all__ = [
    "PatchParams",
    "PatchSizeCheck",
    "ResidualSeries",
    "patch_force",
    "patch_size_valid",
    "total_force",
    "residual_signal",
]


@dataclass(frozen=True)
class PatchParams:
    """rms patch voltage (V), constant electronics offset (N), sphere radius (m)."""

    v_rms: float
    offset: float
    radius: float

    def __post_init__(self):
        if not self.v_rms >= 0:
            raise DomainError("V_rms must be >= 0")
        if not self.radius > 0:
            raise DomainError("radius must be > 0")


def patch_force(R: float, v_rms: float, d):
    """Sphere-plate force from large random patches, ``-pi eps0 R V^2 / d``.

    ``d`` may be an array.
    """
    d_arr = np.asarray(d, dtype=float)
    if np.any(~(d_arr > 0)) or not R > 0:
        raise DomainError("patch force needs d > 0 and R > 0")
    out = -math.pi * EPS0 * R * v_rms * v_rms / d_arr
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PatchSizeCheck:
    valid: bool
    lower_margin: float  # lambda / d
    upper_margin: float  # sqrt(R d) / lambda
    strictness: float

    def __bool__(self):
        return self.valid


def patch_size_valid(size: float, d: float, R: float, strictness: float = 10.0) -> PatchSizeCheck:
    """Whether a patch size sits in ``d << lambda << sqrt(R d)``.

    Both margins must reach ``strictness``; they are returned so a caller
    can see how close a marginal case was.
    """
    if not (size > 0 and d > 0 and R > 0):
        raise DomainError("patch size check needs positive inputs")
    lower = size / d
    upper = math.sqrt(R * d) / size
    return PatchSizeCheck(lower >= strictness and upper >= strictness, lower, upper, strictness)


def total_force(casimir_force_fn: Callable[[float], float], params: PatchParams, d: float) -> float:
    """Measured-force model: Casimir + patch - offset, all in N."""
    return casimir_force_fn(d) + patch_force(params.radius, params.v_rms, d) - params.offset


@dataclass(frozen=True)
class ResidualSeries:
    """``(d, |measured - theory|, sigma)`` triples in the data's own units."""

    points: tuple[tuple[float, float, float], ...]

    def __len__(self):
        return len(self.points)

    @property
    def separations(self):
        return [p[0] for p in self.points]

    @property
    def values(self):
        return [p[1] for p in self.points]


def residual_signal(measurements, theory_fn: Callable[[float], float]) -> ResidualSeries:
    """Pointwise absolute difference between data and a theory curve.

    ``measurements`` is a ``fitting.MeasurementSet`` or any iterable of
    ``(d, value, sigma, ...)`` rows.
    """
    rows: Iterable = getattr(measurements, "points", measurements)
    out = []
    for row in rows:
        d, value, sigma = row[0], row[1], row[2]
        out.append((d, abs(value - theory_fn(d)), sigma))
    return ResidualSeries(tuple(out))
