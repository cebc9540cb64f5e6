"""Casimir free energy, pressure and entropy between two parallel plates.

Lifshitz theory in the Matsubara representation. With ``y = 2 q d`` and
``zeta_l = 2 d xi_l / hbar c``::

    F(d, T) =  k_B T / (8 pi d^2) sum'_l  int_{zeta_l} y   ln(1 - r r e^-y) dy
    P(d, T) = -k_B T / (8 pi d^3) sum'_l  int_{zeta_l} y^2 r r e^-y / (1 - r r e^-y) dy

summed over TM and TE. At ``T = 0`` the sum becomes an integral over
``zeta``, done by Gauss-Legendre panels in ``sqrt(zeta)``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .constants import EV_PER_NM2, EV_PER_NM3, HBAR_C, K_B
from .dielectric import PermittivityModel, ZeroFrequencyLimit

__all__ = [
    "NonConvergenceError",
    "MatsubaraLadder",
    "PlatePair",
    "effective_temperature",
    "free_energy_per_area",
    "pressure",
    "entropy_per_area",
    "classical_term",
]

QUAD_RTOL = 1e-8
ZETA_MAX = 60.0
PANELS_START = 4
PANELS_MAX = 512
FREQ_RTOL = 1e-9


class NonConvergenceError(RuntimeError):
    """Matsubara sum or frequency quadrature did not reach its tolerance."""


@dataclass(frozen=True)
class MatsubaraLadder:
    """Matsubara frequencies ``xi_l = 2 pi k_B T l`` (eV) and truncation policy."""

    temperature: float
    rtol: float = 1e-9
    l_max: int = 100_000

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError("a Matsubara ladder needs T > 0")
        if not 0 < self.rtol <= 1e-3:
            raise ValueError("truncation tolerance must lie in (0, 1e-3]")
        if self.l_max < 10:
            raise ValueError("l_max must be >= 10")

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi * K_B * self.temperature

    def frequencies(self, start: int, stop: int) -> np.ndarray:
        return self.spacing * np.arange(start, stop, dtype=float)


@dataclass(frozen=True)
class PlatePair:
    """Two half-spaces at separation ``separation`` (nm) and temperature (K)."""

    material_1: PermittivityModel
    material_2: PermittivityModel
    separation: float
    temperature: float

    def __post_init__(self):
        if not self.separation > 0:
            raise ValueError("separation must be > 0")
        if not self.temperature >= 0:
            raise ValueError("temperature must be >= 0")

    def at(self, separation=None, temperature=None) -> "PlatePair":
        changes = {}
        if separation is not None:
            changes["separation"] = separation
        if temperature is not None:
            changes["temperature"] = temperature
        return dataclasses.replace(self, **changes)


def effective_temperature(d_nm: float) -> float:
    """``hbar c / (2 d k_B)`` in K."""
    return HBAR_C / (2.0 * d_nm * K_B)


def _zero_frequency(limit: ZeroFrequencyLimit, d: float):
    if limit.kind == "finite":
        return limit.value, 0.0
    if limit.kind == "inverse":
        return math.inf, 0.0
    # eps xi^2 -> value as xi -> 0
    return math.inf, limit.value * (2.0 * d / HBAR_C) ** 2


def _material_arrays(model, xi, zeta, d):
    eps = np.empty_like(xi)
    k2 = np.empty_like(xi)
    zero = xi == 0
    if np.any(zero):
        eps[zero], k2[zero] = _zero_frequency(model.zero_frequency(), d)
    pos = ~zero
    if np.any(pos):
        e = np.asarray(model.imag_axis(xi[pos]), dtype=float)
        eps[pos] = e
        k2[pos] = (e - 1.0) * zeta[pos] ** 2
    return eps, k2


def _terms(pair, kind, xi, zeta, quad_rtol):
    d = pair.separation
    eA, kA = _material_arrays(pair.material_1, xi, zeta, d)
    if pair.material_2 is pair.material_1:
        eB, kB = eA, kA
    else:
        eB, kB = _material_arrays(pair.material_2, xi, zeta, d)
    return _kernels.term_integrals(kind, zeta, eA, kA, eB, kB, quad_rtol)


def _matsubara_sum(pair, kind, rtol, l_max, quad_rtol):
    ladder = MatsubaraLadder(pair.temperature, rtol, l_max)
    zeta_step = 2.0 * pair.separation * ladder.spacing / HBAR_C
    terms: list[float] = []
    running = 0.0
    prev = None
    start, chunk = 0, 64
    while start <= l_max:
        stop = min(start + chunk, l_max + 1)
        xi = ladder.frequencies(start, stop)
        vals = _terms(pair, kind, xi, zeta_step * np.arange(start, stop, dtype=float), quad_rtol)
        if not np.all(np.isfinite(vals)):
            raise NonConvergenceError(f"non-finite Matsubara term near l={start}")
        for offset, v in enumerate(vals):
            l = start + offset
            term = 0.5 * v if l == 0 else float(v)
            terms.append(term)
            running += term
            if l >= 2:
                if term == 0.0 and prev == 0.0:
                    return math.fsum(terms), l
                ratio = term / prev if prev else math.inf
                if 0.0 <= ratio < 1.0 and abs(term * ratio / (1.0 - ratio)) <= rtol * abs(running):
                    return math.fsum(terms), l
            prev = term
        start = stop
        chunk = min(chunk * 2, 4096)
    raise NonConvergenceError(
        f"Matsubara sum not converged to rtol={rtol} within l_max={l_max} "
        f"(d={pair.separation} nm, T={pair.temperature} K)"
    )


@lru_cache(maxsize=None)
def _sqrt_rule(panels: int):
    """Nodes and weights for ``int_0^ZETA_MAX f(zeta) d zeta`` with ``zeta = u^2``.

    Dissipative models give the momentum integral a ``sqrt(zeta)`` cusp at
    zero frequency; in ``u`` the integrand is smooth again.
    """
    edges = np.linspace(0.0, math.sqrt(ZETA_MAX), panels + 1)
    x, w = np.polynomial.legendre.leggauss(16)
    half = 0.5 * np.diff(edges)[:, None]
    u = (0.5 * (edges[1:] + edges[:-1]))[:, None] + half * x[None, :]
    weight = half * w[None, :] * 2.0 * u
    return (u * u).ravel(), weight.ravel()


def _zero_temperature_integral(pair, kind, quad_rtol):
    """Integral over continuous ``zeta`` of the momentum integral."""
    previous = None
    panels = PANELS_START
    while panels <= PANELS_MAX:
        zeta, weight = _sqrt_rule(panels)
        xi = zeta * HBAR_C / (2.0 * pair.separation)
        value = math.fsum(weight * _terms(pair, kind, xi, zeta, quad_rtol))
        if not math.isfinite(value):
            break
        if previous is not None and abs(value - previous) <= FREQ_RTOL * abs(value):
            return value
        previous = value
        panels *= 2
    raise NonConvergenceError(
        f"T=0 frequency quadrature not converged with {PANELS_MAX} panels"
    )


def _compute(pair, kind, rtol, l_max, quad_rtol, workers):
    d = pair.separation
    with _kernels.workers(workers):
        if pair.temperature == 0:
            total = _zero_temperature_integral(pair, kind, quad_rtol)
            prefactor = HBAR_C / (32.0 * math.pi**2 * d**3)
        else:
            total, _ = _matsubara_sum(pair, kind, rtol, l_max, quad_rtol)
            prefactor = K_B * pair.temperature / (8.0 * math.pi * d**2)
    if kind == _kernels.PRESSURE:
        return -prefactor / d * total * EV_PER_NM3
    return prefactor * total * EV_PER_NM2


def free_energy_per_area(pair: PlatePair, *, rtol=1e-9, l_max=100_000,
                         quad_rtol=QUAD_RTOL, workers=None) -> float:
    """Casimir free energy per unit area in J/m^2 (negative for attraction)."""
    return _compute(pair, _kernels.FREE_ENERGY, rtol, l_max, quad_rtol, workers)


def pressure(pair: PlatePair, *, rtol=1e-9, l_max=100_000,
             quad_rtol=QUAD_RTOL, workers=None) -> float:
    """Casimir pressure ``-dF/dd`` in Pa (negative means attraction)."""
    return _compute(pair, _kernels.PRESSURE, rtol, l_max, quad_rtol, workers)


def entropy_per_area(pair: PlatePair, **kwargs) -> float:
    """Entropy ``-dF/dT`` in J/(m^2 K) by a central difference.

    The step is ``max(0.01 T, 0.5 K)``, clipped to ``T`` so the lower
    point never goes below zero temperature.
    """
    T = pair.temperature
    if not T > 0:
        raise ValueError("entropy needs T > 0")
    # the difference quotient loses ~log10(T/h) digits, so tighten the sum
    kwargs.setdefault("rtol", 1e-12)
    kwargs.setdefault("quad_rtol", 1e-11)
    h = min(max(0.01 * T, 0.5), T)
    upper = free_energy_per_area(pair.at(temperature=T + h), **kwargs)
    lower = free_energy_per_area(pair.at(temperature=T - h), **kwargs)
    return -(upper - lower) / (2.0 * h)


def classical_term(pair: PlatePair, *, quad_rtol=QUAD_RTOL) -> float:
    """Pressure contribution of the zero-frequency Matsubara term alone, Pa."""
    T = pair.temperature
    if T == 0:
        return 0.0
    d = pair.separation
    zero = np.zeros(1)
    value = _terms(pair, _kernels.PRESSURE, zero, zero, quad_rtol)[0]
    return -K_B * T / (8.0 * math.pi * d**3) * 0.5 * value * EV_PER_NM3
