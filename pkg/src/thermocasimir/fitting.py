"""Chi-square fits of Casimir data to competing theories.

Four theory families are available:

``plasma-expansion``   large-separation plasma pressure, free ``delta`` (nm)
``drude-expansion``    same plus the classical thermal term, free ``delta``
``total-force-drude``  PFA Drude force + patch term - offset, free ``v_rms`` (mV), ``offset`` (pN)
``total-force-plasma`` the same with the plasma model

One free parameter is fitted by golden-section search after a coarse
scan, two by Nelder-Mead restarted from the best points of a 5x5 seed
grid spanning the bounds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import optimize, special

from . import asymptotics
from .background import patch_force
from .constants import HBAR_C, NM
from .dielectric import DomainError, Drude, Plasma
from .lifshitz import PlatePair, free_energy_per_area

__all__ = [
    "FitConvergenceError",
    "BoundaryWarning",
    "MeasurementSet",
    "FitSpec",
    "FitResult",
    "Discrimination",
    "FAMILIES",
    "DEFAULT_BOUNDS",
    "chi_square",
    "minimize",
    "golden_section",
    "chi2_survival",
    "synthesize",
    "discriminate",
    "casimir_force",
]

FAMILIES = {
    "plasma-expansion": ("delta",),
    "drude-expansion": ("delta",),
    "total-force-drude": ("v_rms", "offset"),
    "total-force-plasma": ("v_rms", "offset"),
}
DEFAULT_BOUNDS = {"delta": (0.1, 100.0), "v_rms": (0.0, 100.0), "offset": (-100.0, 100.0)}
UNITS = {"delta": "nm", "v_rms": "mV", "offset": "pN"}

GOLDEN_XTOL = 1e-7  # fraction of the bound span
SCAN_POINTS = 33
SEED_GRID = 5
RESTARTS = 20
SIMPLEX_XTOL = 1e-6  # simplex size in sin^2 coordinates, so <= 1e-6 of the span
BOUNDARY_FRACTION = 0.01


class FitConvergenceError(RuntimeError):
    pass


class BoundaryWarning(UserWarning):
    pass


@dataclass(frozen=True)
class MeasurementSet:
    """Separations (nm) with measured values, their errors and separation errors.

    ``kind`` is ``"pressure"`` (Pa) or ``"force"`` (N).
    """

    d: np.ndarray
    value: np.ndarray
    sigma: np.ndarray
    sigma_d: np.ndarray | None = None
    kind: str = "pressure"
    confidence: float = 67.0

    def __post_init__(self):
        d = np.array(self.d, dtype=float)
        n = d.size
        value = np.array(self.value, dtype=float)
        sigma = np.broadcast_to(np.array(self.sigma, dtype=float), (n,)).copy()
        sigma_d = np.zeros(n) if self.sigma_d is None else np.broadcast_to(
            np.array(self.sigma_d, dtype=float), (n,)).copy()
        if d.ndim != 1 or value.shape != d.shape:
            raise ValueError("d and value must be 1-D arrays of equal length")
        if n < 2:
            raise ValueError("a measurement set needs at least 2 points")
        if np.any(~(d > 0)):
            raise ValueError("separations must be > 0")
        if np.unique(d).size != n:
            raise ValueError("separations must be distinct")
        if np.any(~(sigma > 0)):
            raise ValueError("value errors must be > 0")
        if np.any(~(sigma_d >= 0)):
            raise ValueError("separation errors must be >= 0")
        if self.kind not in ("pressure", "force"):
            raise ValueError(f"kind must be 'pressure' or 'force', not {self.kind!r}")
        for name, arr in (("d", d), ("value", value), ("sigma", sigma), ("sigma_d", sigma_d)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.d.size

    @property
    def points(self):
        return list(zip(self.d.tolist(), self.value.tolist(), self.sigma.tolist(), self.sigma_d.tolist()))

    def subset(self, mask) -> "MeasurementSet":
        mask = np.asarray(mask)
        return MeasurementSet(self.d[mask], self.value[mask], self.sigma[mask],
                              self.sigma_d[mask], self.kind, self.confidence)

    def scaled_errors(self, c: float) -> "MeasurementSet":
        return MeasurementSet(self.d, self.value, self.sigma * c, self.sigma_d, self.kind, self.confidence)


@lru_cache(maxsize=64)
def _casimir_force_cached(variant, omega_p, gamma, T, R, d):
    if variant == "drude":
        model = Drude(omega_p=omega_p, gamma=gamma)
    else:
        model = Plasma(omega_p=omega_p)
    out = np.array([2.0 * math.pi * R * free_energy_per_area(PlatePair(model, model, x, T)) for x in d])
    out.setflags(write=False)
    return out


def casimir_force(variant: str, d, T: float, R: float,
                  omega_p: float = HBAR_C / 22.0, gamma: float = 0.035) -> np.ndarray:
    """PFA sphere-plate Casimir force (N) for a simple metal; ``R`` in m, ``d`` in nm."""
    d = tuple(float(x) for x in np.atleast_1d(d))
    return _casimir_force_cached(variant, float(omega_p), float(gamma), float(T), float(R), d)


@dataclass(frozen=True)
class FitSpec:
    """Theory family, its free parameters with bounds, and fixed context.

    ``radius`` is in m; ``fixed`` holds values for family parameters that
    are not fitted.
    """

    family: str
    free: tuple[str, ...] | None = None
    bounds: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    fixed: Mapping[str, float] = field(default_factory=dict)
    temperature: float = 300.0
    radius: float = 0.156
    omega_p: float = HBAR_C / 22.0
    gamma: float = 0.035

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown theory family {self.family!r}; expected one of {list(FAMILIES)}")
        names = FAMILIES[self.family]
        free = names if self.free is None else tuple(self.free)
        if not 1 <= len(free) <= 2:
            raise ValueError("between one and two free parameters are supported")
        for p in free:
            if p not in names:
                raise ValueError(f"{p!r} is not a parameter of {self.family}")
        missing = [p for p in names if p not in free and p not in self.fixed]
        if missing:
            raise ValueError(f"parameters {missing} are neither free nor fixed")
        bounds = {p: tuple(map(float, self.bounds.get(p, DEFAULT_BOUNDS[p]))) for p in free}
        for p, (lo, hi) in bounds.items():
            if not lo < hi:
                raise ValueError(f"empty bounds for {p}: {lo}, {hi}")
        object.__setattr__(self, "free", free)
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "fixed", dict(self.fixed))

    @property
    def k(self) -> int:
        return len(self.free)

    @classmethod
    def from_dict(cls, spec: Mapping) -> "FitSpec":
        known = {"family", "free", "bounds", "fixed", "temperature", "radius", "omega_p", "gamma"}
        unknown = set(spec) - known
        if unknown:
            raise ValueError(f"unknown fit-spec keys {sorted(unknown)}")
        return cls(**spec)

    def theory(self) -> Callable[[np.ndarray, Mapping[str, float]], np.ndarray]:
        """``(d_nm, params) -> values`` for this family."""
        family, T = self.family, self.temperature
        if family == "plasma-expansion":
            return lambda d, p: np.asarray(asymptotics.plasma_pressure(d, p["delta"]))
        if family == "drude-expansion":
            return lambda d, p: np.asarray(asymptotics.drude_pressure(d, p["delta"], T))
        variant = family.rsplit("-", 1)[1]
        R = self.radius

        def total(d, p):
            d = np.asarray(d, dtype=float)
            casimir = casimir_force(variant, d, T, R, self.omega_p, self.gamma)
            return casimir + patch_force(R, p["v_rms"] * 1e-3, d * NM) - p["offset"] * 1e-12

        return total


@dataclass(frozen=True)
class FitResult:
    family: str
    chi2_min: float
    params: dict
    dof: int
    probability: float
    boundary_warning: bool

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "chi2_min": self.chi2_min,
            "params": {f"{k}_{UNITS[k]}": v for k, v in self.params.items()},
            "dof": self.dof,
            "probability": self.probability,
            "boundary_warning": self.boundary_warning,
        }


def chi_square(data: MeasurementSet, theory_fn, params: Mapping[str, float],
               effective_variance: bool = False) -> float:
    """Sum of squared normalized residuals.

    With ``effective_variance`` the separation errors are folded in as
    ``sigma^2 + (dP/dd sigma_d)^2``, the slope taken by central difference.
    """
    th = np.asarray(theory_fn(data.d, params), dtype=float)
    if th.shape != data.d.shape or not np.all(np.isfinite(th)):
        raise DomainError("theory could not be evaluated at every separation")
    var = data.sigma**2
    if effective_variance and np.any(data.sigma_d > 0):
        h = 1e-4 * data.d
        slope = (np.asarray(theory_fn(data.d + h, params)) - np.asarray(theory_fn(data.d - h, params))) / (2 * h)
        var = var + (slope * data.sigma_d) ** 2
    return math.fsum(((data.value - th) ** 2 / var).tolist())


def golden_section(f: Callable[[float], float], a: float, b: float, xtol: float) -> tuple[float, float]:
    """Minimum of a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _fit_one(objective, lo, hi):
    # coarse scan first so a non-unimodal objective still lands in the right basin
    grid = np.linspace(lo, hi, SCAN_POINTS)
    values = [objective(x) for x in grid]
    i = int(np.argmin(values))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, SCAN_POINTS - 1)]
    x, fx = golden_section(objective, a, b, GOLDEN_XTOL * (hi - lo))
    if values[i] < fx:
        return float(grid[i]), values[i]
    return x, fx


def _fit_two(objective, lo, hi):
    # x = lo + span sin^2(theta) keeps every vertex inside the box without
    # clipping, which would flatten the simplex onto a bound
    span = hi - lo

    def to_x(theta):
        return lo + span * np.sin(theta) ** 2

    def inner(theta):
        return objective(to_x(theta))

    ticks = np.arcsin(np.sqrt((np.arange(SEED_GRID) + 0.5) / SEED_GRID))
    seeds = [np.array([u, v]) for u in ticks for v in ticks]
    ranked = sorted(range(len(seeds)), key=lambda j: (inner(seeds[j]), j))[:RESTARTS]
    found = []
    for j in ranked:
        t0 = seeds[j]
        simplex = np.array([t0, t0 + [0.2, 0.0], t0 + [0.0, 0.2]])
        res = optimize.minimize(
            inner, t0, method="Nelder-Mead",
            options={"initial_simplex": simplex, "xatol": SIMPLEX_XTOL, "fatol": math.inf,
                     "maxiter": 4000},
        )
        if res.success:
            x = to_x(res.x)
            found.append((float(res.fun), tuple(x.tolist())))
    if not found:
        raise FitConvergenceError(f"simplex did not converge from any of {RESTARTS} starts")
    fun, x = min(found)
    return np.array(x), fun


def minimize(spec: FitSpec, data: MeasurementSet, *, effective_variance: bool = False) -> FitResult:
    """Best-fit parameters, chi-square minimum and survival probability."""
    dof = len(data) - spec.k
    if dof < 1:
        raise ValueError(f"{len(data)} points leave no degrees of freedom for {spec.k} parameters")
    theory = spec.theory()
    lo = np.array([spec.bounds[p][0] for p in spec.free])
    hi = np.array([spec.bounds[p][1] for p in spec.free])

    def objective(x):
        params = dict(spec.fixed)
        params.update(zip(spec.free, np.atleast_1d(x).tolist()))
        return chi_square(data, theory, params, effective_variance)

    if spec.k == 1:
        x, chi2 = _fit_one(lambda v: objective([v]), lo[0], hi[0])
        best = np.array([x])
    else:
        best, chi2 = _fit_two(objective, lo, hi)
    near = np.minimum(best - lo, hi - best) <= BOUNDARY_FRACTION * (hi - lo)
    boundary = bool(np.any(near))
    if boundary:
        names = [p for p, flag in zip(spec.free, near) if flag]
        warnings.warn(f"{spec.family}: best {names} within 1% of a bound", BoundaryWarning, stacklevel=2)
    params = {p: float(v) for p, v in zip(spec.free, best)}
    return FitResult(spec.family, float(chi2), params, dof, chi2_survival(chi2, dof), boundary)


def chi2_survival(chi2: float, dof: int) -> float:
    """``P(chi^2 > chi2)`` for ``dof`` degrees of freedom."""
    if isinstance(dof, bool) or int(dof) != dof or dof < 1:
        raise DomainError(f"degrees of freedom must be a positive integer, got {dof!r}")
    if not (chi2 >= 0 and math.isfinite(chi2)):
        raise DomainError(f"chi-square must be finite and >= 0, got {chi2!r}")
    return float(special.gammaincc(0.5 * int(dof), 0.5 * chi2))


def synthesize(theory_fn: Callable, grid: Sequence[float], noise: float, seed, *,
               error: float | None = None, absolute: bool = False,
               kind: str = "pressure", sigma_d: float = 0.0) -> MeasurementSet:
    """Noisy samples of a theory curve on ``grid`` (nm).

    Relative mode: value = theory + noise |theory| z, sigma = error |theory|.
    Absolute mode: noise and error are in the value's own units.
    ``error`` defaults to ``noise``, or to 1% (relative) when noise is 0.
    ``seed`` is anything ``numpy.random.Philox`` accepts.
    """
    if not noise >= 0:
        raise ValueError("noise must be >= 0")
    d = np.asarray(grid, dtype=float)
    if d.size == 0:
        raise ValueError("empty grid")
    try:
        th = np.asarray(theory_fn(d), dtype=float)
        if th.shape != d.shape:
            raise ValueError
    except (TypeError, ValueError):
        th = np.array([float(theory_fn(x)) for x in d])
    if error is None:
        error = noise if noise > 0 else (0.0 if absolute else 0.01)
    scale = np.ones_like(th) if absolute else np.abs(th)
    z = np.random.Generator(np.random.Philox(seed)).standard_normal(d.size)
    value = th + noise * scale * z if noise > 0 else th.copy()
    return MeasurementSet(d, value, error * scale, np.full(d.size, sigma_d), kind)


@dataclass(frozen=True)
class Discrimination:
    result_a: FitResult
    result_b: FitResult
    deviations: dict  # {"a"/"b": {param: relative deviation from known}}
    implausible: dict  # {"a"/"b": [params flagged]}
    verdict: str  # "A-favored", "B-favored" or "indeterminate"
    threshold: float


def discriminate(data: MeasurementSet, spec_a: FitSpec, spec_b: FitSpec, *,
                 threshold: float = 0.05, known: Mapping[str, float] | None = None,
                 plausibility_tol: float = 0.25) -> Discrimination:
    """Fit both specs and say whether the data pick one.

    The verdict is indeterminate whenever both survival probabilities
    exceed ``threshold``; a good fit alone does not select a theory.
    Fitted parameters are compared with ``known`` values and flagged when
    off by more than ``plausibility_tol`` relative.
    """
    known = dict(known or {})
    ra, rb = minimize(spec_a, data), minimize(spec_b, data)
    deviations, implausible = {}, {}
    for tag, res in (("a", ra), ("b", rb)):
        dev = {p: abs(v - known[p]) / abs(known[p]) for p, v in res.params.items() if known.get(p)}
        deviations[tag] = dev
        implausible[tag] = sorted(p for p, x in dev.items() if x > plausibility_tol)
    pa, pb = ra.probability, rb.probability
    if pa > threshold and pb <= threshold:
        verdict = "A-favored"
    elif pb > threshold and pa <= threshold:
        verdict = "B-favored"
    else:
        verdict = "indeterminate"
    return Discrimination(ra, rb, deviations, implausible, verdict, threshold)
