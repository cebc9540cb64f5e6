import math
import os
import subprocess
import sys

import pytest

from thermocasimir.constants import EV_PER_NM2, EV_PER_NM3, HBAR_C, K_B, ZETA3
from thermocasimir.dielectric import CoreOnly, DcConductivity, Drude, OscillatorSet, Plasma
from thermocasimir.lifshitz import (
    MatsubaraLadder,
    NonConvergenceError,
    PlatePair,
    classical_term,
    effective_temperature,
    entropy_per_area,
    free_energy_per_area,
    pressure,
)

import reference_lifshitz as ref

GOLD_WP = HBAR_C / 22.0


def ideal_pressure(d):
    return -math.pi**2 * HBAR_C / (240 * d**4) * EV_PER_NM3


def ideal_energy(d):
    return -math.pi**2 * HBAR_C / (720 * d**3) * EV_PER_NM2


# ---------------------------------------------------------------- closed forms


def test_ideal_metal_zero_temperature(ideal_metal):
    pair = PlatePair(ideal_metal, ideal_metal, 1000.0, 0.0)
    # delta = 2e-4 nm leaves a 16/3 delta/d ~ 1e-6 finite-conductivity shift
    assert pressure(pair) == pytest.approx(ideal_pressure(1000.0), rel=2e-6)
    assert pressure(pair) == pytest.approx(-1.3002e-3, abs=1e-7)
    assert free_energy_per_area(pair) == pytest.approx(ideal_energy(1000.0), rel=2e-6)
    assert free_energy_per_area(pair) == pytest.approx(-4.334e-10, abs=1e-13)


def test_classical_terms_ideal_limit(ideal_metal):
    d, T = 2000.0, 300.0
    drude = Drude(omega_p=1e6, gamma=0.035)
    ct_d = classical_term(PlatePair(drude, drude, d, T))
    ct_p = classical_term(PlatePair(ideal_metal, ideal_metal, d, T))
    expected = -K_B * T * ZETA3 / (8 * math.pi * d**3) * EV_PER_NM3
    assert ct_d == pytest.approx(expected, rel=1e-9)
    assert ct_p == pytest.approx(2 * expected, rel=1e-5)
    assert classical_term(PlatePair(drude, drude, d, 0.0)) == 0.0


def test_classical_regime_plasma_twice_drude():
    d, T = 50_000.0, 300.0
    plasma, drude = Plasma(omega_p=1e6), Drude(omega_p=1e6, gamma=0.035)
    fp = free_energy_per_area(PlatePair(plasma, plasma, d, T))
    fd = free_energy_per_area(PlatePair(drude, drude, d, T))
    assert fp / fd == pytest.approx(2.0, rel=1e-4)
    expected = -K_B * T * ZETA3 / (16 * math.pi * d**2) * EV_PER_NM2
    assert fd == pytest.approx(expected, rel=1e-6)


def test_ideal_high_temperature_entropy_positive(ideal_metal):
    drude = Drude(omega_p=1e6, gamma=0.035)
    d = 20_000.0
    s = entropy_per_area(PlatePair(drude, drude, d, 300.0))
    assert s > 0
    assert s == pytest.approx(K_B * ZETA3 / (16 * math.pi * d**2) * EV_PER_NM2, rel=1e-3)


# ---------------------------------------------------------------- independent reference


@pytest.mark.parametrize("d,T,model,kind,frozen", [
    (700.0, 300.0, "drude", "P", -0.00410955716112784),
    (700.0, 300.0, "plasma", "P", -0.004625484175535516),
    (700.0, 300.0, "drude", "F", -9.479466209777534e-10),
    (10_000.0, 300.0, "plasma", "P", -3.9361931169768366e-07),
    (10_000.0, 300.0, "drude", "P", -1.9810897593856447e-07),
    (160.0, 300.0, "drude", "P", -1.0786301602441066),
])
def test_against_frozen_reference(d, T, model, kind, frozen, gold_drude, gold_plasma):
    # frozen values come from reference_lifshitz (scipy quad, plain sum)
    m = gold_drude if model == "drude" else gold_plasma
    pair = PlatePair(m, m, d, T)
    got = pressure(pair) if kind == "P" else free_energy_per_area(pair)
    assert got == pytest.approx(frozen, rel=1e-8)


@pytest.mark.parametrize("model,frozen", [("plasma", -0.004622220018483359), ("drude", -0.004537312631294188)])
def test_zero_temperature_against_reference(model, frozen, gold_drude, gold_plasma):
    m = gold_drude if model == "drude" else gold_plasma
    assert pressure(PlatePair(m, m, 700.0, 0.0)) == pytest.approx(frozen, rel=1e-8)


def test_live_reference_distinct_temperature(gold_drude):
    # one case recomputed live so the frozen table is not the only route
    got = pressure(PlatePair(gold_drude, gold_drude, 1500.0, 77.0))
    assert got == pytest.approx(ref.lifshitz(1500.0, 77.0, "drude", "P"), rel=1e-8)


# ---------------------------------------------------------------- consistency


@pytest.mark.parametrize("T", [0.0, 300.0])
@pytest.mark.parametrize("d", [150.0, 700.0, 3000.0])
def test_pressure_is_minus_energy_derivative(d, T, gold_drude):
    pair = PlatePair(gold_drude, gold_drude, d, T)
    h = 1e-3 * d
    kw = {"rtol": 1e-13, "quad_rtol": 1e-12}
    f = [free_energy_per_area(pair.at(separation=d + k * h), **kw) for k in (-2, -1, 1, 2)]
    fd = -(f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h * 1e-9)
    assert pressure(pair) == pytest.approx(fd, rel=1e-6)


def test_truncation_tolerance_halving(gold_plasma):
    pair = PlatePair(gold_plasma, gold_plasma, 300.0, 300.0)
    a = pressure(pair, rtol=1e-7)
    b = pressure(pair, rtol=5e-8)
    assert abs(a - b) <= 1e-7 * abs(b)


def test_nonconvergence_at_small_cap(gold_drude):
    pair = PlatePair(gold_drude, gold_drude, 100.0, 1.0)
    with pytest.raises(NonConvergenceError):
        pressure(pair, l_max=10)


def test_distinct_materials(gold_drude):
    si = DcConductivity(OscillatorSet(((200.79, 4.34, 0.0),)), 8.3e-4)
    ab = free_energy_per_area(PlatePair(gold_drude, si, 400.0, 300.0))
    ba = free_energy_per_area(PlatePair(si, gold_drude, 400.0, 300.0))
    assert ab == pytest.approx(ba, rel=1e-12)
    assert ab < 0


def test_dielectric_pair_weaker_than_metal(gold_drude):
    si = CoreOnly(OscillatorSet(((200.79, 4.34, 0.0),)))
    metal = free_energy_per_area(PlatePair(gold_drude, gold_drude, 400.0, 300.0))
    mixed = free_energy_per_area(PlatePair(gold_drude, si, 400.0, 300.0))
    assert metal < mixed < 0


# ---------------------------------------------------------------- entropy and Nernst


def test_plasma_entropy_vanishes(gold_plasma):
    pair = PlatePair(gold_plasma, gold_plasma, 500.0, 1.0)
    s1 = entropy_per_area(pair)
    s10 = entropy_per_area(pair.at(temperature=10.0))
    assert abs(s1) < abs(s10) / 5


def test_drude_entropy_negative_at_low_temperature(gold_drude, gold_plasma):
    s_d = entropy_per_area(PlatePair(gold_drude, gold_drude, 500.0, 1.0))
    s_p = entropy_per_area(PlatePair(gold_plasma, gold_plasma, 500.0, 1.0))
    assert s_d < 0
    assert abs(s_d) > 10 * abs(s_p)


def test_entropy_needs_positive_temperature(gold_drude):
    with pytest.raises(ValueError):
        entropy_per_area(PlatePair(gold_drude, gold_drude, 500.0, 0.0))


# ---------------------------------------------------------------- types


def test_ladder():
    ladder = MatsubaraLadder(300.0)
    xi = ladder.frequencies(0, 4)
    assert xi[0] == 0.0
    assert xi[1] == pytest.approx(2 * math.pi * K_B * 300.0)
    assert list(xi) == sorted(xi)
    assert MatsubaraLadder(600.0).spacing == pytest.approx(2 * ladder.spacing)
    for bad in ({"temperature": 0.0}, {"temperature": 1.0, "rtol": 0.0},
                {"temperature": 1.0, "rtol": 1e-2}, {"temperature": 1.0, "l_max": 5}):
        with pytest.raises(ValueError):
            MatsubaraLadder(**bad)


def test_plate_pair_validation(gold_drude):
    with pytest.raises(ValueError):
        PlatePair(gold_drude, gold_drude, 0.0, 300.0)
    with pytest.raises(ValueError):
        PlatePair(gold_drude, gold_drude, 100.0, -1.0)
    pair = PlatePair(gold_drude, gold_drude, 100.0, 300.0)
    assert pair.at(separation=200.0).separation == 200.0
    assert pair.at(temperature=4.0).temperature == 4.0


def test_effective_temperature():
    assert effective_temperature(1000.0) == pytest.approx(HBAR_C / (2000 * K_B))


def test_pure_numpy_fallback_matches():
    code = (
        "from thermocasimir import _kernels, Drude, PlatePair, pressure\n"
        "from thermocasimir.constants import HBAR_C\n"
        "m = Drude(omega_p=HBAR_C / 22, gamma=0.035)\n"
        "print(_kernels.backend(), repr(pressure(PlatePair(m, m, 700.0, 300.0))))\n"
    )
    env = dict(os.environ, THERMOCASIMIR_PURE_NUMPY="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, value = out.stdout.split()
    assert backend == "numpy"
    assert float(value) == pytest.approx(-0.00410955716112784, rel=1e-8)
