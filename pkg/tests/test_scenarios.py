import json

import numpy as np
import pytest

from thermocasimir import _kernels
from thermocasimir.dielectric import CoreOnly, DcConductivity, Drude, OscillatorSet
from thermocasimir.geometry import SpherePlateGeometry, pfa_force, plate_free_energy
from thermocasimir.scenarios import SCENARIOS, run_scenario


def file_bytes(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


@pytest.mark.filterwarnings("ignore::thermocasimir.fitting.BoundaryWarning")
@pytest.mark.parametrize("name", SCENARIOS)
def test_rerun_bit_identical(tmp_path, name):
    run_scenario(name, tmp_path / "a", seed=7, svg=True)
    run_scenario(name, tmp_path / "b", seed=7, svg=True)
    a, b = file_bytes(tmp_path / "a"), file_bytes(tmp_path / "b")
    assert a.keys() == b.keys() and "summary.json" in a
    assert a == b


def test_worker_count_independent(tmp_path):
    with _kernels.workers(1):
        run_scenario("modulation-demo", tmp_path / "one", seed=3)
    with _kernels.workers(4):
        run_scenario("modulation-demo", tmp_path / "four", seed=3)
    assert file_bytes(tmp_path / "one") == file_bytes(tmp_path / "four")


def test_seed_changes_output(tmp_path):
    run_scenario("micromachined-24pt", tmp_path / "a", seed=1)
    run_scenario("micromachined-24pt", tmp_path / "b", seed=2)
    assert (tmp_path / "a" / "measurements.csv").read_bytes() != (tmp_path / "b" / "measurements.csv").read_bytes()


def test_micromachined_summary(tmp_path):
    s = run_scenario("micromachined-24pt", tmp_path)
    assert 21.0 <= s["mean_fit"]["a"]["params"]["delta_nm"] <= 23.0
    assert s["mean_fit"]["b"]["params"]["delta_nm"] < 10.0
    assert s["verdict"] == "indeterminate"
    assert s["implausible"]["b"] == ["delta"]
    lines = (tmp_path / "individual_fits.csv").read_text().splitlines()
    assert len(lines) == 2 + 33


@pytest.mark.filterwarnings("ignore::thermocasimir.fitting.BoundaryWarning")
def test_torsion_summaries(tmp_path):
    s = run_scenario("torsion-above-3um", tmp_path / "t")
    fits = s["fits"]
    assert fits["a"]["dof"] == 4 and fits["b"]["dof"] == 4
    for f in fits.values():
        assert 0.0 <= f["probability"] <= 1.0
    s = run_scenario("torsion-full", tmp_path / "f")
    assert s["fits"]["a"]["dof"] == 19


def test_modulation_monotone(tmp_path):
    s = run_scenario("modulation-demo", tmp_path)
    assert s["monotone_decreasing_magnitude"]
    assert json.loads((tmp_path / "summary.json").read_text())["radius_nm"] == 100e3


def test_modulation_vanishes_without_conductivity():
    core = OscillatorSet(((200.79, 4.34, 0.0),))
    gold = Drude(omega_p=8.97, gamma=0.035)
    a = plate_free_energy(gold, DcConductivity(core, 0.0))
    b = plate_free_energy(gold, CoreOnly(core))
    for d in np.linspace(100.0, 500.0, 3):
        g = SpherePlateGeometry(d, 1e5)
        assert pfa_force(g, a, 300.0) - pfa_force(g, b, 300.0) == 0.0


def test_unknown_scenario(tmp_path):
    with pytest.raises(ValueError):
        run_scenario("nope", tmp_path)
