"""Packaged end-to-end runs on synthetic data.

``micromachined-24pt``  plasma-generated pressures at 700-746 nm fitted by
                        both expansions; mean of 33 noisy repetitions plus
                        the fits to each repetition
``torsion-full``        Drude total-force data at 21 separations 0.7-7.3 um,
                        two-parameter fits with both models
``torsion-above-3um``   the same at 6 separations 3.5-7.3 um
``modulation-demo``     Au sphere over Si with and without dc conductivity,
                        difference force by the PFA

All noise is drawn from ``Philox`` streams derived from one seed, so a
rerun with the same seed writes byte-identical files.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from . import asymptotics, fitting, tables
from .background import residual_signal
from .dielectric import load_material
from .geometry import SpherePlateGeometry, pfa_force, plate_free_energy

__all__ = ["SCENARIOS", "DEFAULT_SEED", "run_scenario", "material_path"]

DEFAULT_SEED = 20100
GOLD_DELTA = 22.0
TORSION = {"v_rms": 5.4, "offset": -3.0}  # mV, pN
TORSION_RADIUS = 0.156  # m
TORSION_ERROR = 0.28e-12  # N
MEAN_DATA_THRESHOLD = 0.5


def material_path(name: str) -> Path:
    return Path(str(resources.files("thermocasimir") / "data" / "materials" / f"{name}.json"))


def micromachined_grid():
    return 700.0 + 2.0 * np.arange(24)


def micromachined_sets(seed, repetitions: int = 33):
    """Individual noisy sets and their mean, all from the plasma expansion."""
    grid = micromachined_grid()
    truth = np.asarray(asymptotics.plasma_pressure(grid, GOLD_DELTA))
    children = np.random.SeedSequence(seed).spawn(repetitions)
    sets = [fitting.synthesize(lambda d: asymptotics.plasma_pressure(d, GOLD_DELTA), grid, 0.01, c)
            for c in children]
    mean_values = np.mean([s.value for s in sets], axis=0)
    # total errors of the mean stay at the 1% systematic level
    mean = fitting.MeasurementSet(grid, mean_values, 0.01 * np.abs(truth), None, "pressure")
    return sets, mean


def torsion_data(grid, seed):
    spec = fitting.FitSpec("total-force-drude", radius=TORSION_RADIUS)
    theory = spec.theory()
    return fitting.synthesize(lambda d: theory(d, TORSION), grid, TORSION_ERROR, seed,
                              absolute=True, kind="force")


def _fit_row(res):
    return [res.family, res.chi2_min, res.dof, res.probability] + [res.params[p] for p in sorted(res.params)]


def _micromachined(out: Path, seed, svg, config):
    sets, mean = micromachined_sets(seed)
    plasma = fitting.FitSpec("plasma-expansion")
    drude = fitting.FitSpec("drude-expansion")
    report = fitting.discriminate(mean, plasma, drude, known={"delta": GOLD_DELTA})
    tables.write_measurements(out / "measurements.csv", mean, config)

    rows = []
    for i, s in enumerate(sets):
        rp, rd = fitting.minimize(plasma, s), fitting.minimize(drude, s)
        rows.append([i, rp.params["delta"], rp.chi2_min, rp.probability,
                     rd.params["delta"], rd.chi2_min, rd.probability])
    tables.write_csv(out / "individual_fits.csv",
                     ["set", "delta_plasma_nm", "chi2_plasma", "p_plasma",
                      "delta_drude_nm", "chi2_drude", "p_drude"], rows, config)

    theory = lambda d: asymptotics.drude_pressure(d, GOLD_DELTA, 300.0)
    resid = residual_signal(mean, theory)
    tables.write_csv(out / "residuals_vs_drude.csv", ["d_nm", "abs_residual_Pa", "sigma_Pa"],
                     resid.points, config)

    dp = [r[1] for r in rows]
    dd = [r[4] for r in rows]
    summary = {
        "mean_fit": {"a": report.result_a.to_json(), "b": report.result_b.to_json()},
        "verdict": report.verdict,
        "implausible": report.implausible,
        "deviations": report.deviations,
        "individual": {
            "delta_plasma_range_nm": [min(dp), max(dp)],
            "delta_drude_range_nm": [min(dd), max(dd)],
            "p_plasma_range": [min(r[3] for r in rows), max(r[3] for r in rows)],
            "p_drude_range": [min(r[6] for r in rows), max(r[6] for r in rows)],
        },
    }
    lines = [
        f"plasma expansion: delta = {report.result_a.params['delta']:.2f} nm, "
        f"chi2 = {report.result_a.chi2_min:.3f}, P = {report.result_a.probability:.4f}",
        f"drude expansion:  delta = {report.result_b.params['delta']:.2f} nm, "
        f"chi2 = {report.result_b.chi2_min:.3f}, P = {report.result_b.probability:.4f}",
        f"verdict: {report.verdict}; implausible parameters: {report.implausible}",
        f"33 sets: plasma delta {min(dp):.2f}-{max(dp):.2f} nm, drude delta {min(dd):.2f}-{max(dd):.2f} nm",
    ]
    if svg:
        th_a = asymptotics.plasma_pressure(mean.d, report.result_a.params["delta"])
        th_b = asymptotics.drude_pressure(mean.d, report.result_b.params["delta"], 300.0)
        tables.svg_line_chart(out / "pressure.svg", mean.d,
                              {"data": mean.value * 1e3, "plasma fit": np.asarray(th_a) * 1e3,
                               "drude fit": np.asarray(th_b) * 1e3},
                              xlabel="d (nm)", ylabel="P (mPa)", title="micromachined-24pt",
                              markers=("data",))
    return summary, lines


def _torsion(out: Path, seed, svg, config, grid, label):
    data = torsion_data(grid, seed)
    tables.write_measurements(out / "measurements.csv", data, config)
    spec_d = fitting.FitSpec("total-force-drude", radius=TORSION_RADIUS)
    spec_p = fitting.FitSpec("total-force-plasma", radius=TORSION_RADIUS)
    report = fitting.discriminate(data, spec_d, spec_p, threshold=MEAN_DATA_THRESHOLD)
    rows = []
    for res, spec in ((report.result_a, spec_d), (report.result_b, spec_p)):
        th = spec.theory()(data.d, res.params)
        for d, v, s, t in zip(data.d, data.value, data.sigma, th):
            rows.append([res.family, d, v, t, abs(v - t), s])
    tables.write_csv(out / "residuals.csv",
                     ["family", "d_nm", "measured_N", "theory_N", "abs_residual_N", "sigma_N"], rows, config)
    summary = {"fits": {"a": report.result_a.to_json(), "b": report.result_b.to_json()},
               "verdict": report.verdict, "threshold": report.threshold}
    lines = []
    for res in (report.result_a, report.result_b):
        lines.append(f"{res.family}: V_rms = {res.params['v_rms']:.3f} mV, a = {res.params['offset']:.3f} pN, "
                     f"chi2 = {res.chi2_min:.2f}, f = {res.dof}, P = {res.probability:.3g}"
                     + (" [at bound]" if res.boundary_warning else ""))
    lines.append(f"verdict (threshold {report.threshold}): {report.verdict}")
    if svg:
        series = {"data": data.value * 1e12}
        for res, spec in ((report.result_a, spec_d), (report.result_b, spec_p)):
            series[res.family] = spec.theory()(data.d, res.params) * 1e12
        tables.svg_line_chart(out / "force.svg", data.d / 1e3, series, xlabel="d (um)",
                              ylabel="F_tot (pN)", title=label, markers=("data",))
    return summary, lines


def _modulation(out: Path, seed, svg, config):
    _, gold = load_material(material_path("gold"), "drude")
    _, si_dc = load_material(material_path("silicon"), "dc")
    _, si_core = load_material(material_path("silicon"), "core")
    radius_nm = 100e3
    T = 300.0
    grid = np.linspace(100.0, 500.0, 17)
    with_dc = plate_free_energy(gold, si_dc)
    without = plate_free_energy(gold, si_core)
    rows = []
    for d in grid:
        g = SpherePlateGeometry(float(d), radius_nm)
        f_dc = pfa_force(g, with_dc, T)
        f_core = pfa_force(g, without, T)
        rows.append([d, f_dc, f_core, f_dc - f_core])
    tables.write_csv(out / "difference_force.csv", ["d_nm", "F_dc_N", "F_core_N", "F_diff_N"], rows, config)
    diff = np.array([r[3] for r in rows])
    summary = {"radius_nm": radius_nm, "temperature_K": T,
               "F_diff_pN": {"first": diff[0] * 1e12, "last": diff[-1] * 1e12},
               "monotone_decreasing_magnitude": bool(np.all(np.diff(np.abs(diff)) < 0))}
    lines = [f"F_diff from {diff[0] * 1e12:.4f} pN at {grid[0]:.0f} nm to "
             f"{diff[-1] * 1e12:.4f} pN at {grid[-1]:.0f} nm (sphere radius {radius_nm / 1e3:.0f} um)",
             "silicon parameters are illustrative, see data/materials/silicon.json"]
    if svg:
        tables.svg_line_chart(out / "difference_force.svg", grid, {"F_diff": diff * 1e12},
                              xlabel="d (nm)", ylabel="F_diff (pN)", title="modulation-demo")
    return summary, lines


SCENARIOS = ("micromachined-24pt", "torsion-full", "torsion-above-3um", "modulation-demo")


def run_scenario(name: str, out_dir, *, seed: int = DEFAULT_SEED, svg: bool = False) -> dict:
    """Run one scenario, writing its files into ``out_dir``; returns the summary."""
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; expected one of {SCENARIOS}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = {"scenario": name, "seed": int(seed)}
    if name == "micromachined-24pt":
        summary, lines = _micromachined(out, seed, svg, config)
    elif name == "torsion-full":
        summary, lines = _torsion(out, seed, svg, config, np.geomspace(700.0, 7300.0, 21), name)
    elif name == "torsion-above-3um":
        summary, lines = _torsion(out, seed, svg, config, np.geomspace(3500.0, 7300.0, 6), name)
    else:
        summary, lines = _modulation(out, seed, svg, config)
    summary = {"scenario": name, "seed": int(seed), **summary}
    tables.write_json(out / "summary.json", summary)
    (out / "report.txt").write_text("\n".join([f"scenario {name}, seed {seed}"] + lines) + "\n")
    return summary
