"""Command-line interface.

    thermocasimir epsilon  --material gold.json --model drude --model plasma
    thermocasimir pressure --material gold.json --model drude --model plasma --d-min 160 --d-max 750
    thermocasimir force    --material gold.json --radius 150e-6 ...
    thermocasimir fit      --data measurements.csv --spec spec.json --out fit/
    thermocasimir scenario micromachined-24pt --out runs/mm --svg

Exit codes: 0 ok, 2 configuration or input error, 3 numerical failure,
4 fit did not converge.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import _kernels, fitting, scenarios, tables
from .background import residual_signal
from .dielectric import eval_imag_axis, load_material
from .geometry import SpherePlateGeometry, pfa_force, plate_free_energy
from .lifshitz import NonConvergenceError, PlatePair, pressure

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_FIT = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


def _materials(args):
    """``[(column name, model)]`` for every requested variant."""
    if not args.material:
        raise ConfigError("--material is required")
    path = Path(args.material)
    if not path.exists():
        raise ConfigError(f"material file not found: {path}")
    variants = args.model or [None]
    out = []
    for v in variants:
        name, model = load_material(path, v)
        out.append((f"{name}_{model.variant}", model))
    return out


def _grid(lo, hi, n, log):
    if not (lo > 0 and hi >= lo and n >= 1):
        raise ConfigError(f"need 0 < min <= max and points >= 1 (got {lo}, {hi}, {n})")
    if n == 1 or hi == lo:
        if n != 1:
            raise ConfigError("min == max needs --points 1")
        return np.array([float(lo)])
    return np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)


def _emit(args, header, rows, config, svg_series=None, svg_labels=("", "")):
    if args.out:
        path = tables.write_csv(args.out, header, rows, config)
        if args.svg and svg_series is not None:
            x, series = svg_series
            tables.svg_line_chart(Path(path).with_suffix(".svg"), x, series,
                                  xlabel=svg_labels[0], ylabel=svg_labels[1], title=args.command)
    else:
        sys.stdout.write(f"# config={tables.config_hash(config)}\n")
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(tables._cell(v) for v in row) + "\n")


def cmd_epsilon(args) -> int:
    models = _materials(args)
    xi = _grid(args.xi_min, args.xi_max, args.points, log=True)
    cols = [np.atleast_1d(eval_imag_axis(m, xi)) for _, m in models]
    rows = [[x] + [c[i] for c in cols] for i, x in enumerate(xi)]
    config = {"command": "epsilon", "material": args.material, "models": args.model,
              "xi": [args.xi_min, args.xi_max, args.points]}
    _emit(args, ["xi_eV"] + [f"eps_{n}" for n, _ in models], rows, config,
          (xi, {n: c for (n, _), c in zip(models, cols)}), ("xi (eV)", "eps(i xi)"))
    return EXIT_OK


def _curves(args, force: bool):
    models = _materials(args)
    if args.temp < 0:
        raise ConfigError("--temp must be >= 0")
    d = _grid(args.d_min, args.d_max, args.points, log=args.log)
    if force and not args.radius > 0:
        raise ConfigError("--radius (m) must be > 0")
    cols = []
    for _, m in models:
        if force:
            fn = plate_free_energy(m, workers=args.workers)
            col = [pfa_force(SpherePlateGeometry(x, args.radius / 1e-9), fn, args.temp) for x in d]
        else:
            col = [pressure(PlatePair(m, m, x, args.temp), workers=args.workers) for x in d]
        cols.append(np.array(col))
    rows = [[x] + [c[i] for c in cols] for i, x in enumerate(d)]
    unit = "N" if force else "Pa"
    config = {"command": args.command, "material": args.material, "models": args.model,
              "d": [args.d_min, args.d_max, args.points, args.log], "T": args.temp,
              "R": args.radius if force else None}
    _emit(args, ["d_nm"] + [f"{n}_{unit}" for n, _ in models], rows, config,
          (d, {n: c for (n, _), c in zip(models, cols)}), ("d (nm)", f"{args.command} ({unit})"))
    return EXIT_OK


def cmd_pressure(args) -> int:
    return _curves(args, force=False)


def cmd_force(args) -> int:
    return _curves(args, force=True)


def _load_spec(args):
    if args.spec:
        try:
            with open(args.spec) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read fit spec {args.spec}: {exc}") from None
    elif args.family:
        raw = {"family": args.family}
    else:
        raise ConfigError("give --spec or --family")
    known = raw.pop("known", {})
    return fitting.FitSpec.from_dict(raw), known


def cmd_fit(args) -> int:
    if not args.data:
        raise ConfigError("--data is required")
    data = tables.read_measurements(args.data, args.kind)
    spec, known = _load_spec(args)
    if args.temp is not None:
        spec = dataclasses.replace(spec, temperature=args.temp)
    if args.radius is not None:
        spec = dataclasses.replace(spec, radius=args.radius)
    result = fitting.minimize(spec, data)
    doc = result.to_json()
    doc["known"] = known
    theory = spec.theory()
    resid = residual_signal(data, lambda d: float(theory(np.array([d]), result.params)[0]))
    if args.out:
        out = Path(args.out)
        config = {"command": "fit", "data": args.data, "spec": doc["params"], "family": spec.family}
        tables.write_json(out / "fit.json", doc)
        tables.write_csv(out / "residuals.csv", ["d_nm", "abs_residual", "sigma"], resid.points, config)
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    params = ", ".join(f"{k} = {v:.4g} {fitting.UNITS[k]}" for k, v in result.params.items())
    print(f"{spec.family}: {params}; chi2_min = {result.chi2_min:.4g}, f = {result.dof}, "
          f"P(chi2 > chi2_min) = {result.probability:.4g}")
    if result.boundary_warning:
        print("warning: best-fit parameter lies within 1% of its bound")
    for p, v in result.params.items():
        if known.get(p) and abs(v - known[p]) / abs(known[p]) > 0.25:
            print(f"warning: fitted {p} = {v:.4g} {fitting.UNITS[p]} is implausible against the "
                  f"known {known[p]} {fitting.UNITS[p]}")
    return EXIT_OK


def cmd_scenario(args) -> int:
    if args.name not in scenarios.SCENARIOS:
        raise ConfigError(f"unknown scenario {args.name!r}; choose from {', '.join(scenarios.SCENARIOS)}")
    out = args.out or f"scenario-{args.name}"
    scenarios.run_scenario(args.name, out, seed=args.seed, svg=args.svg)
    sys.stdout.write((Path(out) / "report.txt").read_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thermocasimir", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output path (CSV file, or directory for fit/scenario)")
        p.add_argument("--svg", action="store_true", help="also write an SVG chart")
        p.add_argument("--workers", type=int, default=None, help="kernel threads")

    p = sub.add_parser("epsilon", help="tabulate eps(i xi)")
    p.add_argument("--material", required=True)
    p.add_argument("--model", action="append", help="variant override; repeat for several columns")
    p.add_argument("--xi-min", type=float, default=0.01)
    p.add_argument("--xi-max", type=float, default=100.0)
    p.add_argument("--points", type=int, default=50)
    common(p)
    p.set_defaults(func=cmd_epsilon)

    for name, func in (("pressure", cmd_pressure), ("force", cmd_force)):
        p = sub.add_parser(name, help=f"plate {name}" if name == "pressure" else "PFA sphere-plate force")
        p.add_argument("--material", required=True)
        p.add_argument("--model", action="append")
        p.add_argument("--d-min", type=float, default=160.0, help="nm")
        p.add_argument("--d-max", type=float, default=750.0, help="nm")
        p.add_argument("--points", type=int, default=20)
        p.add_argument("--log", action="store_true", help="log-spaced separations")
        p.add_argument("--temp", type=float, default=300.0, help="K")
        p.add_argument("--radius", type=float, default=150e-6, help="sphere radius in m")
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("fit", help="chi-square fit of a measurement CSV")
    p.add_argument("--data")
    p.add_argument("--spec", help="fit spec JSON")
    p.add_argument("--family", choices=sorted(fitting.FAMILIES))
    p.add_argument("--kind", choices=("pressure", "force"))
    p.add_argument("--temp", type=float, default=None)
    p.add_argument("--radius", type=float, default=None, help="m")
    common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("scenario", help="run a packaged synthetic-data scenario")
    p.add_argument("name")
    p.add_argument("--seed", type=int, default=scenarios.DEFAULT_SEED)
    common(p)
    p.set_defaults(func=cmd_scenario)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", None) is not None and args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with _kernels.workers(args.workers):
            return args.func(args)
    except fitting.FitConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except (NonConvergenceError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
