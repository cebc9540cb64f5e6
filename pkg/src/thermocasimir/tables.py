"""CSV/JSON/SVG input and output.

Every CSV written here starts with one comment line carrying a hash of
the configuration that produced it and the constants version, then a
header row. Floats are written with ``repr`` so a file read back gives
the same doubles and reruns produce identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .constants import CONSTANTS_VERSION
from .fitting import MeasurementSet

__all__ = [
    "MEASUREMENT_HEADER",
    "MeasurementFormatError",
    "config_hash",
    "write_csv",
    "read_measurements",
    "write_measurements",
    "write_json",
    "svg_line_chart",
]

MEASUREMENT_HEADER = ["d_nm", "value", "sigma_value", "sigma_d_nm"]


class MeasurementFormatError(ValueError):
    pass


def _plain(obj):
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    return obj


def config_hash(config: Mapping) -> str:
    blob = json.dumps(_plain(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence], config: Mapping) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# config={config_hash(config)} constants={CONSTANTS_VERSION}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_plain(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_measurements(path, kind: str | None = None) -> MeasurementSet:
    """Read a ``d_nm,value,sigma_value,sigma_d_nm`` file.

    ``kind`` and ``confidence`` come from a JSON sidecar with the same
    stem when present; an explicit ``kind`` argument wins.
    """
    path = Path(path)
    meta = {}
    sidecar = path.with_suffix(".json")
    if sidecar.exists():
        with open(sidecar) as fh:
            meta = json.load(fh)
    rows = []
    header_seen = False
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if not header_seen:
                if [c.strip() for c in row] != MEASUREMENT_HEADER:
                    raise MeasurementFormatError(
                        f"{path}:{lineno}: expected header {','.join(MEASUREMENT_HEADER)}, got {','.join(row)}"
                    )
                header_seen = True
                continue
            if len(row) != 4:
                raise MeasurementFormatError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            try:
                values = [float(c) for c in row]
            except ValueError:
                raise MeasurementFormatError(f"{path}:{lineno}: non-numeric value in {row!r}") from None
            if not all(math.isfinite(v) for v in values):
                raise MeasurementFormatError(f"{path}:{lineno}: non-finite value in {row!r}")
            rows.append(values)
    if not header_seen:
        raise MeasurementFormatError(f"{path}: missing header row")
    arr = np.array(rows, dtype=float).reshape(-1, 4)
    try:
        return MeasurementSet(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3],
                              kind or meta.get("kind", "pressure"), float(meta.get("confidence", 67.0)))
    except ValueError as exc:
        raise MeasurementFormatError(f"{path}: {exc}") from None


def write_measurements(path, data: MeasurementSet, config: Mapping) -> Path:
    path = write_csv(path, MEASUREMENT_HEADER, zip(data.d, data.value, data.sigma, data.sigma_d), config)
    units = {"pressure": "Pa", "force": "N"}[data.kind]
    write_json(path.with_suffix(".json"), {"kind": data.kind, "units": units, "confidence": data.confidence})
    return path


_COLORS = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#566573")


def svg_line_chart(path, x, series: Mapping[str, Sequence[float]], *, xlabel: str = "",
                   ylabel: str = "", title: str = "", markers: Sequence[str] = ()) -> Path:
    """Minimal standalone SVG; names in ``markers`` are drawn as points."""
    width, height, pad = 640, 420, 60
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    ally = np.concatenate([v[np.isfinite(v)] for v in ys.values()]) if ys else np.zeros(1)
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2}" y="{pad / 2}" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{width / 2}" y="{height - 15}" text-anchor="middle">{xlabel}</text>',
        f'<text x="15" y="{height / 2}" text-anchor="middle" transform="rotate(-90 15 {height / 2})">{ylabel}</text>',
    ]
    for v in np.linspace(x0, x1, 5):
        out.append(f'<text x="{px(v):.1f}" y="{height - pad + 16}" text-anchor="middle">{v:.4g}</text>')
    for v in np.linspace(y0, y1, 5):
        out.append(f'<text x="{pad - 6}" y="{py(v) + 4:.1f}" text-anchor="end">{v:.3g}</text>')
    for i, (name, y) in enumerate(ys.items()):
        color = _COLORS[i % len(_COLORS)]
        ok = np.isfinite(y)
        if name in markers:
            for a, b in zip(x[ok], y[ok]):
                out.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2.5" fill="{color}"/>')
        else:
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[ok], y[ok]))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{width - pad + 4 - 150}" y="{pad + 16 * (i + 1)}" fill="{color}">{name}</text>')
    out.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n")
    return path
