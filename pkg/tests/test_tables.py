from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from thermocasimir import tables
from thermocasimir.constants import CONSTANTS_VERSION
from thermocasimir.fitting import MeasurementSet
from thermocasimir.scenarios import DEFAULT_SEED, micromachined_sets

DATASET = Path(str(resources.files("thermocasimir") / "data" / "datasets" / "micromachined_mean.csv"))


def test_config_hash_order_independent():
    assert tables.config_hash({"a": 1, "b": [1.0, 2]}) == tables.config_hash({"b": [1.0, 2], "a": 1})
    assert tables.config_hash({"a": 1}) != tables.config_hash({"a": 2})
    assert len(tables.config_hash({})) == 16


def test_measurement_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    d = np.sort(rng.uniform(100, 900, 9))
    m = MeasurementSet(d, rng.normal(size=9) * 1e-12, rng.uniform(1, 2, 9) * 1e-13, 0.5, "force", 95.0)
    path = tables.write_measurements(tmp_path / "m.csv", m, {"x": 1})
    first = path.read_text().splitlines()[0]
    assert first.startswith("# config=") and first.endswith(f"constants={CONSTANTS_VERSION}")
    back = tables.read_measurements(path)
    for name in ("d", "value", "sigma", "sigma_d"):
        assert getattr(back, name).tobytes() == getattr(m, name).tobytes()
    assert (back.kind, back.confidence) == ("force", 95.0)
    assert tables.read_measurements(path, "pressure").kind == "pressure"


@pytest.mark.parametrize("body,fragment", [
    ("d_nm,value,sigma_value,sigma_d_nm\n700,1,0.1,0\n702,x,0.1,0\n", ":3:"),
    ("d_nm,value,sigma_value,sigma_d_nm\n700,1,0.1\n", ":2:"),
    ("d,value\n700,1\n", ":1:"),
    ("# only a comment\n", "missing header"),
    ("d_nm,value,sigma_value,sigma_d_nm\n700,1,0.1,0\n702,1,nan,0\n", ":3:"),
    ("d_nm,value,sigma_value,sigma_d_nm\n700,1,0.1,0\n700,1,0.1,0\n", "distinct"),
])
def test_malformed_measurements(tmp_path, body, fragment):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(tables.MeasurementFormatError, match=fragment):
        tables.read_measurements(p)


def test_bundled_dataset_matches_generator():
    _, mean = micromachined_sets(DEFAULT_SEED)
    bundled = tables.read_measurements(DATASET)
    assert bundled.kind == "pressure" and len(bundled) == 24
    assert bundled.value.tobytes() == mean.value.tobytes()
    assert bundled.sigma.tobytes() == mean.sigma.tobytes()


def test_json_is_sorted_and_stable(tmp_path):
    a = tables.write_json(tmp_path / "a.json", {"b": np.float64(1.5), "a": np.arange(2)})
    assert a.read_text() == '{\n  "a": [\n    0,\n    1\n  ],\n  "b": 1.5\n}\n'


def test_svg(tmp_path):
    p = tables.svg_line_chart(tmp_path / "c.svg", [1, 2, 3], {"y": [1, 4, 9], "pts": [1, 2, 3]},
                              title="t", markers=("pts",))
    text = p.read_text()
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert "<polyline" in text and text.count("<circle") == 3
