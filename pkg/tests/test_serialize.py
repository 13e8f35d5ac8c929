import csv
import json

import numpy as np
import pytest

from matwalk import serialize, simulate, walk_exact
from matwalk.walk_exact import WalkModel


@pytest.fixture
def dist():
    return walk_exact.max_dist_table(WalkModel.constant("21", 0.5), 10)


def test_dist_csv_roundtrip_is_exact(tmp_path, dist):
    path = tmp_path / "dist.csv"
    serialize.dist_to_csv(dist, path)
    with open(path) as fh:
        assert fh.readline().strip() == "n,prob,log_prob"
    n, prob = serialize.load_table_csv(path)
    assert np.array_equal(n, dist.n)
    assert np.array_equal(prob, dist.prob)  # repr() floats roundtrip exactly


def test_dist_json_document(tmp_path, dist):
    path = tmp_path / "dist.json"
    serialize.dist_to_json(dist, path, warnings=["example"])
    doc = json.loads(path.read_text())
    assert doc["format_version"] == serialize.FORMAT_VERSION
    assert doc["kind"] == "max-distribution"
    assert doc["config"] == {"family": "21", "q_table": [0.5]}
    assert doc["warnings"] == ["example"]
    assert len(doc["entries"]) == len(dist.n)
    assert doc["entries"][0] == {"n": 2, "prob": 0.5, "log_prob": dist.log_prob[0]}


def test_empirical_outputs(tmp_path):
    emp = simulate.empirical_max_dist(
        WalkModel.constant("21", 0.5),
        simulate.SimConfig(excursions=500, seed=1, height_cap=100))
    serialize.empirical_to_csv(emp, tmp_path / "sim.csv")
    with open(tmp_path / "sim.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert set(rows[0]) == {"n", "prob", "log_prob", "count",
                            "censored_step", "censored_height"}
    assert sum(int(r["count"]) for r in rows) == int(emp.counts.sum())

    serialize.empirical_to_json(emp, tmp_path / "sim.json")
    doc = json.loads((tmp_path / "sim.json").read_text())
    assert doc["kind"] == "empirical-distribution"
    assert doc["total"] == 500
    assert doc["config"]["seed"] == 1


def test_plot_csv_header_and_ratio(tmp_path):
    path = tmp_path / "plot.csv"
    serialize.plot_to_csv(path, [10, 20], [1.0, 0.5], [2.0, 1.0])
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["n", "value", "predicted", "ratio"]
    assert float(rows[0]["ratio"]) == 0.5
    n, value = serialize.load_table_csv(path, value_column="value")
    assert list(n) == [10, 20]


def test_load_table_csv_validation(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,2\n")
    with pytest.raises(ValueError, match="'n' column"):
        serialize.load_table_csv(bad)
    no_value = tmp_path / "noval.csv"
    no_value.write_text("n,other\n1,2\n")
    with pytest.raises(ValueError, match="prob/value"):
        serialize.load_table_csv(no_value)
