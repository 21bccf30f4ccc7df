import csv
import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from discaudit.cli import main
from discaudit.ingest import SchemaConfig
from discaudit.synthesis import example1_dataset, table2_datasets

REPO = Path(__file__).resolve().parents[1]


def _write_dataset(path: Path, data, schema_path: Path | None = None) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(data.schema.names)
        w.writerows(data.values.tolist())
    if schema_path is not None:
        schema_path.write_text(json.dumps(SchemaConfig.identity(data.schema).to_dict()))


@pytest.fixture
def example1(tmp_path):
    data, schema = tmp_path / "ex1.csv", tmp_path / "ex1.json"
    _write_dataset(data, example1_dataset(), schema)
    return data, schema


@pytest.fixture
def table2(tmp_path):
    obs, pred = table2_datasets()
    data, schema, predicted = tmp_path / "t2.csv", tmp_path / "t2.json", tmp_path / "t2_pred.csv"
    _write_dataset(data, obs, schema)
    _write_dataset(predicted, pred)
    return data, schema, predicted


def _report(out: Path) -> dict:
    return json.loads((out / "report.json").read_text())


def test_audit_example1(example1, tmp_path):
    data, schema = example1
    out = tmp_path / "out"
    assert main(["audit", str(data), "--schema", str(schema), "--out-dir", str(out)]) == 0
    rep = _report(out)
    assert rep["glbds"] == pytest.approx(-0.011160, abs=5e-7)
    assert rep["glbds_attribute"] == "G"
    man = json.loads((out / "manifest.json").read_text())
    assert man["command"] == "audit"
    assert man["schema_digest"] == hashlib.sha256(schema.read_bytes()).hexdigest()
    assert man["params"]["alpha"] == 0.05
    assert set(man["outputs"]) == {"report.json", "manifest.json"}


def test_audit_high_alpha_has_no_over_limit_groups(example1, tmp_path):
    data, schema = example1
    out = tmp_path / "out"
    assert main(["audit", str(data), "--schema", str(schema), "--alpha", "0.5", "--out-dir", str(out)]) == 0
    rep = _report(out)
    assert rep["ogds"] is None and rep["og_pct"] == 0.0
    assert not any(g["over_limit"] for g in rep["groups"])


def test_audit_csv_format(example1, tmp_path):
    data, schema = example1
    out = tmp_path / "out"
    assert main(["audit", str(data), "--schema", str(schema), "--format", "csv", "--out-dir", str(out)]) == 0
    rows = list(csv.DictReader(open(out / "report.csv")))
    assert len(rows) == 2


def test_table2_prediction_audit(table2, tmp_path):
    data, schema, predicted = table2
    out = tmp_path / "out"
    argv = ["audit-predictions", str(data), "--schema", str(schema), "--predicted", str(predicted),
            "--out-dir", str(out)]
    assert main(argv) == 0
    rep = _report(out)
    assert rep["glbds"] == 0.5
    assert rep["err"] == 0.25


def test_observed_as_predictions_equals_audit(example1, tmp_path):
    data, schema = example1
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["audit", str(data), "--schema", str(schema), "--out-dir", str(a)]) == 0
    assert main(["audit-predictions", str(data), "--schema", str(schema), "--predicted", str(data),
                 "--out-dir", str(b)]) == 0
    ra, rb = _report(a), _report(b)
    assert rb.pop("err") == 0.0 and rb.pop("bcr") == 1.0
    assert ra == rb


def test_single_class_prediction_column(example1, tmp_path):
    data, schema = example1
    pred = tmp_path / "pred.csv"
    pred.write_text("prediction\n" + "1\n" * 125)
    out = tmp_path / "out"
    assert main(["audit-predictions", str(data), "--schema", str(schema), "--predicted", str(pred),
                 "--out-dir", str(out)]) == 0
    assert _report(out)["glbds"] == 0.0


def test_prediction_length_mismatch_is_data_error(example1, tmp_path, capsys):
    data, schema = example1
    pred = tmp_path / "pred.csv"
    pred.write_text("prediction\n1\n0\n")
    out = tmp_path / "out"
    assert main(["audit-predictions", str(data), "--schema", str(schema), "--predicted", str(pred),
                 "--out-dir", str(out)]) == 2
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_synth_simpson_split(tmp_path):
    out = tmp_path / "s"
    assert main(["synth", "simpson-split", "--K", "3", "--out-dir", str(out)]) == 0
    man = json.loads((out / "manifest.json").read_text())
    assert man["instance"]["expected_scores"] == {"e": 0.0, "e1": 1.0, "e2": -1.0}
    lines = (out / "dataset.csv").read_text().splitlines()
    assert lines[0] == "D,P,E" and len(lines) == 13
    # the generated pair is directly auditable
    rep_dir = tmp_path / "r"
    assert main(["audit", str(out / "dataset.csv"), "--schema", str(out / "schema.json"),
                 "--out-dir", str(rep_dir)]) == 0
    rep = _report(rep_dir)
    assert rep["glbds"] == 0.0 and rep["wgds"] == 1.0


def test_synth_merge_and_corr(tmp_path):
    out = tmp_path / "m"
    assert main(["synth", "simpson-merge", "--K", "100", "--m", "10", "--alpha-prime", "1/50",
                 "--alpha", "0.05", "--out-dir", str(out)]) == 0
    inst = json.loads((out / "manifest.json").read_text())["instance"]
    assert inst["expected_scores_exact"] == {"e": "1/15", "e1": "0", "e2": "1/50"}
    assert inst["merged_over_limit"] is True
    out = tmp_path / "c"
    assert main(["synth", "corr", "--m", "2", "--w", "1/5", "--K", "5", "--out-dir", str(out)]) == 0
    inst = json.loads((out / "manifest.json").read_text())["instance"]
    assert inst["dz"] == "-3"


def test_synth_figures(tmp_path):
    out = tmp_path / "f"
    assert main(["synth", "figures", "--out-dir", str(out)]) == 0
    assert (out / "fig1a.csv").exists() and (out / "table2_pred.schema.json").exists()


def test_synth_integrality_is_config_error(tmp_path):
    out = tmp_path / "bad"
    assert main(["synth", "simpson-merge", "--K", "10", "--m", "3", "--alpha-prime", "1/7",
                 "--alpha", "0.5", "--out-dir", str(out)]) == 1
    assert not out.exists()


def _sweep_fixture(tmp_path):
    rng = np.random.default_rng(3)
    n = 300
    e = rng.integers(0, 2, size=(n, 4))
    p = rng.integers(0, 2, size=n)
    d = ((e.sum(axis=1) + p + rng.integers(0, 2, size=n)) >= 3).astype(int)
    path = tmp_path / "sw.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["D", "P", "E0", "E1", "E2", "E3"])
        w.writerows(np.column_stack([d, p, e]).tolist())
    schema = tmp_path / "sw.json"
    schema.write_text(json.dumps({"attributes": [
        {"name": "D", "role": "outcome", "rule": {"kind": "identity"}},
        {"name": "P", "role": "protected", "rule": {"kind": "identity"}},
    ] + [{"name": f"E{i}", "role": "explanatory", "rule": {"kind": "identity"}} for i in range(4)]}))
    return path, schema


def test_sweep_rows(tmp_path):
    data, schema = _sweep_fixture(tmp_path)
    out = tmp_path / "out"
    assert main(["sweep", str(data), "--schema", str(schema), "--out-dir", str(out)]) == 0
    rows = list(csv.DictReader(open(out / "sweep.csv")))
    assert [int(r["k"]) for r in rows] == [0, 1, 2, 3, 4]
    assert [int(r["n_subsets"]) for r in rows] == [1, 4, 6, 4, 1]
    assert len((out / "sweep.dat").read_text().splitlines()) >= 5


def test_train_explanatory_then_audit_is_zero(tmp_path):
    data, schema = _sweep_fixture(tmp_path)
    m_dir, a_dir, p_dir = tmp_path / "model", tmp_path / "audit", tmp_path / "pred"
    for kind in ("tree", "naive-bayes", "constant"):
        assert main(["train", str(data), "--schema", str(schema), "--kind", kind, "--out-dir", str(m_dir)]) == 0
        model = m_dir / "model.json"
        assert main(["audit-predictions", str(data), "--schema", str(schema), "--model", str(model),
                     "--out-dir", str(a_dir)]) == 0
        assert _report(a_dir)["glbds"] == 0.0
        assert main(["predict", str(data), "--schema", str(schema), "--model", str(model),
                     "--out-dir", str(p_dir)]) == 0
        assert main(["audit-predictions", str(data), "--schema", str(schema),
                     "--predicted", str(p_dir / "predictions.csv"), "--out-dir", str(a_dir)]) == 0
        assert _report(a_dir)["glbds"] == 0.0


def test_train_protected_pool_is_config_error(tmp_path):
    data, schema = _sweep_fixture(tmp_path)
    out = tmp_path / "m"
    assert main(["train", str(data), "--schema", str(schema), "--pool", "P,E0", "--out-dir", str(out)]) == 1
    assert not out.exists()
    assert main(["train", str(data), "--schema", str(schema), "--pool", "P,E0", "--allow-protected",
                 "--out-dir", str(out)]) == 0


def test_exit_codes(tmp_path, example1):
    data, schema = example1
    out = tmp_path / "o"
    # missing data file
    assert main(["audit", str(tmp_path / "nope.csv"), "--schema", str(schema), "--out-dir", str(out)]) == 2
    # broken schema
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["audit", str(data), "--schema", str(bad), "--out-dir", str(out)]) == 1
    # schema naming a column that is not there
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"attributes": [
        {"name": "D", "role": "outcome", "rule": {"kind": "identity"}},
        {"name": "Q", "role": "protected", "rule": {"kind": "identity"}}]}))
    assert main(["audit", str(data), "--schema", str(wrong), "--out-dir", str(out)]) in (1, 2)
    # empty input
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert main(["audit", str(empty), "--schema", str(schema), "--out-dir", str(out)]) == 2
    assert not out.exists()


def test_reruns_are_byte_identical(example1, tmp_path):
    data, schema = example1
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["audit", str(data), "--schema", str(schema), "--out-dir", str(out)]) == 0
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert ma.pop("outputs") == mb.pop("outputs")
    assert ma == mb


@pytest.mark.skipif(not (REPO / "data" / "german.csv").exists(), reason="German credit data not present")
def test_german_audit(tmp_path):
    out = tmp_path / "g"
    assert main(["audit", str(REPO / "data" / "german.csv"), "--schema", str(REPO / "data" / "german_schema.json"),
                 "--out-dir", str(out)]) == 0
    rep = _report(out)
    assert rep["n_rows"] == 1000
    assert any(g["over_limit"] for g in rep["groups"])
