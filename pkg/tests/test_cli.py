import csv
import io
import json

import pytest

from orlicz_regularity.cli import parse_young, run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, json.loads(buf.getvalue()), buf.getvalue()


def test_classify_high_power():
    code, doc, _ = call("classify", "--young", "power_log:p=4,alpha=0", "--n", "3")
    assert code == 0
    assert set(doc) == {"schema_version", "command", "inputs_echo", "result", "provenance", "warnings"}
    assert doc["result"]["grade"] == "continuous_everywhere"
    assert doc["result"]["modulus"]["asymptotic_label"] == "r^{1-3/4}"
    assert all("tag" in p for p in doc["provenance"])


def test_classify_boundary_quadratic_3d():
    code, doc, _ = call("classify", "--young", "power_log:p=2,alpha=0", "--n", "3")
    assert code == 0
    assert doc["result"]["grade"] == "inconclusive"


def test_classify_intermediate():
    code, doc, _ = call("classify", "--young", "power_log:p=2.5", "--n", "3", "--sigma", "log",
                        "--gauge-h", "0.5,-2")
    assert doc["result"]["grade"] == "off_singular_set"
    assert doc["result"]["hausdorff_family"]["form"] == "s^{0.5}*log^{-gamma}(1/s)"


def test_counterexample_and_csv(tmp_path):
    code, doc, _ = call("counterexample", "--n", "2", "--q", "1.5", "--alpha", "1.25", "--K", "12",
                        "--csv-dir", str(tmp_path))
    assert code == 0
    slopes = [float(x) for x in doc["result"]["spec"]["slopes"]]
    assert slopes == [4.0 ** k for k in range(12)]
    assert doc["result"]["certification"]["passed"]
    rows = list(csv.reader((tmp_path / "counterexample.csv").open()))
    assert rows[0] == ["k", "t_k", "m_k"] and len(rows) == 13


def test_certify_from_file(tmp_path):
    spec = {"knots": [0, 1, 3.75, 15.0, 60.0, 240.0, 960.0, 3840.0, 15360.0, 61440.0],
            "slopes": [4.0 ** k for k in range(9)]}
    f = tmp_path / "spec.json"
    f.write_text(json.dumps(spec))
    code, doc, _ = call("certify", "--young", f"piecewise:file={f}", "--n", "2", "--q", "1.5",
                        "--alpha", "1.25", "--K", "9")
    assert code == 0 and doc["result"]["passed"]
    spec["slopes"][2] /= 2
    spec["slopes"] = sorted(spec["slopes"])
    f.write_text(json.dumps(spec))
    code, doc, _ = call("certify", "--young", f"piecewise:file={f}", "--n", "2", "--q", "1.5",
                        "--alpha", "1.25", "--K", "9")
    assert code == 0 and not doc["result"]["passed"]


def test_other_commands(tmp_path):
    assert call("conjugate", "--young", "power_log:p=3")[0] == 0
    code, doc, _ = call("transform", "--young", "power_log:p=3,coef=0.3333333333333333", "--n", "3")
    assert code == 0 and "0.0833333" in doc["result"]["transform"]
    code, doc, _ = call("modulus", "--young", "power_log:p=3,alpha=-1", "--n", "3", "--csv-dir", str(tmp_path))
    assert code == 0 and (tmp_path / "modulus.csv").exists()
    code, doc, _ = call("gauge", "--young", "power_log:p=3,alpha=-2", "--n", "3", "--gauge-h", "0,-3")
    assert doc["result"]["hausdorff"][0]["verdict"]["outcome"] == "converges"
    pts = tmp_path / "pts.csv"
    pts.write_text("1,0,0,2\n0,2,0\n")
    code, doc, _ = call("potential", "--young", "power_log:p=2.5", "--n", "3", "--points", str(pts), "--at", "0,0,0")
    assert code == 0 and doc["result"]["potential"] > 0


def test_exit_codes(tmp_path):
    assert call("nonsense")[0] == 2
    assert call("classify", "--n", "3")[0] == 2
    assert call("classify", "--young", "power_log:q=2", "--n", "3")[0] == 2
    assert call("counterexample", "--n", "2", "--q", "1.5", "--alpha", "2.5")[0] == 2
    assert call("transform", "--young", "power_log:p=2", "--n", "3")[0] == 1
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"no_such_key": 1}))
    assert call("conjugate", "--young", "power_log:p=2", "--config", str(cfg))[0] == 2


def test_config_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"decades_infinity": 20}))
    code, doc, _ = call("classify", "--young", "power_log:p=4", "--n", "3", "--config", str(cfg))
    assert code == 0


def test_deterministic():
    a = call("classify", "--young", "power_log:p=3,alpha=-1", "--n", "3")[2]
    b = call("classify", "--young", "power_log:p=3,alpha=-1", "--n", "3")[2]
    assert a == b


def test_descriptor_parser():
    assert parse_young("power_log:p=3,alpha=2,c=3").params.c_shift == 3.0
