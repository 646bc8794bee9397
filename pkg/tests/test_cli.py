from __future__ import annotations

import json

import pytest

from cbtrace.cli import COMMANDS, main, run_command
from cbtrace.config import parse_config

SECH = {"weights": [[1]], "flavors": ["0"], "zeta": ["1/2"]}
TRIPLE = {"weights": [[1, 0], [0, 1], [1, 1]], "zeta": ["1", "1"]}
ZERO = {"weights": [[1]], "zeta": ["0"]}


def run(tmp_path, cmd, obj, *extra):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(obj))
    out = tmp_path / f"{cmd}.out"
    code = main([cmd, str(cfg), "--out", str(out), *extra])
    text = out.read_text() if out.exists() else ""
    return code, (json.loads(text) if text and "--format" not in extra else text)


def test_analyze_triple(tmp_path):
    code, rep = run(tmp_path, "analyze", TRIPLE)
    assert code == 0
    assert rep["bases"] == 3 and len(rep["facet_coweights"]) == 6
    assert rep["unimodular"] and rep["determinant_volume"] == 3


def test_classify_no_positive(tmp_path):
    code, rep = run(tmp_path, "classify", ZERO)
    assert code == 2 and rep["no_positive_traces"] is True


def test_classify_with_bridge(tmp_path):
    code, rep = run(tmp_path, "classify", SECH, "--bridge")
    assert code == 0 and rep["total_dimension"] == 1 and rep["bridge"]["rank"] == 1


def test_gram_sech_positive(tmp_path):
    code, rep = run(tmp_path, "gram", SECH)
    assert code == 0 and rep["verdict"] == "positive"
    assert rep["numerator_nonnegativity"]["verdict"] == "certified"


def test_gram_negated_numerator_not_positive(tmp_path):
    obj = dict(SECH, weight={"numerator": [{"exp": [0], "re": "-1", "im": "0"}]})
    code, rep = run(tmp_path, "gram", obj)
    assert code == 0 and rep["verdict"] == "not-positive"


def test_gram_text_table(tmp_path):
    code, text = run(tmp_path, "gram", SECH, "--format", "text")
    assert code == 0 and "min eigenvalue" in text and "verdict: positive" in text


def test_trace_space_and_residual(tmp_path):
    code, rep = run(tmp_path, "trace-space", SECH, "--degree", "6")
    assert code == 0 and rep["dimension"] == 1 and rep["stable"]
    code, rep = run(tmp_path, "residual", TRIPLE)
    assert code == 0 and rep["max_residual"] < 1e-7


def test_quadrature_and_genfun(tmp_path):
    code, rep = run(tmp_path, "quadrature", SECH, "--degree", "4")
    assert code == 0
    moments = {tuple(m["exp"]): m["value"]["re"] for m in rep["moments"]}
    assert abs(moments[(2,)] + 0.125) < 1e-10
    code, rep = run(tmp_path, "genfun", SECH)
    assert code == 0 and rep["decay"]["verdict"] == "decaying" and rep["reduction"] == "reduced"


def test_input_errors_exit_1(tmp_path, capsys):
    code, _ = run(tmp_path, "analyze", {"weights": [[1, 1], [2, 2]], "zeta": ["0", "0"]})
    assert code == 1
    assert "weights" in capsys.readouterr().err
    code, _ = run(tmp_path, "quadrature", ZERO)
    assert code == 1


def test_unknown_command():
    with pytest.raises(ValueError, match="unknown command"):
        run_command("plot", parse_config(SECH))
    with pytest.raises(SystemExit):
        main(["plot", "x.json"])


def test_every_command_is_deterministic(tmp_path):
    for cmd in COMMANDS:
        a = run_command(cmd, parse_config(SECH))
        b = run_command(cmd, parse_config(SECH))
        assert a == b
