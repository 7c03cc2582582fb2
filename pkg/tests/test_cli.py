import json

import pytest

from nward.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ------------------------------------------------------------------- norm


def test_norm_examples(capsys):
    code, out, _ = run(capsys, "norm", "--n", "2", "--p", "2", "--vec", "1,0,0", "--vec", "0,1,0")
    assert (code, out.strip()) == (0, "1.000000000000")
    code, out, _ = run(capsys, "norm", "--n", "2", "--p", "inf", "--vec", "1,1", "--vec", "1,-1")
    assert (code, out.strip()) == (0, "2.000000000000")


@pytest.mark.parametrize("argv", [
    ["norm", "--n", "3", "--p", "2", "--vec", "1,0", "--vec", "0,1"],
    ["norm", "--n", "2", "--vec", "1,x", "--vec", "0,1"],
    ["norm", "--n", "2", "--vec", "1,0", "--vec", "0,1,2"],
    ["norm", "--n", "2", "--p", "0.5", "--vec", "1,0", "--vec", "0,1"],
    ["norm", "--n", "2"],
    ["norm", "--bogus"],
])
def test_norm_validation(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err


def test_norm_from_file_and_gram(capsys, tmp_path):
    f = tmp_path / "v.csv"
    f.write_text("1,1,0\n1,-1,0\n")
    code, out, _ = run(capsys, "norm", "--n", "2", "--file", str(f))
    assert (code, out.strip()) == (0, "2.000000000000")
    code, out, _ = run(capsys, "norm", "--n", "2", "--file", str(f), "--gram")
    assert (code, out.strip()) == (0, "2.000000000000")
    code, _, _ = run(capsys, "norm", "--n", "2", "--p", "1", "--file", str(f), "--gram")
    assert code == 2


# --------------------------------------------------------------- classify


def statuses(out):
    return {row["property"]: row["status"] for row in json.loads(out)["properties"]}


def test_classify_alternating(capsys):
    code, out, _ = run(capsys, "classify", "--seq", "alternating", "--s", "2", "--H", "1000",
                       "--tau", "1e-3")
    assert code == 3
    st = statuses(out)
    assert st["2-quasi-cauchy"] == "satisfied" and st["quasi-cauchy"] == "violated"


def test_classify_constant(capsys):
    code, out, _ = run(capsys, "classify", "--seq", "constant", "--param", "v=[1,1]",
                       "--s", "2", "--zeta", "1,1")
    assert code == 0
    assert set(statuses(out).values()) == {"satisfied"}


def test_classify_sqrt_ramp(capsys, tmp_path):
    out_file = tmp_path / "r.json"
    code, out, _ = run(capsys, "classify", "--seq", "sqrt-ramp", "--H", "10000", "--tau", "1e-2",
                       "--out", str(out_file))
    assert code == 3 and out == ""
    st = statuses(out_file.read_text())
    assert st["quasi-cauchy"] == "satisfied" and st["cauchy"] == "violated"


@pytest.mark.parametrize("argv", [
    ["classify", "--seq", "no-such"],
    ["classify", "--seq", "alternating", "--tau", "0"],
    ["classify", "--seq", "alternating", "--s", "400", "--H", "1000"],
    ["classify", "--seq", "geometric", "--param", "q=3"],
    ["classify", "--seq", "alternating", "--witness", "1,0|0,1"],
])
def test_classify_validation(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_classify_sequence_file(capsys, tmp_path):
    f = tmp_path / "seq.json"
    f.write_text(json.dumps({"kind": "explicit", "values": [[(-1) ** k, 0] for k in range(1, 101)]}))
    code, out, _ = run(capsys, "classify", "--seq-file", str(f), "--s", "2")
    assert code == 3 and statuses(out)["2-quasi-cauchy"] == "satisfied"


# -------------------------------------------------------------- func-test


def test_func_test_s_ward(capsys):
    code, out, _ = run(capsys, "func-test", "--func", "coordinate-square", "--test", "s-ward",
                       "--s", "2", "--H", "10000", "--tau", "1e-2")
    assert code == 3 and json.loads(out)["status"] == "violated"
    code, out, _ = run(capsys, "func-test", "--func", "linear", "--fparam", "A=[[1,0.5],[0,1]]",
                       "--test", "ward", "--seq", "sqrt-ramp", "--seq", "geometric",
                       "--H", "10000", "--tau", "1e-2")
    assert code == 0 and json.loads(out)["status"] == "satisfied"


def test_func_test_precondition_is_validation(capsys):
    code, _, err = run(capsys, "func-test", "--test", "ward", "--seq", "alternating")
    assert code == 2 and "quasi-Cauchy" in err


def test_func_test_other_harnesses(capsys, tmp_path):
    code, _, _ = run(capsys, "func-test", "--func", "lipschitz-clip", "--fparam", "M=1",
                     "--test", "continuity", "--zeta", "0.5,2")
    assert code == 0
    code, out, _ = run(capsys, "func-test", "--test", "uniform-modulus")
    assert code == 3 and not json.loads(out)["uniform"]
    code, out, _ = run(capsys, "func-test", "--test", "uniform-modulus", "--box", "2")
    assert code == 0 and json.loads(out)["shrinking"]
    code, out, _ = run(capsys, "func-test", "--test", "uniform-limit", "--seq", "geometric",
                       "--s", "2")
    assert code == 0 and json.loads(out)["status"] == "satisfied"
    spec = tmp_path / "f.json"
    spec.write_text(json.dumps({"family": "composition", "parts": [
        {"family": "linear", "params": {"A": [[1, 0.5], [0, 1]]}},
        {"family": "lipschitz-clip", "params": {"M": 1}}]}))
    code, _, _ = run(capsys, "func-test", "--func-config", str(spec), "--test", "ward",
                     "--seq", "geometric")
    assert code == 0
    code, _, _ = run(capsys, "func-test", "--func", "nope", "--test", "ward")
    assert code == 2


# ---------------------------------------------------------------- compact


def test_compact_modes(capsys):
    code, out, _ = run(capsys, "compact", "--mode", "net")
    assert code == 0 and json.loads(out)["status"] == "net-found"
    code, out, _ = run(capsys, "compact", "--mode", "net", "--points", "ramp:50", "--alpha", "0.5",
                       "--cap", "20")
    assert code == 3 and len(json.loads(out)["packing_witness"]) == 20
    code, out, _ = run(capsys, "compact", "--mode", "extract", "--seq", "random-walk-damped",
                       "--H", "4096")
    assert code == 0 and json.loads(out)["envelope_holds"]
    code, out, _ = run(capsys, "compact", "--mode", "image", "--func", "scale", "--fparam", "c=0.5",
                       "--seq", "geometric", "--H", "1024", "--tau", "0.25")
    assert code == 0
    code, _, _ = run(capsys, "compact", "--mode", "net", "--points", "cloud:5")
    assert code == 2


# ------------------------------------------------------------------ suite


def test_suite_rejects_zero_tau(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"H": 1000, "tau": 0}))
    code, out, err = run(capsys, "suite", "--config", str(cfg))
    assert code == 2 and out == "" and "tau" in err


@pytest.mark.parametrize("raw", [
    "not json",
    json.dumps({"H": 4, "tau": 0.1, "s_list": [1, 2]}),
    json.dumps({"H": 100, "tau": 0.1, "sequences": [{"name": "nope"}]}),
    json.dumps({"H": 100, "tau": 0.1, "uniform_limits": ["nope"]}),
    json.dumps({"H": 100, "tau": 0.1, "functions": [{"family": "nope"}]}),
])
def test_suite_config_errors(capsys, tmp_path, raw):
    cfg = tmp_path / "c.json"
    cfg.write_text(raw)
    code, _, _ = run(capsys, "suite", "--config", str(cfg))
    assert code == 2


def test_suite_without_functions_skips_function_sections(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"H": 1000, "tau": 0.01, "s_list": [1, 2],
                               "sequences": [{"name": "alternating"}, {"name": "geometric"}],
                               "axiom_samples": 50, "cauchy_binet_samples": 20}))
    out_file = tmp_path / "r.json"
    code, _, _ = run(capsys, "suite", "--config", str(cfg), "--out", str(out_file))
    report = json.loads(out_file.read_text())
    assert code == 0
    by_id = {s["theorem"]: s["status"] for s in report["sections"]}
    for name in ("s-ward=>ward", "s-ward=>continuous", "uniform=>s-ward", "uniform-limit",
                 "compact-image"):
        assert by_id[name] == "skipped"
    for name in ("norm-axioms", "cauchy-binet", "telescoping", "verdict-chain"):
        assert by_id[name] == "green"


def test_internal_error_exit_code(capsys, monkeypatch):
    import nward.cli as cli

    def boom(*a, **k):
        raise RuntimeError("kaput")

    monkeypatch.setattr(cli, "classify", boom)
    code, _, err = run(capsys, "classify", "--seq", "constant")
    assert code == 4 and "internal error" in err


def test_version(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0 and out.startswith("nward ")
