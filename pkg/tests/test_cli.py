import json

import pytest

from forcinglab.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


STEEL = {"t": ["[]", "[0]"], "rho": {"[]": "5", "[0]": "2"}, "rho_bar": {}}
F1_PARAMS = {"alpha": "w+1", "space": "cylinders:1", "A": ["0"], "s": 3, "w": 4}


def test_retag_example(tmp_path, capsys):
    path = write(tmp_path, "p.json", STEEL)
    code, out, _ = run(capsys, "retag", "--in", path, "--beta", "3")
    assert code == 0
    cond = json.loads(out)["condition"]
    assert cond["rho"] == {"[0]": "2"} and cond["rho_bar"] == {"[]": "3"}


def test_refined_retag(tmp_path, capsys):
    path = write(tmp_path, "p.json", {"t": ["[]", "[0]"], "rho": {"[]": "9", "[0]": "2"}, "rho_bar": {}})
    code, out, _ = run(capsys, "retag", "--in", path, "--beta", "3", "--refined", "4")
    assert code == 0 and json.loads(out)["beta_prime"] == "3"


def test_validate_reports_clause_and_exit_status(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", {"params": {**F1_PARAMS, "B": []}, "condition": {"f": {}, "R": [["[0]", "0"]]}})
    code, out, _ = run(capsys, "validate", "--in", bad)
    assert code == 1
    assert [v["clause"] for v in json.loads(out)["violations"]] == ["e"]
    clash = write(
        tmp_path,
        "clash.json",
        {"params": {"alpha": "2", "space": "cylinders:2"}, "condition": {"f": {}, "R": [["[]", "00"], ["[0]", "00"]]}},
    )
    code, out, _ = run(capsys, "validate", "--in", clash)
    assert code == 1 and "c" in {v["clause"] for v in json.loads(out)["violations"]}
    ok = write(tmp_path, "ok.json", {"params": F1_PARAMS, "condition": {"f": {}, "R": []}})
    code, out, _ = run(capsys, "validate", "--in", ok)
    assert code == 0 and json.loads(out)["valid"]


def test_input_errors_name_the_field(tmp_path, capsys):
    path = write(tmp_path, "bad2.json", {"params": {"alpha": "w+1"}, "condition": {}})
    code, out, err = run(capsys, "validate", "--in", path)
    assert code == 2 and out == ""
    assert "params.space" in err
    path = write(tmp_path, "bad3.json", {"params": {**F1_PARAMS, "alpha": "w+"}, "condition": {}})
    code, _, err = run(capsys, "validate", "--in", path)
    assert code == 2 and "params.alpha" in err
    code, _, err = run(capsys, "validate", "--in", tmp_path / "missing.json")
    assert code == 2 and "no such file" in err
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 2


def test_strengthen_and_rank(tmp_path, capsys):
    data = {"params": {"alpha": "2", "space": "cylinders:2", "A": ["00"]}, "condition": {"f": {}, "R": []}, "eta": "[]", "x": "00"}
    code, out, _ = run(capsys, "strengthen", "--in", write(tmp_path, "s.json", data))
    res = json.loads(out)
    assert code == 0 and res["in_D"] and res["condition"]["R"] == [["[]", "00"]]
    code, out, _ = run(capsys, "rank", "--in", write(tmp_path, "p.json", STEEL))
    assert code == 0 and json.loads(out)["crank"] == "5"


def test_ground_rank_and_reduct(tmp_path, capsys):
    spec = [
        {"alpha": "2", "space": "cylinders:2", "A": [], "B": [], "s": 2, "w": 3},
        {"alpha": "3", "space": "cylinders:1", "A": ["0"], "B": ["1"], "s": 2, "w": 3},
    ]
    data = {"spec": spec, "condition": {"1": {"f": {}, "R": [["[0]", "1"]]}}, "H": {"0": [], "1": []}}
    code, out, _ = run(capsys, "rank", "--in", write(tmp_path, "g.json", data))
    assert code == 0 and json.loads(out)["crank"] == "inf"
    data["H"] = {"1": ["1"]}
    code, out, _ = run(capsys, "reduct", "--in", write(tmp_path, "g2.json", data), "--beta", "0")
    res = json.loads(out)
    assert code == 0 and res["crank"] == "0"


def test_wf_commands(tmp_path, capsys):
    tree = write(tmp_path, "t.json", {"tree": ["[]", "[0]", "[1]", "[0,0]"]})
    code, out, _ = run(capsys, "wf-rank", "--in", tree, "--alpha", "2")
    assert code == 0 and json.loads(out) == {"rank": "2", "alpha": "2", "member": False}
    code, out, _ = run(capsys, "build-code", "--alpha", "k*2")
    res = json.loads(out)
    assert res["code_class"] == ["Sigma", 4] and res["claimed_class"] == ["Sigma", "4"]
    code, _, err = run(capsys, "build-code", "--alpha", "2", "--eta", "[0,0,0]")
    assert code == 2 and "grid" in err


def test_ord_oracle_on_a_small_space(capsys):
    space = json.dumps({"points": ["a", "b"], "subbasics": {"a": ["a"], "ab": ["a", "b"]}})
    code, out, _ = run(capsys, "ord-oracle", "--space", space, "--target", "b")
    assert code == 0 and json.loads(out)["level"] == 2


def test_verify_is_deterministic_across_jobs(tmp_path, capsys):
    args = ["verify", "steel-rank", "--tags", "0..2", "--size", "2", "--no-meta"]
    code1, serial, _ = run(capsys, *args)
    code2, sharded, _ = run(capsys, *args, "--jobs", "3")
    assert code1 == code2 == 0
    assert serial == sharded
    report = json.loads(serial)
    assert report["verdict"] == "PASS" and report["counts"]["conditions"] > 0


def test_verify_mutation_exits_one_and_writes_figures(tmp_path, capsys):
    out = tmp_path / "r.json"
    figs = tmp_path / "figs"
    code, _, _ = run(
        capsys, "verify", "steel-rank", "--tags", "0,1,2,w", "--size", "2", "--width", "1", "--no-floor",
        "--out", out, "--figures", figs,
    )
    assert code == 1
    assert json.loads(out.read_text())["verdict"] == "FAIL"
    assert (figs / "steel-rank-counts.png").stat().st_size > 0
    code, _, _ = run(capsys, "verify", "wf-oracle", "--figures", figs, "--out", tmp_path / "wf.json")
    assert code == 0 and (figs / "wf-membership.png").exists()
