import json

import pytest

from pfida import cli


def run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_pass(capsys):
    code, out, _ = run(["check", "oscillator", "--points", "60"], capsys)
    assert code == 0
    assert "overall: PASS" in out


def test_check_fail_on_documented_variant(capsys):
    code, out, _ = run(["check", "maglev", "--points", "60"], capsys)
    assert code == 1
    assert "overall: FAIL (1 failing)" in out
    assert "nonhom-printed-variant" in out


def test_check_unknown_case(capsys):
    code, _, err = run(["check", "nosuch"], capsys)
    assert code == 2
    assert "unknown case" in err


def test_check_case_file_path(repo_root, capsys):
    code, out, _ = run(["check", str(repo_root / "cases" / "oscillator.case"), "--points", "60"], capsys)
    assert code == 0
    assert "overall: PASS" in out


def test_check_json_deterministic(tmp_path, capsys):
    # two runs at the same seed agree exactly once timing is stripped
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code, _, _ = run(
            ["check", "oscillator", "--points", "60", "--seed", "42", "--json", str(p)],
            capsys,
        )
        assert code == 0
    docs = [json.loads(p.read_text()) for p in paths]
    for d in docs:
        d.pop("timing_s", None)
    assert docs[0] == docs[1]
    assert docs[0]["seed"] == 42
    assert docs[0]["case"] == "oscillator"


def test_seed_env_override(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("PFIDA_SEED", "7")
    p = tmp_path / "r.json"
    code, _, _ = run(["check", "oscillator", "--points", "60", "--json", str(p)], capsys)
    assert code == 0
    assert json.loads(p.read_text())["seed"] == 7


def test_seed_env_malformed(monkeypatch, capsys):
    monkeypatch.setenv("PFIDA_SEED", "soon")
    code, _, err = run(["check", "oscillator", "--points", "60"], capsys)
    assert code == 2
    assert "PFIDA_SEED" in err


def test_solve_integrable_form(repo_root, capsys):
    code, out, _ = run(["solve", str(repo_root / "forms" / "exact_plane.pf")], capsys)
    assert code == 0
    assert "U " in out and "mu " in out


def test_solve_rejects_twist(repo_root, capsys):
    code, out, _ = run(["solve", str(repo_root / "forms" / "twist.pf")], capsys)
    assert code == 1
    assert "not integrable" in out


def test_solve_hint_verified(repo_root, capsys):
    form = str(repo_root / "forms" / "exact_plane.pf")
    code, out, _ = run(["solve", form, "--hint-u", "x + y"], capsys)
    assert code == 1
    assert "unsolvable: stage 1" in out
    code, _, _ = run(["solve", form, "--hint-u", "x*y"], capsys)
    assert code == 0


def test_solve_missing_file(capsys):
    code, _, err = run(["solve", "no/such.pf"], capsys)
    assert code == 2


def test_simulate_open_loop(capsys):
    code, out, _ = run(["simulate", "oscillator", "--open-loop", "--t-final", "1"], capsys)
    assert code == 0
    assert "H drift" in out


def test_simulate_closed_loop_csv(tmp_path, capsys):
    out_csv = tmp_path / "run.csv"
    code, out, _ = run(
        ["simulate", "oscillator", "--t-final", "2", "--record-every", "10", "--out", str(out_csv)],
        capsys,
    )
    assert code == 0
    assert "Hd monotone: yes" in out
    assert out_csv.read_text().splitlines()[0] == "t,x1,x2,u1,H,Hd"


def test_simulate_x0_malformed(capsys):
    code, _, err = run(["simulate", "oscillator", "--x0", "a,b"], capsys)
    assert code == 2
    code, _, err = run(["simulate", "oscillator", "--x0", "1.0"], capsys)
    assert code == 2


def test_simulate_x0_outside_domain(capsys):
    code, _, err = run(["simulate", "oscillator", "--x0", "5,0", "--t-final", "1"], capsys)
    assert code == 2
    assert "domain" in err


def test_simulate_gated_case(capsys):
    code, _, err = run(["simulate", "pendubot", "--t-final", "1"], capsys)
    assert code == 2
    assert "gated" in err


def test_calibrate_writes_sidecar(tmp_path, capsys):
    out = tmp_path / "maglev.params"
    code, text, _ = run(["calibrate", "maglev", "--out", str(out)], capsys)
    assert code == 0
    assert out.read_text().startswith("ks = ")
    assert "verdict" in text


def test_calibrate_without_free_params(capsys):
    code, out, _ = run(["calibrate", "oscillator"], capsys)
    assert code == 2
    assert "no calibratable parameters" in out


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
