import json

import pytest

from elastic_spheres.cli import main

SETH = {"family": "seth", "lambda": 1, "mu": 1, "K": 1}
ALL_FAMILIES = [{"family": f, "lambda": 1, "mu": 1} for f in ("seth", "svk", "signorini", "hadamard", "linear")]


def load(out, name="summary.json"):
    return json.loads((out / name).read_text())


def test_ball_summary(run_cli):
    code, out = run_cli({"command": "ball", "materials": {**SETH, "rho_c": 2}})
    assert code == 0
    s = load(out)
    assert s["r1"] == pytest.approx(0.6231902173105389, rel=1e-9)
    assert s["bounds"]["ok"] and s["verification"]["ok"]
    header = (out / "profile.csv").read_text().splitlines()[0]
    assert header == "r,delta,eta,m,rho,p_rad,p_tan"


@pytest.mark.parametrize("rho_c", [0.9, 1.0])
def test_ball_without_equilibrium_exits_3(run_cli, capsys, rho_c):
    code, out = run_cli({"command": "ball", "materials": {**SETH, "rho_c": rho_c}})
    assert code == 3
    assert "rho_c > K" in capsys.readouterr().err
    assert not (out / "summary.json").exists()


def test_validate_material_all_families(run_cli):
    code, out = run_cli({"command": "validate-material", "materials": ALL_FAMILIES})
    assert code == 0
    reports = load(out)["reports"]
    assert [r["family"] for r in reports] == ["seth", "svk", "signorini", "hadamard", "linear"]
    assert len((out / "validation.csv").read_text().splitlines()) == 6


def test_shell_at_r_min(run_cli):
    code, out = run_cli({"command": "shell", "materials": {**SETH, "S": 1, "r0": "r_min"}})
    assert code == 0
    assert load(out)["r1"] == pytest.approx(0.98846380882749, rel=1e-9)


def test_multibody_profile_has_body_column(run_cli):
    mats = [{**SETH, "rho_c": 2}, SETH, SETH]
    code, out = run_cli({"command": "multibody", "materials": mats})
    assert code == 0
    lines = (out / "profile.csv").read_text().splitlines()
    assert lines[0].startswith("body,r,")
    assert {ln.split(",")[0] for ln in lines[1:]} == {"0", "1", "2"}
    assert load(out)["verification"]["ok"]


@pytest.mark.parametrize("command,artifact", [("selfsimilar", "profile.csv"), ("phase", "orbits.csv")])
def test_seth_analysis_commands(run_cli, command, artifact):
    code, out = run_cli({"command": command, "materials": SETH})
    assert code == 0
    assert (out / artifact).exists()
    assert load(out)["fixed_points"]["P"]["classification"] == "sink"


def test_calibrate_central(run_cli):
    cfg = {"command": "calibrate", "materials": SETH,
           "observables": {"rho_c": 2.0, "p_c": 2.5 * (2.0 ** (2.0 / 3.0) - 1.0)}}
    code, out = run_cli(cfg)
    assert code == 0
    assert load(out)["central"]["K"] == pytest.approx(1.0, rel=1e-12)


def test_verify_command(run_cli):
    code, out = run_cli({"command": "verify", "materials": [{**SETH, "rho_c": 2}, SETH]})
    assert code == 0
    assert load(out)["verification"]["ok"]


@pytest.mark.parametrize("config,expected", [
    ({"command": "launch"}, 1),
    ({"command": "ball"}, 1),
    ({"command": "ball", "materials": {"family": "seth", "lambda": -1, "mu": 1, "K": 1, "rho_c": 2}}, 2),
    ({"command": "shell", "materials": {**SETH, "S": 1, "r0": 0.5}}, 3),
    ({"command": "ball", "materials": {**SETH, "rho_c": 2}, "controls": {"r_stop": 0.3}}, 4),
    ({"command": "phase", "materials": {"family": "svk", "lambda": 1, "mu": 1}}, 1),
])
def test_exit_codes(run_cli, config, expected):
    assert run_cli(config)[0] == expected


def test_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--config", str(bad)]) == 1
    assert main(["--config", str(tmp_path / "missing.json")]) == 1


def test_repeat_runs_byte_identical(run_cli):
    cfg = {"command": "multibody", "materials": [{**SETH, "rho_c": 2}, SETH]}
    _, a = run_cli(cfg, name="a")
    _, b = run_cli(cfg, name="b")
    for name in ("profile.csv", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_parallel_sweep_matches_serial(run_cli):
    cfg = {"command": "ball", "materials": {**SETH, "rho_c": 2},
           "runs": [{"materials": {"rho_c": 1.5}}, {"materials": {"rho_c": 4}}, {"materials": {"rho_c": 0.9}}]}
    code_s, serial = run_cli(cfg, name="serial")
    code_p, parallel = run_cli(cfg, name="parallel", extra=("--jobs", "2"))
    assert code_s == code_p == 3
    assert [r["exit_code"] for r in load(serial, "sweep.json")["runs"]] == [0, 0, 3]
    for run in ("run_000", "run_001"):
        for name in ("profile.csv", "summary.json"):
            assert (serial / run / name).read_bytes() == (parallel / run / name).read_bytes()
