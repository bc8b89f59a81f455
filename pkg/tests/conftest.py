import pytest

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")


@pytest.fixture
def run_cli(tmp_path):
    """Write a config, run the CLI in-process and return (exit code, output dir)."""
    import json

    from elastic_spheres.cli import main

    def _run(config, name="run", extra=()):
        cfg_path = tmp_path / f"{name}.json"
        cfg_path.write_text(json.dumps(config))
        out = tmp_path / name
        code = main(["--config", str(cfg_path), "--output", str(out), *extra])
        return code, out

    return _run
