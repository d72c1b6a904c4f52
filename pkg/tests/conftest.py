"""Shared fixtures and the acceptance-criteria result summary."""

import pytest

_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _ACCEPTANCE_RESULTS[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{_ACCEPTANCE_RESULTS[name]}  {name}")


@pytest.fixture
def profile_dir(tmp_path, monkeypatch):
    """A temp directory wired into the user-profile search path."""
    directory = tmp_path / "profiles"
    directory.mkdir()
    monkeypatch.setenv("OVERLAP_FORGE_PROFILE_DIR", str(directory))
    return directory
