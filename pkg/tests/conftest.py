import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from kronspin.cli import build_parser, config_from_args, run

settings.register_profile(
    "kronspin",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("kronspin")

ORACLE_FILE = Path(__file__).parent / "oracles" / "frozen.json"


@pytest.fixture(scope="session")
def frozen():
    """Oracle values computed once with sympy (see ``oracles/build_oracles.py``)."""
    return json.loads(ORACLE_FILE.read_text())


def cli_report(argv):
    """Run a subcommand in-process and return its report."""
    argv = list(argv)
    return run(config_from_args(build_parser().parse_args(argv), argv))


def failures(records):
    return [r for r in records if r["status"] == "fail"]


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """``criterion(n, ok, detail)`` logs one acceptance line and returns ``ok``."""

    def emit(n, ok, detail=""):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        request.config.stash[_ACCEPTANCE].append((n, line))
        print(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
