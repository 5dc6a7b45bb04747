import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

# make tests/helpers.py importable regardless of invocation directory
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

_acceptance_lines: list[str] = []


@pytest.fixture
def acceptance_record():
    """Collect one pass/fail line per acceptance check.

    Lines print immediately (visible with -s and in failure captures)
    and again in the terminal summary, which pytest always shows.
    """

    def record(name: str, ok: bool, detail: str = "") -> bool:
        status = "PASS" if ok else "FAIL"
        line = f"[acceptance] {name}: {status}"
        if detail:
            line += f" -- {detail}"
        _acceptance_lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance checks")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
