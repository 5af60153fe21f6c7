import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session", autouse=True)
def isolated_cache(tmp_path_factory):
    """Point the on-disk cache at a per-session directory."""
    mp = pytest.MonkeyPatch()
    mp.setenv("QHSBENCH_CACHE_DIR", str(tmp_path_factory.mktemp("qhsbench-cache")))
    yield
    mp.undo()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
