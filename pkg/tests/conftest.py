import os

import pytest

from traceforge import genmat
from traceforge.cache import CacheStore

EXTENDED = os.environ.get("TRACEFORGE_EXTENDED") == "1"

# filled by the acceptance module, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_collection_modifyitems(config, items):
    if EXTENDED:
        return
    skip = pytest.mark.skip(
        reason="extended suite disabled; set TRACEFORGE_EXTENDED=1 to enable"
    )
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def session_store(tmp_path_factory):
    return CacheStore(tmp_path_factory.mktemp("cache"))


@pytest.fixture(scope="session")
def session_cache(session_store):
    return genmat.EvalCache(session_store)
