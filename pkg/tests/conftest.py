import numpy as np
import pytest

ACCEPTANCE = {}


def record(criterion, passed, detail=""):
    """Store one acceptance result for the end-of-run summary."""
    ACCEPTANCE.setdefault(criterion, []).append((bool(passed), detail))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        results = ACCEPTANCE[key]
        ok = all(p for p, _ in results)
        details = "; ".join(d for _, d in results if d)
        tr.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {details}")
