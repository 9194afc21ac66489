import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> list of (part, passed, detail), filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[number]
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{name}: {'ok' if good else 'FAIL'} ({text})" for name, good, text in parts)
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def record():
    def _record(number, part, passed, detail):
        ACCEPTANCE.setdefault(number, []).append((part, bool(passed), detail))
        print(f"criterion {number} [{part}] {'PASS' if passed else 'FAIL'}: {detail}")
        return passed

    return _record
