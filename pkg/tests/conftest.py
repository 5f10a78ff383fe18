import sys

import pytest

from steerswap.gauss_core import TwoModeCovariance, physicality_check


class PhysicalityAudit:
    """Checks every covariance matrix that library code constructs."""

    def __init__(self):
        self.checked = 0
        self.violations = []

    def record(self, cm):
        self.checked += 1
        check = physicality_check(cm)
        if not check.physical:
            self.violations.append((cm.a, cm.b, cm.c, check.nu_minus))


AUDIT = PhysicalityAudit()
CRITERIA = {}


def pytest_configure(config):
    original = TwoModeCovariance.__post_init__

    def audited(self):
        original(self)
        # frame 1 is the generated __init__, frame 2 its caller
        caller = sys._getframe(2).f_globals.get("__name__", "")
        if caller.startswith("steerswap."):
            AUDIT.record(self)

    TwoModeCovariance.__post_init__ = audited


def pytest_terminal_summary(terminalreporter):
    for number in sorted(CRITERIA):
        passed, title, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number} {'PASS' if passed else 'FAIL'}: {title} ({detail})")
    terminalreporter.write_line(
        f"physicality audit: {AUDIT.checked} library covariance matrices checked, "
        f"{len(AUDIT.violations)} violations"
    )


def pytest_sessionfinish(session, exitstatus):
    if AUDIT.violations and exitstatus == 0:
        session.exitstatus = 1


@pytest.fixture
def physicality_audit():
    return AUDIT


class CriterionRecorder:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.details = []

    def note(self, text):
        self.details.append(text)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        detail = "; ".join(self.details) if exc is None else f"{exc_type.__name__}: {exc}".splitlines()[0]
        CRITERIA[self.number] = (exc is None, self.title, detail)
        return False


@pytest.fixture
def criterion():
    return CriterionRecorder
