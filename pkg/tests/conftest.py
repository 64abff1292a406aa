import pytest

from preflattice.core import profile_from_dict
from preflattice.mlorder import tally

import worked_example as wx


@pytest.fixture
def borda4():
    return profile_from_dict(wx.BORDA4)


@pytest.fixture
def borda3():
    return profile_from_dict(wx.BORDA3)


@pytest.fixture
def paradox():
    return profile_from_dict(wx.PARADOX)


@pytest.fixture
def worked_tally():
    return tally(wx.worked_comparisons())


def _criterion_key(name):
    digits = ""
    for ch in name:
        if not ch.isdigit():
            break
        digits += ch
    return (int(digits), name[len(digits):])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    marks = {}
    for status, mark in (("passed", "PASS"), ("failed", "FAIL"),
                         ("error", "ERROR"), ("skipped", "SKIP")):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            tail = nodeid.split("::test_criterion_", 1)[1]
            crit, _, rest = tail.partition("_")
            # setup/teardown reports must not overwrite the call verdict
            if crit not in marks or marks[crit][1] == "PASS":
                marks[crit] = (rest.replace("_", " "), mark)
    if not marks:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for crit in sorted(marks, key=_criterion_key):
        rest, mark = marks[crit]
        terminalreporter.write_line(f"criterion {crit} ({rest}): {mark}")
