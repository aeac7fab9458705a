"""Shared pytest wiring: one summary line per acceptance criterion."""

from __future__ import annotations

import re

import pytest

_acceptance: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.fspath.basename == "test_acceptance.py":
        previous = _acceptance.get(item.nodeid)
        # keep the call-phase report unless setup/teardown already failed
        if report.when == "call" or (report.failed and not (previous and previous[0].failed)):
            _acceptance[item.nodeid] = (report, item)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_acceptance):
        report, item = _acceptance[nodeid]
        match = re.search(r"test_ac(\d+)", nodeid)
        tag = f"AC-{match.group(1)}" if match else nodeid
        if report.passed:
            status = "PASS"
        elif report.skipped:
            status = "SKIP"
        else:
            status = "FAIL"
        doc = (item.function.__doc__ or "").strip().splitlines()
        summary = doc[0] if doc else item.name
        terminalreporter.write_line(f"[{tag}] {status} {summary}")
