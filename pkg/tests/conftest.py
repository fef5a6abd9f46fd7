import os

from hypothesis import settings

settings.register_profile("ci", max_examples=60, deadline=None)
settings.register_profile("dev", max_examples=20, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

# (criterion id, passed, label, detail) appended by tests/test_acceptance.py
CRITERIA = []


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, label, detail in sorted(CRITERIA, key=lambda r: (int(r[0].split(".")[0]), r[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  C{cid:<5} {label:<58} {detail}")
