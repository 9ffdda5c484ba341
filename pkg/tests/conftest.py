import os
import time

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_SESSION_START = time.perf_counter()
FULL_SUITE_BUDGET = 60.0


def pytest_terminal_summary(terminalreporter):
    elapsed = time.perf_counter() - _SESSION_START
    full_run = terminalreporter.config.args in ([], ["tests"])
    if full_run:
        verdict = "PASS" if elapsed < FULL_SUITE_BUDGET else "FAIL"
        terminalreporter.write_line(
            f"[criterion 9] {verdict} full suite runtime: {elapsed:.1f} s (< {FULL_SUITE_BUDGET:g} s)")
