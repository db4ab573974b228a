import os

from hypothesis import HealthCheck, settings

# Keep property tests quick by default; CI and local runs share one
# deterministic profile so failures reproduce exactly.
settings.register_profile(
    "default",
    max_examples=int(os.environ.get("PRB_HYPOTHESIS_EXAMPLES", "25")),
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance-gate verdicts after the run, one line per
    criterion, so they are visible without -s."""
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None) if mod else None
    if lines:
        terminalreporter.section("acceptance gate")
        for line in lines:
            terminalreporter.write_line(line)
