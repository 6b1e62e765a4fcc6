from __future__ import annotations

from hypothesis import HealthCheck, settings

# Property tests run at least a thousand examples with a fixed seed.
settings.register_profile(
    "lintrack",
    max_examples=1000,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("lintrack")


def pytest_terminal_summary(terminalreporter):
    from _support import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)
