import time

import numpy as np
import pytest

from fdepth import FunctionalSample


def gait_like(n=39, k=20, seed=0, d=1):
    """Smooth periodic curves with random amplitude, phase and noise."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, k)
    amp = rng.normal(1.0, 0.25, size=(n, 1))
    phase = rng.normal(0.0, 0.05, size=(n, 1))
    hip = amp * np.sin(2 * np.pi * (t + phase)) + 0.1 * rng.standard_normal((n, k))
    if d == 1:
        return FunctionalSample(t, hip[:, :, None])
    knee = amp * np.cos(2 * np.pi * (t + phase)) + 0.1 * rng.standard_normal((n, k))
    return FunctionalSample(t, np.stack([hip, knee], axis=2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def gait():
    return gait_like()


@pytest.fixture
def gait2():
    return gait_like(d=2)


# ---------------------------------------------------------------------------
# acceptance reporting
# ---------------------------------------------------------------------------

SUITE_BUDGET = 300.0
ACCEPTANCE_LINES = []


def record(number, label, ok, detail=""):
    """Store one PASS/FAIL line for the acceptance summary and assert it."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {label}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_sessionstart(session):
    session.config._fdepth_start = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - session.config._fdepth_start
    session.config._fdepth_elapsed = elapsed
    # the runtime half of criterion 12 only makes sense for a full run
    if ACCEPTANCE_LINES and elapsed > SUITE_BUDGET:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    elapsed = getattr(config, "_fdepth_elapsed", time.perf_counter() - config._fdepth_start)
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    ok = elapsed <= SUITE_BUDGET
    terminalreporter.write_line(
        f"{'PASS' if ok else 'FAIL'} criterion 12: session runtime {elapsed:.1f} s (budget {SUITE_BUDGET:.0f} s)"
    )
