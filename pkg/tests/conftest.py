import numpy as np
import pytest


def ar_series(phi, n, seed, burn=500, sigma=1.0):
    """Stationary AR(p) sample path generated by direct recursion."""
    rng = np.random.default_rng(seed)
    phi = np.asarray(phi, dtype=float)
    p = len(phi)
    e = rng.normal(0.0, sigma, n + burn)
    x = np.zeros(n + burn)
    for t in range(p, n + burn):
        x[t] = phi @ x[t - p : t][::-1] + e[t]
    return x[burn:]


@pytest.fixture
def make_ar():
    return ar_series


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
