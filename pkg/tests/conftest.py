import numpy as np
import pytest

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance_log(request):
    lines = request.config.stash[_ACCEPTANCE]

    def log(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {criterion:<38} {detail}"
        lines.append(line)
        print(line)
        return ok

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


def brute_shift(s, n):
    """Shift |m> -> |m+n mod s> assembled entry by entry."""
    out = np.zeros((s, s), dtype=complex)
    for m in range(s):
        out[(m + n) % s, m] = 1
    return out


def brute_clock(s, k):
    out = np.zeros((s, s), dtype=complex)
    for m in range(s):
        out[m, m] = np.exp(2j * np.pi * k * m / s)
    return out


def same_up_to_phase(a, b, tol=1e-10):
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    overlap = np.vdot(a, b)
    if abs(overlap) < 1e-15:
        return False
    return np.max(np.abs(a * (overlap / abs(overlap)) - b)) <= tol
