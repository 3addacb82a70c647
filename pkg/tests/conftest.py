import numpy as np
import pytest

from pstchain import ChainSpec

ACCEPTANCE_LINES: list[str] = []


def random_chain(rng, n, omega_range=(0.2, 2.0), lam_width=1.0):
    omega = rng.uniform(*omega_range, n - 1)
    lam = rng.uniform(-lam_width, lam_width, n)
    return ChainSpec(n, omega, lam)


def random_mirror_chain(rng, n, omega_range=(0.2, 2.0), lam_width=1.0):
    omega = rng.uniform(*omega_range, n - 1)
    lam = rng.uniform(-lam_width, lam_width, n)
    return ChainSpec(n, 0.5 * (omega + omega[::-1]), 0.5 * (lam + lam[::-1]))


def random_odd_gaps(rng, n, alphabet=(1, 3, 5, 7)):
    return tuple(int(g) for g in rng.choice(alphabet, size=n - 1))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def record(name, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append(f"[{status}] {name}: {detail}")
        assert passed, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
