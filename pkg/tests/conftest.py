import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from pairent.qcore import make_state

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)

ACCEPTANCE_LINES: list[str] = []


def random_amplitudes(rng, n_qubits=4):
    dim = 2**n_qubits
    return rng.standard_normal(dim) + 1j * rng.standard_normal(dim)


def random_pure(rng, n_qubits=4):
    return make_state(n_qubits, random_amplitudes(rng, n_qubits), normalize=True)


def random_density(rng, dim=4, floor=0.2):
    """Full-support density matrix with smallest eigenvalue at least ``floor / dim``."""
    w = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = w @ w.conj().T
    rho /= np.trace(rho).real
    return (1 - floor) * rho + floor * np.eye(dim) / dim


def random_hermitian(rng, dim):
    w = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (w + w.conj().T)


def random_local_unitary(rng):
    from scipy.stats import unitary_group

    return [unitary_group.rvs(2, random_state=rng) for _ in range(4)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance():
    def record(criterion, ok, detail):
        line = f"[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
