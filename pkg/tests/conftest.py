"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cavitytraj import hilbert

settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


def random_pure_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def random_density_matrix(rng: np.random.Generator, dim: int, rank: int = 3) -> np.ndarray:
    """Random mixed state as a convex mixture of random pure states."""
    weights = rng.random(rank)
    weights = weights / weights.sum()
    rho = np.zeros((dim, dim), dtype=complex)
    for w in weights:
        psi = random_pure_state(rng, dim)
        rho += w * np.outer(psi, psi.conj())
    return 0.5 * (rho + rho.conj().T)


def random_product_state(rng: np.random.Generator, dims: hilbert.SpaceDims) -> np.ndarray:
    atom = random_pure_state(rng, 2)
    field = random_pure_state(rng, dims.fock_dim)
    return np.kron(atom, field)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(20240815))


# ---------------------------------------------------------------------------
# acceptance-report plumbing: the end-to-end tests in test_acceptance.py
# register one line each; we echo them in a summary section so they are
# visible even when pytest captures stdout.

ACCEPTANCE_LINES: list[str] = []


def record_acceptance_line(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
