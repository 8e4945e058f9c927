import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from spurmaxt.dataset import GroupedDataset  # noqa: E402


def make_dataset(n=(10, 10), p=3, shifts=None, rho=0.0, seed=0):
    """Gaussian groups with exchangeable correlation ``rho``; ``shifts[s-1]`` moves case group s."""
    rng = np.random.default_rng(seed)
    cov = np.full((p, p), rho)
    np.fill_diagonal(cov, 1.0)
    chol = np.linalg.cholesky(cov)
    groups = []
    for u, size in enumerate(n):
        x = rng.standard_normal((size, p)) @ chol.T
        if u > 0 and shifts is not None:
            x = x + np.asarray(shifts[u - 1], dtype=float)
        groups.append(x)
    return GroupedDataset(tuple(groups))


@pytest.fixture
def small_ds():
    return make_dataset(n=(8, 9, 7), p=4, shifts=[0.5, 1.0], rho=0.3, seed=42)


ACCEPTANCE_LINES = []


def record_criterion(number, passed, detail):
    """Print and keep one summary line per acceptance criterion."""
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
