import numpy as np
import pytest

from mufpairs.search import SearchConfig, multistart_search, refine_sic

_ACCEPTANCE_LINES = []


def record_criterion(number, name, passed, detail=""):
    status = "PASS" if passed else "FAIL"
    _ACCEPTANCE_LINES.append(f"[{status}] criterion {number:>2}: {name}" + (f" ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_unit(rng, d):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_matrix(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_hermitian(rng, n):
    A = random_matrix(rng, n)
    return (A + A.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_SOLVED = {}


def solved(d, t, ansatz="general", seed=7):
    """Cached search outcome; the search itself is the oracle for existence."""
    key = (d, t, ansatz, seed)
    if key not in _SOLVED:
        _SOLVED[key] = multistart_search(SearchConfig(d, t, ansatz, restarts=100, master_seed=seed))
    return _SOLVED[key]


def solved_sic(d, seed=7):
    """Covariant solution at t = 1/(d+1), refined with a shared fiducial."""
    key = (d, "sic", seed)
    if key not in _SOLVED:
        _SOLVED[key] = refine_sic(solved(d, 1.0 / (d + 1), "covariant", seed))
    return _SOLVED[key]
