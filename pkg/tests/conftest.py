import time

import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def prob_vectors(min_n=1, max_n=6):
    """Strategy for strictly positive-weight probability vectors."""
    return st.integers(min_n, max_n).flatmap(
        lambda n: arrays(np.float64, n, elements=st.floats(0.0, 1.0)).filter(lambda a: a.sum() > 1e-3)
    ).map(lambda a: a / a.sum())


def random_joint(rng, n, m, zeros=False):
    p = rng.random((n, m))
    if zeros:
        p[rng.random((n, m)) < 0.3] = 0.0
        if p.sum() == 0:
            p[0, 0] = 1.0
    return p / p.sum()


def random_doubly_stochastic(rng, n, terms=5):
    w = rng.dirichlet(np.ones(terms))
    return sum(wi * np.eye(n)[rng.permutation(n)] for wi in w)


_RESULTS = pytest.StashKey[list]()


class _Criterion:
    """Times a block and records one pass/fail line for the acceptance summary."""

    def __init__(self, log, number, title, limit):
        self.log, self.number, self.title, self.limit = log, number, title, limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        ok = exc_type is None and elapsed <= self.limit
        why = "" if exc_type is None else f" ({exc_type.__name__})"
        line = (
            f"criterion {self.number:2d}: {'PASS' if ok else 'FAIL'}  {self.title}"
            f"  [{elapsed:.4g}s / {self.limit:g}s]{why}"
        )
        self.log.append((self.number, line))
        print(line)
        if exc_type is None and not ok:
            pytest.fail(f"criterion {self.number} took {elapsed:.3g}s, limit {self.limit:g}s")
        return False


@pytest.fixture
def criterion(request):
    log = request.config.stash.setdefault(_RESULTS, [])
    return lambda number, title, limit: _Criterion(log, number, title, limit)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_RESULTS, [])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(log):
        terminalreporter.write_line(line)
