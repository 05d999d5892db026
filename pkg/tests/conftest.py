import numpy as np
import pytest

from mfseries import AlgebraContext, identity_series, random_series
from mfseries.freeprob import random_cumulants

# lines reported by test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []

# (d, N) -> seeds of the shared random corpus
CORPUS_SHAPES = [(1, 5), (2, 5), (3, 4)]
CORPUS_TRIALS = 20


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(params=[1, 2, 3], ids=lambda d: f"d{d}")
def ctx(request):
    return AlgebraContext(request.param)


@pytest.fixture
def ctx2():
    return AlgebraContext(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def well_conditioned_inner(ctx, order, rng, scale=0.3):
    """Random series with zero constant term and linear part close to the identity."""
    f = random_series(ctx, order, rng, scale)
    return f - f.constant + identity_series(ctx, order)


def well_conditioned_unit(ctx, order, rng, scale=0.3):
    """Random series whose constant term is a small perturbation of 1."""
    return random_series(ctx, order, rng, scale, constant=ctx.unit() + ctx.random_element(rng, scale))


def random_pair(ctx, order, seed, scale=0.3):
    rng = np.random.default_rng(seed)
    return random_cumulants(ctx, order, rng, scale), random_cumulants(ctx, order, rng, scale)
