import math

import numpy as np
import pytest
from scipy import integrate

from gnormal import GFunction1D, ScenarioSet, SublinearDistribution, default_grid


@pytest.fixture
def band():
    return GFunction1D(0.5, 1.0)


@pytest.fixture
def grid():
    return default_grid(1.0)


@pytest.fixture
def two_measure_set():
    """{{(-1,1/2),(1,1/2)}, {(-2,1/2),(2,1/2)}}: the workhorse example."""
    return ScenarioSet([[(-1, 0.5), (1, 0.5)], [(-2, 0.5), (2, 0.5)]])


@pytest.fixture
def gnormal_half():
    return SublinearDistribution.gnormal(0.5, 1.0)


def gauss_expect(phi, sigma: float) -> float:
    """Independent oracle: E[phi(Z)] for classical Z ~ N(0, sigma^2),
    by adaptive quadrature against the density."""
    if sigma == 0.0:
        return phi(0.0)
    density = lambda x: math.exp(-x * x / (2 * sigma * sigma)) / (
        sigma * math.sqrt(2 * math.pi)
    )
    val, err = integrate.quad(
        lambda x: phi(x) * density(x), -12 * sigma, 12 * sigma, limit=200
    )
    assert err < 1e-8
    return val


def brute_scenario_expect(measures, phi) -> float:
    """Independent enumerator: sup over measures of the weighted sum."""
    best = -math.inf
    for m in measures:
        best = max(best, sum(w * phi(a) for a, w in m))
    return best


def brute_nested_expect(measures_x, measures_y, phi2) -> float:
    """Independent enumerator of the nested (Y-inner) expectation."""
    best = -math.inf
    for mx in measures_x:
        outer = 0.0
        for ax, wx in mx:
            inner = max(
                sum(wy * phi2(ax, ay) for ay, wy in my) for my in measures_y
            )
            outer += wx * inner
        best = max(best, outer)
    return best
