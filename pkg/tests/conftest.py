import numpy as np
import pytest

from scdt import Grid, gabor, gaussian, uniform, uniform_reference


@pytest.fixture(scope="session")
def unit_grid():
    return Grid(0.0, 1.0, 2048)


@pytest.fixture(scope="session")
def s0(unit_grid):
    return uniform(unit_grid)


@pytest.fixture(scope="session")
def gab(unit_grid):
    return gabor(unit_grid)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_signed(grid, rng, k=3):
    """Sum of separated Gaussian bumps, at least one of each sign."""
    centers = np.linspace(0.3, 0.7, k) + rng.uniform(-0.03, 0.03, k)
    signs = rng.permutation([1, -1] + [int(rng.choice([-1, 1])) for _ in range(k - 2)])
    out = None
    for c, sgn in zip(centers, signs):
        g = gaussian(grid, center=c, sigma=rng.uniform(0.02, 0.05),
                     amplitude=sgn * rng.uniform(0.5, 2.0))
        out = g if out is None else out + g
    return out


def reference(n, lo=0.0, hi=1.0):
    return uniform_reference(lo, hi, n)
