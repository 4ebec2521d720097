import math

import numpy as np
import pytest

from dnls_lab import GaugeFrame, make_grid, random_decaying_field


@pytest.fixture(scope="session")
def line_grid():
    """Standard torus standing in for the line: gaussian data decays below
    1e-12 well before the boundary."""
    return make_grid(20 * math.pi, 2048)


@pytest.fixture(scope="session")
def probe_grid():
    """Grid for multiplier sweeps: integer frequency lattice up to 8192, so
    cutoffs up to 1024 still have plenty of headroom above 2N."""
    return make_grid(math.pi, 16384)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)


def gauged_samples(grid, count, rng, target_mass=None):
    return [
        random_decaying_field(grid, rng, frame=GaugeFrame.GAUGED, target_mass=target_mass)
        for _ in range(count)
    ]
