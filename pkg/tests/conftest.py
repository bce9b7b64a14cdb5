import numpy as np
import pytest

import impact_hedge as ih


@pytest.fixture
def unit_params():
    """kappa = 1, T = 1, x = 0."""
    return ih.ModelParams(kappa=1.0, horizon=1.0)


@pytest.fixture
def two_level_target():
    """Level 1 before T/2, level 2 after (the jump study's target)."""
    return ih.TargetProcess.deterministic([
        ih.TargetSegment(0.0, 0.5, ih.Constant(1.0)),
        ih.TargetSegment(0.5, 1.0, ih.Constant(2.0)),
    ])


@pytest.fixture
def singular_target():
    """sign(t - 1/2) |t - 1/2|^(-1/4) on [0, 1]."""
    return ih.TargetProcess.deterministic([
        ih.TargetSegment(0.0, 1.0, ih.PowerSingularity(center=0.5, exponent=0.25)),
    ])


@pytest.fixture
def asian_spec():
    """ATM average-price call: sigma = 1, K = 0, S0 = 0, T = 1."""
    return ih.BachelierAsianSpec(sigma=1.0, strike=0.0, s0=0.0, horizon=1.0)


def grid_with_half(n_steps: int) -> ih.TimeGrid:
    """Uniform-by-blocks grid on [0, 1] with 1/2 forced onto a node."""
    return ih.TimeGrid.uniform(1.0, n_steps, boundaries=(0.5,))


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
