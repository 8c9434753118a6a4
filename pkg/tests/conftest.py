import numpy as np
import pytest

from linkact.instance import Instance


def make_e2(cross: float = 1e-7, gamma: float = 0.5) -> Instance:
    """Two symmetric links: own gain 1e-8, cross gain ``cross``, 1 W, noise
    1e-13 W. With the strong cross (1e-7) the pair is SUD-infeasible but each
    receiver can decode and cancel the other link."""
    gains = np.array([[1e-8, cross], [cross, 1e-8]])
    return Instance(
        K=2,
        gains=gains,
        powers=np.ones(2),
        noise=1e-13,
        thresholds=np.full(2, gamma),
        weights=np.ones(2),
    )


def random_instance(rng, K, gamma_db=None, weights=None) -> Instance:
    """Small random instance with log-normal gains; exercises awkward scales."""
    from linkact.units import db_to_linear

    gains = rng.lognormal(mean=-18.0, sigma=2.5, size=(K, K))
    gains[np.diag_indices(K)] = rng.lognormal(mean=-16.0, sigma=1.5, size=K)
    powers = rng.uniform(0.5, 2.0, K)
    if gamma_db is None:
        thresholds = rng.lognormal(mean=-0.5, sigma=0.8, size=K)
    else:
        thresholds = np.full(K, db_to_linear(gamma_db))
    if weights is None:
        weights = rng.uniform(0.2, 3.0, K)
    return Instance(
        K=K,
        gains=gains,
        powers=powers,
        noise=1e-13,
        thresholds=thresholds,
        weights=np.asarray(weights, dtype=float),
    )


@pytest.fixture
def e2():
    return make_e2()


@pytest.fixture
def e2_weak():
    return make_e2(cross=1e-9)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
