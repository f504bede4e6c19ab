import numpy as np
import pytest

from ambmdp import seqtest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def bench_model():
    """Sequential-test model with one observation opportunity."""
    return seqtest.build_model(seqtest.SeqTestConfig(horizon=1))
