import numpy as np
import pytest

from deadtimekit import DetectorConfig


@pytest.fixture
def tiny_config():
    """4 bins of 25 ps, tau = 50 ps, one shot."""
    return DetectorConfig(tau=50e-12, bin_width=25e-12, num_bins=4, num_shots=1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
