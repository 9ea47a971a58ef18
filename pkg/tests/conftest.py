import numpy as np
import pytest

from landausplit import PeriodicProfile, discretize, spectrum_2d


@pytest.fixture(scope="session")
def cosine():
    return PeriodicProfile.cosine()


@pytest.fixture(scope="session")
def clean_l12():
    """Clean Landau box at B=1, L=12, h=0.25 with the low spectrum; shared
    because the shift-invert solve is the slowest common setup."""
    ham = discretize(12.0, 0.25, 1.0)
    spec = spectrum_2d(ham, 120)
    return ham, spec


TWO_PI_SQ = 2.0 * np.pi**2
