import math

import numpy as np
import pytest

from parisian_qsd.laplace import InversionError, euler_inversion


def test_exponential():
    for t in (0.3, 1.0, 4.0):
        got = euler_inversion(lambda s: 1.0 / (s + 1.0), t)
        assert got == pytest.approx(math.exp(-t), abs=1e-8)


def test_ramp():
    for t in (0.5, 2.0):
        got = euler_inversion(lambda s: 1.0 / s ** 2, t)
        assert got == pytest.approx(t, rel=1e-7)


def test_half_power():
    # transform of t^{-1/2}/sqrt(pi) is s^{-1/2}
    for t in (0.5, 1.5):
        got = euler_inversion(lambda s: 1.0 / np.sqrt(s), t)
        assert got == pytest.approx(1.0 / math.sqrt(math.pi * t), rel=1e-6)


def test_gamma_density():
    # Gamma(2, 1) density through its transform 1/(1+s)^2
    for t in (0.2, 1.0, 3.0):
        got = euler_inversion(lambda s: 1.0 / (1.0 + s) ** 2, t)
        assert got == pytest.approx(t * math.exp(-t), abs=1e-8)


def test_oscillation_error():
    # a transform growing along the contour cannot settle under Euler averaging
    with pytest.raises(InversionError):
        euler_inversion(lambda s: np.exp(s), 1.0)


def test_rejects_nonpositive_time():
    with pytest.raises(InversionError):
        euler_inversion(lambda s: 1.0 / s, 0.0)
