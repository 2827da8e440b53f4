################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import math

import numpy as np
import pytest

from orquestra.kinetic.decay import fit_exponential, fit_power_law, windowed_exponents


@pytest.fixture()
def times():
    return np.geomspace(1.0, 1e3, 20)


@pytest.mark.parametrize("exponent", [-0.75, -1.25, -1.75])
def test_power_law_recovers_exact_exponent(times, exponent):
    # Given
    values = 3.0 * (1.0 + times) ** exponent

    # When
    fit = fit_power_law(times, values)

    # Then
    assert fit.exponent == pytest.approx(exponent, abs=1e-10)
    assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-9)
    assert fit.residual < 1e-9
    np.testing.assert_allclose(fit.envelope(times), values, rtol=1e-9)


def test_exponential_recovers_rate():
    times = np.linspace(0.0, 10.0, 30)
    values = 0.5 * np.exp(-0.3 * times)
    fit = fit_exponential(times, values)
    assert fit.rate == pytest.approx(0.3, abs=1e-10)
    assert fit.residual < 1e-9
    np.testing.assert_allclose(fit.envelope(times), values, rtol=1e-9)


def test_exponential_residual_is_relative():
    times = np.linspace(0.0, 7.0, 8)
    values = np.exp(-times) * np.array([1.0, 1.1, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
    assert 0.0 < fit_exponential(times, values).residual < 0.2


@pytest.mark.parametrize(
    "times, values",
    [
        (np.arange(5.0), np.ones(5)),
        (np.arange(10.0)[::-1], np.ones(10)),
        (np.arange(10.0), np.zeros(10)),
        (np.arange(10.0), np.full(10, np.nan)),
        (np.arange(10.0), np.ones(9)),
    ],
)
def test_fits_reject_invalid_series(times, values):
    with pytest.raises(ValueError):
        fit_power_law(times, values)
    with pytest.raises(ValueError):
        fit_exponential(times, values)


class TestWindowedExponents:
    def test_one_fit_per_window(self):
        times = np.geomspace(1.0, 1e3, 60)
        values = (1.0 + times) ** -1.25
        fits = windowed_exponents(times, values, [1.0, 10.0, 100.0])
        assert len(fits) == 3
        for fit in fits:
            assert fit.exponent == pytest.approx(-1.25, abs=1e-9)

    def test_sparse_window_warns(self):
        times = np.array([1.0, 5.0, 10.0])
        with pytest.warns(UserWarning):
            windowed_exponents(times, 1.0 / (1.0 + times), [1.0])

    def test_window_with_single_sample_raises(self):
        times = np.array([1.0, 100.0])
        with pytest.raises(ValueError):
            windowed_exponents(times, np.ones(2), [1.0])
