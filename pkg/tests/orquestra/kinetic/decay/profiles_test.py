################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import math

import numpy as np
import pytest

from orquestra.kinetic.decay import DuhamelSource, InitialProfile, gaussian_lq_norm
from orquestra.kinetic.hermite import HermiteCoeffVector, hermite_basis


class TestInitialProfile:
    def test_direction_places_fluid_and_kinetic_amplitudes(self):
        # Given
        basis = hermite_basis(3)
        profile = InitialProfile(
            fluid=(1.0, 0.0, 2.0, 0.0, 3.0), kinetic=(((0, 1, 1), 0.5),)
        )

        # When
        direction = profile.direction(basis)

        # Then
        assert direction[basis.index((0, 1, 1))] == 0.5
        np.testing.assert_allclose(direction[basis.size :], [1.0, 0.0, 2.0, 0.0, 3.0])
        assert np.count_nonzero(direction) == 4

    def test_z2_norm_is_exact(self):
        profile = InitialProfile(sigma=2.0)
        expected = math.sqrt(3.0) * (math.pi * 4.0) ** 0.75
        assert profile.z2_norm(hermite_basis(3)) == pytest.approx(expected)

    def test_envelope_transform_at_zero_is_integral(self):
        profile = InitialProfile(sigma=0.5)
        assert profile.envelope_hat(0.0) == pytest.approx(
            (2 * math.pi * 0.25) ** 1.5
        )

    @pytest.mark.parametrize(
        "kwargs", [{"sigma": 0.0}, {"fluid": (1.0, 0.0, 0.0)}]
    )
    def test_invalid_profiles(self, kwargs):
        with pytest.raises(ValueError):
            InitialProfile(**kwargs)

    def test_dict_round_trip(self):
        profile = InitialProfile(
            sigma=0.7, fluid=(0.0, 1.0, 0.0, 0.0, 0.0), kinetic=(((2, 0, 0), -1.0),)
        )
        assert InitialProfile.from_dict(profile.to_dict()) == profile

    def test_missing_fluid_components_default_to_zero(self):
        profile = InitialProfile.from_dict({"fluid": {"theta": 2.0}})
        assert profile.fluid == (0.0, 0.0, 0.0, 0.0, 2.0)

    @pytest.mark.parametrize(
        "item", [{"width": 1.0}, {"fluid": {"pressure": 1.0}}]
    )
    def test_from_dict_rejects_unknown_keys(self, item):
        with pytest.raises(ValueError):
            InitialProfile.from_dict(item)


@pytest.mark.parametrize("sigma", [0.5, 1.0, 3.0])
def test_gaussian_l2_norm_matches_profile(sigma):
    profile = InitialProfile(sigma=sigma)
    assert gaussian_lq_norm(sigma, 2) ** 2 == pytest.approx(
        profile.envelope_l2_norm_squared()
    )


def test_gaussian_l1_norm():
    assert gaussian_lq_norm(1.0, 1) == pytest.approx((2 * math.pi) ** 1.5)


def test_gaussian_norm_needs_q_at_least_one():
    with pytest.raises(ValueError):
        gaussian_lq_norm(1.0, 0.5)


class TestDuhamelSource:
    @pytest.fixture()
    def basis(self):
        return hermite_basis(3)

    @pytest.fixture()
    def source(self, basis):
        g = (
            HermiteCoeffVector.from_mapping(basis, {(2, 0, 0): 1.0}),
            HermiteCoeffVector.zeros(basis),
            HermiteCoeffVector.zeros(basis),
        )
        h = HermiteCoeffVector.from_mapping(basis, {(1, 1, 0): 1.0})
        return DuhamelSource(g=g, h=h, t_on=0.0, t_off=1.0)

    def test_kinetic_direction(self, basis, source):
        direction = source.kinetic_direction()
        expected = np.zeros(basis.size, dtype=complex)
        expected[basis.index((1, 1, 0))] = 1.0
        expected[basis.index((3, 0, 0))] = -math.sqrt(3.0)
        np.testing.assert_allclose(direction, expected)

    def test_time_window(self, source):
        assert source.time_profile(0.0) == 1.0
        assert source.time_profile(0.999) == 1.0
        assert source.time_profile(1.0) == 0.0
        assert source.breakpoints == (1.0,)

    def test_orthogonal_source_passes_check(self, source):
        source.check_orthogonality()

    def test_macroscopic_h_fails_check(self, basis, source):
        h = HermiteCoeffVector.from_mapping(basis, {(0, 0, 0): 1.0})
        with pytest.raises(ValueError):
            DuhamelSource(g=source.g, h=h).check_orthogonality()

    def test_velocity_norm_counts_g_fully(self, basis, source):
        h_free = DuhamelSource(g=source.g, h=HermiteCoeffVector.zeros(basis))
        assert h_free.velocity_norm_squared() == pytest.approx(1.0)
        assert 1.0 < source.velocity_norm_squared() < 2.0

    def test_empty_window_raises_value_error(self, source):
        with pytest.raises(ValueError):
            DuhamelSource(g=source.g, h=source.h, t_on=2.0, t_off=1.0)

    def test_mixed_truncations_raise_value_error(self, source):
        with pytest.raises(ValueError):
            DuhamelSource(g=source.g, h=HermiteCoeffVector.zeros(hermite_basis(4)))
