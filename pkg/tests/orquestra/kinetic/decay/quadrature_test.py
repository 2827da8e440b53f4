################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import math

import numpy as np
import pytest

from orquestra.kinetic.decay import KQuadrature, sphere_rule


@pytest.mark.parametrize("name, size", [("lebedev26", 26), ("lebedev50", 50)])
def test_sphere_rule_integrates_low_degree_monomials(name, size):
    # Given
    directions, weights = sphere_rule(name)
    x, y, z = directions.T

    # Then
    assert len(weights) == size
    np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0)
    assert weights.sum() == pytest.approx(4 * math.pi)
    assert weights @ x**2 == pytest.approx(4 * math.pi / 3)
    assert weights @ x**4 == pytest.approx(4 * math.pi / 5)
    assert weights @ (x**2 * y**2) == pytest.approx(4 * math.pi / 15)
    assert weights @ (x * y**3 * z) == pytest.approx(0.0, abs=1e-14)


def test_larger_sphere_rule_reaches_degree_ten():
    directions, weights = sphere_rule("lebedev50")
    x, y, z = directions.T
    assert weights @ x**6 == pytest.approx(4 * math.pi / 7)
    assert weights @ (x**4 * y**2 * z**4) == pytest.approx(4 * math.pi * 9 / 10395)


def test_unknown_sphere_rule():
    with pytest.raises(ValueError):
        sphere_rule("lebedev6")


class TestKQuadrature:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"k_min": 0.0},
            {"k_min": 5.0, "k_max": 1.0},
            {"n_radial": 1},
            {"angular": "gauss"},
        ],
    )
    def test_invalid_settings(self, kwargs):
        with pytest.raises(ValueError):
            KQuadrature(**kwargs)

    def test_radial_rule_integrates_gaussian_moment(self):
        radii, weights = KQuadrature().radial_rule()
        assert weights @ np.exp(-(radii**2)) == pytest.approx(
            math.sqrt(math.pi) / 4, rel=1e-8
        )

    def test_nodes_integrate_gaussian_over_space(self):
        vectors, weights = KQuadrature().nodes()
        k_squared = np.sum(vectors**2, axis=1)
        assert weights @ np.exp(-k_squared) == pytest.approx(math.pi**1.5, rel=1e-8)

    def test_refined_doubles_radial_nodes(self):
        refined = KQuadrature(n_radial=16).refined()
        assert refined.n_radial == 32
        assert refined.angular == "lebedev50"

    def test_dict_round_trip(self):
        quad = KQuadrature(k_min=0.01, k_max=5.0, n_radial=12, angular="lebedev50")
        assert KQuadrature.from_dict(quad.to_dict()) == quad

    def test_from_dict_rejects_unknown_keys(self):
        with pytest.raises(ValueError):
            KQuadrature.from_dict({"k_min": 0.1, "radial": 3})
