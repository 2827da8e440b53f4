################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import math

import numpy as np
import pytest

from orquestra.kinetic.decay import (
    DuhamelSource,
    InitialProfile,
    KQuadrature,
    synthesize_linear_norm,
    synthesize_linear_norms,
    verify_duhamel_bound,
)
from orquestra.kinetic.hermite import (
    HermiteBasisSpec,
    HermiteCoeffVector,
    hermite_basis,
)

SPEC = HermiteBasisSpec(truncation=3)
COARSE = KQuadrature(k_min=1e-2, k_max=10.0, n_radial=4)


@pytest.fixture()
def profile():
    return InitialProfile()


def test_norms_at_time_zero_match_plancherel(profile):
    # When
    norms = synthesize_linear_norms(
        profile, [0.0], quad=KQuadrature(n_radial=32), spec=SPEC
    )

    # Then
    z2 = profile.z2_norm(hermite_basis(3))
    assert norms[0][0] == pytest.approx(z2, rel=1e-6)
    assert norms[1][0] == pytest.approx(math.sqrt(1.5) * z2, rel=1e-6)
    assert norms[2][0] == pytest.approx(math.sqrt(15.0 / 4.0) * z2, rel=1e-6)


def test_norms_do_not_increase(profile):
    norms = synthesize_linear_norms(
        profile, [0.0, 0.5, 2.0, 5.0], orders=(0,), quad=COARSE, spec=SPEC
    )
    assert set(norms) == {0}
    assert np.all(np.diff(norms[0]) <= 1e-10 * norms[0][0])


def test_unsorted_times_keep_their_order(profile):
    norms = synthesize_linear_norms(
        profile, [2.0, 0.0], orders=(0,), quad=COARSE, spec=SPEC
    )[0]
    assert norms[1] > norms[0]


def test_low_cutoff_restricts_nodes(profile):
    full = synthesize_linear_norm(profile, 0.0, quad=COARSE, spec=SPEC)
    low = synthesize_linear_norm(
        profile, 0.0, quad=COARSE, spec=SPEC, low_cutoff=1.0
    )
    assert 0 < low < full


def test_low_cutoff_below_every_node_raises(profile):
    with pytest.raises(ValueError):
        synthesize_linear_norm(profile, 0.0, quad=COARSE, spec=SPEC, low_cutoff=1e-3)


def test_refinement_check_rejects_coarse_quadrature(profile):
    with pytest.raises(ValueError):
        synthesize_linear_norm(
            profile, 0.0, quad=COARSE, spec=SPEC, refinement_tolerance=1e-12
        )


def test_worker_processes_give_identical_norms(profile):
    quad = KQuadrature(k_min=1e-2, k_max=10.0, n_radial=2)
    serial = synthesize_linear_norms(profile, [0.5], (0,), quad, spec=SPEC)
    parallel = synthesize_linear_norms(
        profile, [0.5], (0,), quad, spec=SPEC, threads=2
    )
    np.testing.assert_allclose(serial[0], parallel[0], rtol=1e-12)


@pytest.mark.parametrize(
    "kwargs", [{"orders": (3,)}, {"times": [-1.0]}]
)
def test_invalid_arguments(profile, kwargs):
    arguments = {"times": [0.0], "quad": COARSE, "spec": SPEC}
    arguments.update(kwargs)
    with pytest.raises(ValueError):
        synthesize_linear_norms(profile, **arguments)


class TestVerifyDuhamelBound:
    @pytest.fixture()
    def source(self):
        basis = hermite_basis(3)
        g = (
            HermiteCoeffVector.from_mapping(basis, {(2, 0, 0): 1.0}),
            HermiteCoeffVector.zeros(basis),
            HermiteCoeffVector.zeros(basis),
        )
        h = HermiteCoeffVector.from_mapping(basis, {(1, 1, 0): 1.0})
        return DuhamelSource(g=g, h=h)

    def test_forced_response_stays_below_convolution_bound(self, source):
        # When
        result = verify_duhamel_bound(source, [0.5, 1.0, 2.0, 4.0], quad=COARSE)

        # Then
        assert result.lhs.shape == (4,)
        assert np.all(result.lhs > 0)
        assert np.all(result.rhs > 0)
        assert result.bounded

    @pytest.mark.parametrize("q", [0.5, 3.0])
    def test_rejects_exponent_outside_unit_interval(self, source, q):
        with pytest.raises(ValueError):
            verify_duhamel_bound(source, [1.0], q=q, quad=COARSE)

    def test_rejects_macroscopic_source(self, source):
        h = HermiteCoeffVector.from_mapping(hermite_basis(3), {(0, 0, 0): 1.0})
        with pytest.raises(ValueError):
            verify_duhamel_bound(DuhamelSource(g=source.g, h=h), [1.0], quad=COARSE)
