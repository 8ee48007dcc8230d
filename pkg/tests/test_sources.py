import numpy as np
import pytest

from cvbell.gaussian import apply, mode_permutation, second_moment, uncertainty_defect, vacuum
from cvbell.sources import (
    A_H,
    A_V,
    B_H,
    B_V,
    SourceKind,
    SourceParams,
    build_source,
    down_converter,
    four_opa_network,
    gain_from_squeezing_percent,
    squeezed_variance,
    squeezing_percent_from_gain,
)

EQUIVALENCE_GAINS = (1.0, 1.01, 1.1, 1.5, 2.0)


def test_down_converter_unit_gain_is_vacuum():
    np.testing.assert_array_equal(down_converter(1.0).cov, np.eye(8))


def test_four_opa_unit_gain_is_vacuum():
    np.testing.assert_allclose(four_opa_network(1.0).cov, np.eye(8), atol=1e-15)


def test_down_converter_low_gain_cross_moments():
    gain = 1.0001
    state = down_converter(gain)
    cross = 2.0 * np.sqrt(gain * (gain - 1.0))
    assert cross == pytest.approx(0.0200, abs=2e-6)
    assert second_moment(state, (A_H, 1), (B_H, 1)) == pytest.approx(cross, abs=1e-14)
    assert second_moment(state, (A_H, 1), (B_V, 1)) == 0.0


def test_down_converter_gain_two():
    state = down_converter(2.0)
    assert second_moment(state, (A_H, 1), (A_H, 1)) == pytest.approx(3.0, abs=1e-12)
    assert uncertainty_defect(state) > -1e-10


@pytest.mark.parametrize("builder", [down_converter, four_opa_network])
def test_sources_reject_sub_unit_gain(builder):
    with pytest.raises(ValueError):
        builder(0.5)


@pytest.mark.parametrize("gain", EQUIVALENCE_GAINS)
def test_source_equivalence(gain):
    diff = np.max(np.abs(down_converter(gain).cov - four_opa_network(gain).cov))
    assert diff < 1e-10


def test_four_opa_cross_moment_formula():
    gain = 1.1
    state = four_opa_network(gain)
    want = 2.0 * np.sqrt(gain * (gain - 1.0))
    assert second_moment(state, (A_H, 1), (B_H, 1)) == pytest.approx(want, abs=1e-10)


@pytest.mark.parametrize("gain", EQUIVALENCE_GAINS)
def test_swap_symmetry_of_polarization_pairs(gain):
    for state in (down_converter(gain), four_opa_network(gain)):
        swapped = apply(state, mode_permutation((A_V, A_H, B_V, B_H)))
        np.testing.assert_array_equal(swapped.cov, state.cov)


@pytest.mark.parametrize("gain", EQUIVALENCE_GAINS)
def test_no_cross_polarization_correlations(gain):
    for state in (down_converter(gain), four_opa_network(gain)):
        for qa in (1, 2):
            for qb in (1, 2):
                assert second_moment(state, (A_H, qa), (A_V, qb)) == 0.0
                assert second_moment(state, (A_H, qa), (B_V, qb)) == 0.0
                assert second_moment(state, (B_H, qa), (A_V, qb)) == 0.0
                assert second_moment(state, (B_H, qa), (B_V, qb)) == 0.0


def test_build_source_dispatch():
    for kind, builder in (
        (SourceKind.DOWN_CONVERTER, down_converter),
        (SourceKind.FOUR_OPA_NETWORK, four_opa_network),
    ):
        got = build_source(SourceParams(kind=kind, gain=1.3))
        np.testing.assert_array_equal(got.cov, builder(1.3).cov)


def test_source_params_validation():
    with pytest.raises(ValueError):
        SourceParams(kind=SourceKind.DOWN_CONVERTER, gain=0.9)


def test_gain_percent_round_trip():
    for percent in (0.0, 1.0, 10.0, 62.5, 99.0):
        gain = gain_from_squeezing_percent(percent)
        assert squeezing_percent_from_gain(gain) == pytest.approx(percent, abs=1e-9)
    assert gain_from_squeezing_percent(0.0) == 1.0


def test_squeezed_variance_definition():
    gain = 1.4
    want = (np.sqrt(gain) - np.sqrt(gain - 1.0)) ** 2
    assert squeezed_variance(gain) == want
    # the anti-squeezed quadrature is the reciprocal: pure squeezer
    assert squeezed_variance(gain) * (np.sqrt(gain) + np.sqrt(gain - 1)) ** 2 == pytest.approx(1.0)


def test_percent_conversion_validation():
    with pytest.raises(ValueError):
        gain_from_squeezing_percent(100.0)
    with pytest.raises(ValueError):
        gain_from_squeezing_percent(-1.0)
    with pytest.raises(ValueError):
        squeezed_variance(0.5)
