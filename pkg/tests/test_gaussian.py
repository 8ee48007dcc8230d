import numpy as np
import pytest

from cvbell.gaussian import (
    GaussianState,
    QuadratureIndex,
    SymplecticOp,
    apply,
    beamsplitter_pi2,
    fourth_moment,
    mode_permutation,
    polarization_rotation,
    reduce_to_modes,
    second_moment,
    single_mode_squeeze,
    symplectic_form,
    two_mode_squeeze,
    uncertainty_defect,
    symplectic_defect,
    vacuum,
)

from conftest import isserlis_oracle, random_constructor_op, random_state


def test_vacuum_is_identity():
    assert np.array_equal(vacuum(1).cov, np.eye(2))
    assert np.array_equal(vacuum(4).cov, np.eye(8))


def test_vacuum_rejects_zero_modes():
    with pytest.raises(ValueError):
        vacuum(0)


def test_vacuum_quadratures_uncorrelated():
    assert second_moment(vacuum(1), (0, 1), (0, 2)) == 0.0


def test_vacuum_variance_is_quantum_noise_level():
    state = vacuum(2)
    for mode in range(2):
        for quad in (1, 2):
            assert second_moment(state, (mode, quad), (mode, quad)) == 1.0


def test_apply_identity_keeps_state():
    state = random_state(np.random.default_rng(0), 3)
    out = apply(state, SymplecticOp(np.eye(6)))
    np.testing.assert_allclose(out.cov, state.cov, atol=0)


def test_apply_dimension_mismatch():
    with pytest.raises(ValueError):
        apply(vacuum(2), SymplecticOp(np.eye(6)))


def test_squeeze_then_inverse_recovers_state():
    op = two_mode_squeeze(0, 1, 1.7, 3)
    state = random_state(np.random.default_rng(1), 3)
    out = apply(apply(state, op), op.inverse())
    np.testing.assert_allclose(out.cov, state.cov, atol=1e-10)


def test_two_mode_squeeze_unit_gain_is_identity():
    op = two_mode_squeeze(0, 1, 1.0, 2)
    np.testing.assert_allclose(op.mat, np.eye(4), atol=0)


def test_two_mode_squeeze_low_gain_moments():
    gain = 1.01
    state = apply(vacuum(2), two_mode_squeeze(0, 1, gain, 2))
    cross = 2.0 * np.sqrt(gain * (gain - 1.0))
    assert cross == pytest.approx(0.201, abs=5e-4)
    assert second_moment(state, (0, 1), (1, 1)) == pytest.approx(cross, abs=1e-12)
    assert second_moment(state, (0, 2), (1, 2)) == pytest.approx(-cross, abs=1e-12)
    assert second_moment(state, (0, 1), (0, 1)) == pytest.approx(2 * gain - 1, abs=1e-12)


def test_two_mode_squeeze_validation():
    with pytest.raises(ValueError):
        two_mode_squeeze(0, 0, 1.5, 2)
    with pytest.raises(ValueError):
        two_mode_squeeze(0, 1, 0.99, 2)


@pytest.mark.parametrize("gain", [1.0, 1.5, 10.0, 100.0])
def test_two_mode_squeeze_respects_uncertainty(gain):
    state = apply(vacuum(2), two_mode_squeeze(0, 1, gain, 2))
    assert uncertainty_defect(state) > -1e-10


def test_polarization_rotation_zero_is_identity():
    op = polarization_rotation(0.0, 0, 1, 2)
    np.testing.assert_allclose(op.mat, np.eye(4), atol=0)


def test_polarization_rotation_halfpi_swaps_with_sign():
    op = polarization_rotation(np.pi / 2, 0, 1, 2)
    want = np.zeros((4, 4))
    # plus port = v, minus port = -h
    want[0, 2] = 1.0
    want[1, 3] = 1.0
    want[2, 0] = -1.0
    want[3, 1] = -1.0
    np.testing.assert_allclose(op.mat, want, atol=1e-16)


def test_polarization_rotation_inverse_pair():
    theta = 0.7321
    forward = polarization_rotation(theta, 0, 1, 2)
    back = polarization_rotation(-theta, 0, 1, 2)
    np.testing.assert_allclose(back.mat @ forward.mat, np.eye(4), atol=1e-12)


def test_beamsplitter_symplectic_tight():
    assert symplectic_defect(beamsplitter_pi2(0, 1, 2)) < 1e-12


def test_passive_ops_preserve_vacuum():
    # exact up to one ulp: BLAS fused multiply-adds leave ~1e-17 residue in
    # entries that cancel algebraically
    bs = apply(vacuum(2), beamsplitter_pi2(0, 1, 2))
    np.testing.assert_allclose(bs.cov, np.eye(4), atol=1e-15)
    rot = apply(vacuum(2), polarization_rotation(0.3, 0, 1, 2))
    np.testing.assert_allclose(rot.cov, np.eye(4), atol=1e-15)


def test_constructor_ops_are_symplectic():
    rng = np.random.default_rng(42)
    for _ in range(50):
        op = random_constructor_op(rng, 4)
        assert symplectic_defect(op) < 1e-10


def test_reachable_states_respect_uncertainty():
    rng = np.random.default_rng(43)
    for _ in range(25):
        state = random_state(rng, 4, depth=5)
        assert uncertainty_defect(state) > -1e-10


def test_second_moment_squeezed_variance():
    gain = 1.01
    state = apply(vacuum(2), two_mode_squeeze(0, 1, gain, 2))
    assert second_moment(state, (0, 1), (0, 1)) == pytest.approx(1.02, abs=1e-12)


def test_fourth_moment_vacuum_kurtosis():
    idx = QuadratureIndex(0, 1)
    assert fourth_moment(vacuum(1), [idx, idx, idx, idx]) == 3.0


def test_fourth_moment_square_pattern():
    # V_1 = V_2 = 2 with cross-correlation 1: <(X1 X2)^2> = V1 V2 + 2 V12^2
    state = GaussianState(1, np.array([[2.0, 1.0], [1.0, 2.0]]))
    got = fourth_moment(state, [(0, 1), (0, 1), (0, 2), (0, 2)])
    assert got == pytest.approx(6.0, abs=0)


def test_fourth_moment_matches_pairing_enumeration():
    rng = np.random.default_rng(44)
    for _ in range(100):
        state = random_state(rng, 2, depth=4)
        idx = [
            QuadratureIndex(int(rng.integers(0, 2)), int(rng.integers(1, 3)))
            for _ in range(4)
        ]
        flat = [state.index(i) for i in idx]
        want = isserlis_oracle(state.cov, flat)
        assert fourth_moment(state, idx) == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_fourth_moment_matches_sampling():
    rng = np.random.default_rng(45)
    state = random_state(rng, 2, depth=3)
    idx = [(0, 1), (1, 1), (0, 2), (1, 2)]
    flat = [state.index(i) for i in idx]
    w, v = np.linalg.eigh(state.cov)
    factor = v * np.sqrt(np.clip(w, 0, None))
    samples = rng.standard_normal((1_000_000, 4)) @ factor.T
    products = samples[:, flat[0]] * samples[:, flat[1]] * samples[:, flat[2]] * samples[:, flat[3]]
    se = products.std(ddof=1) / np.sqrt(products.size)
    assert abs(products.mean() - fourth_moment(state, idx)) < 4 * se


def test_fourth_moment_requires_four_indices():
    with pytest.raises(ValueError):
        fourth_moment(vacuum(1), [(0, 1), (0, 1)])


def test_quadrature_index_validation():
    state = vacuum(2)
    with pytest.raises(ValueError):
        second_moment(state, (0, 3), (0, 1))
    with pytest.raises(ValueError):
        second_moment(state, (2, 1), (0, 1))


def test_asymmetric_covariance_rejected():
    bad = np.array([[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(ValueError):
        GaussianState(1, bad)


def test_non_symplectic_matrix_rejected():
    with pytest.raises(ValueError):
        SymplecticOp(2.0 * np.eye(4))


def test_mode_permutation_moves_blocks():
    state = apply(vacuum(2), single_mode_squeeze(0, 2.0, 2))
    swapped = apply(state, mode_permutation((1, 0)))
    np.testing.assert_allclose(swapped.cov[2:, 2:], state.cov[:2, :2], atol=0)
    with pytest.raises(ValueError):
        mode_permutation((0, 0))


def test_reduce_to_modes_extracts_marginal():
    rng = np.random.default_rng(46)
    state = random_state(rng, 3, depth=4)
    sub = reduce_to_modes(state, [2, 0])
    np.testing.assert_allclose(
        sub.cov[:2, :2], state.cov[4:6, 4:6], atol=0
    )
    np.testing.assert_allclose(sub.cov[2:, 2:], state.cov[:2, :2], atol=0)
    with pytest.raises(ValueError):
        reduce_to_modes(state, [0, 0])


def test_symplectic_form_squares_to_minus_identity():
    omega = symplectic_form(3)
    np.testing.assert_array_equal(omega @ omega, -np.eye(6))
