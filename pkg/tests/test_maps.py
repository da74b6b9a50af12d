import numpy as np
import pytest

from majorize.campaigns import random_contractive_map, random_unital_map
from majorize.errors import DimensionMismatch, NotPSD, ValidationError
from majorize.hermitian import HermitianMatrix, eigenvalues, reconstruction_tol
from majorize.maps import (
    BlockAverage,
    BlockDiagonalExpectation,
    BlockPinch,
    ChoiKraus,
    DiscreteDensity,
    SchurMultiplier,
    State,
    apply,
    centralizer_defect,
    classify,
    compose_with_state,
    diagonal_pinching,
    input_dim,
    normalized_trace,
)
from majorize.sampling import haar_unitary, philox_rng, random_hermitian, random_psd, random_state

A_EXAMPLE = np.array([[-2, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]], dtype=complex)
KINDS = ("block_pinch", "schur", "choi_kraus", "block_expectation", "density", "diagonal", "state", "unitary")


def test_block_average_on_example():
    out = apply(BlockAverage(), A_EXAMPLE)
    np.testing.assert_allclose(out.entries, [[-0.5, 0.5], [0.5, 0.5]], atol=1e-15)


def test_schur_all_ones_is_identity_map():
    a = random_hermitian(3, philox_rng(0))
    np.testing.assert_allclose(apply(SchurMultiplier(np.ones((3, 3))), a).entries, a, atol=1e-15)


def test_choi_kraus_identity_is_identity_map():
    a = random_hermitian(3, philox_rng(1))
    np.testing.assert_allclose(apply(ChoiKraus((np.eye(3),)), a).entries, a, atol=1e-15)


def test_classify_direct_sum_kraus_is_unital():
    u = haar_unitary(3, philox_rng(2))
    c = classify(ChoiKraus((np.eye(3) / np.sqrt(2), u / np.sqrt(2))))
    assert c.unital and c.contractive


def test_classify_schur_with_unit_diagonal():
    b = np.array([[1, 0.3], [0.3, 1]])
    assert classify(SchurMultiplier(b)).unital


def test_classify_state():
    assert classify(State(np.diag([0.5, 0.5]))).unital


def test_classify_contractive_not_unital():
    c = classify(ChoiKraus((np.sqrt(0.5) * np.eye(2),)))
    assert c.contractive and not c.unital
    assert c.unit_defect == pytest.approx(0.5)


def test_classify_expanding_map():
    c = classify(ChoiKraus((np.sqrt(2) * np.eye(2),)))
    assert not c.contractive and not c.unital


def test_block_pinch_without_size_uses_hint():
    assert classify(BlockPinch(0.3), n=3).unital
    assert input_dim(BlockPinch(0.3), 3) == 6


def test_compose_identity_kraus_with_state():
    rho = random_state(3, philox_rng(3))
    s = compose_with_state(ChoiKraus((np.eye(3),)), State(rho))
    np.testing.assert_allclose(s.rho, rho, atol=1e-15)
    assert s.normalized


def test_compose_schur_all_ones_with_state():
    rho = random_state(3, philox_rng(4))
    np.testing.assert_allclose(compose_with_state(SchurMultiplier(np.ones((3, 3))), rho).rho, rho, atol=1e-15)


def test_compose_block_average_with_normalized_trace():
    s = compose_with_state(BlockAverage(n=2), normalized_trace(2))
    # on matrix units: tr/2 of the average picks diagonal entries with weight 1/4
    for i in range(4):
        for j in range(4):
            e = np.zeros((4, 4))
            e[i, j] = 1
            avg = 0.5 * (e[:2, :2] + e[2:, 2:])
            assert np.trace(s.rho @ e) == pytest.approx(np.trace(avg) / 2)
    np.testing.assert_allclose(s.rho, np.eye(4) / 4, atol=1e-15)


@pytest.mark.parametrize("kind", KINDS)
def test_compose_with_state_matches_direct_evaluation(kind):
    rng = philox_rng(5)
    phi, m = random_unital_map(rng, 3, kind)
    out = 1 if phi.out_dim == 1 else 3
    rho = random_state(out, rng)
    a = random_hermitian(m, rng)
    s = compose_with_state(phi, rho)
    direct = np.trace(rho @ apply(phi, a).entries)
    assert np.trace(s.rho @ a) == pytest.approx(direct, abs=1e-12)
    assert s.normalized


def test_compose_contractive_is_unnormalized():
    phi, _ = random_contractive_map(philox_rng(6), 3)
    assert not compose_with_state(phi, normalized_trace(3)).normalized


def test_compose_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        compose_with_state(BlockAverage(n=2), normalized_trace(3))


@pytest.mark.parametrize("kind", KINDS)
def test_unital_variants_fix_identity(kind):
    phi, m = random_unital_map(philox_rng(7), 4, kind)
    out = apply(phi, np.eye(m)).entries
    np.testing.assert_allclose(out, np.eye(out.shape[0]), atol=reconstruction_tol(out.shape[0]))


@pytest.mark.parametrize("kind", KINDS)
def test_positivity(kind):
    worst = np.inf
    for k in range(500):
        rng = philox_rng(11, k)
        n = 1 + k % 8
        phi, m = random_unital_map(rng, n, kind)
        out = apply(phi, random_psd(m, rng))
        worst = min(worst, float(eigenvalues(out)[-1]) / reconstruction_tol(out.dim))
    assert worst >= -1


@pytest.mark.parametrize("kind", KINDS)
def test_linearity(kind):
    rng = philox_rng(12)
    phi, m = random_unital_map(rng, 4, kind)
    a, b = random_hermitian(m, rng), random_hermitian(m, rng)
    mu = -1.7
    lhs = apply(phi, a + mu * b).entries
    rhs = apply(phi, a).entries + mu * apply(phi, b).entries
    np.testing.assert_allclose(lhs, rhs, atol=reconstruction_tol(m))


@pytest.mark.parametrize("kind", KINDS)
def test_spectrum_containment(kind):
    for k in range(50):
        rng = philox_rng(13, k)
        phi, m = random_unital_map(rng, 3, kind)
        a = HermitianMatrix(random_hermitian(m, rng, (-2, 1)))
        la, lo = eigenvalues(a), eigenvalues(apply(phi, a))
        tau = reconstruction_tol(m)
        assert la[-1] - tau <= lo[-1] and lo[0] <= la[0] + tau


@pytest.mark.parametrize("seed", range(5))
def test_block_expectation_is_idempotent(seed):
    from majorize.sampling import random_partition

    rng = philox_rng(seed)
    E = BlockDiagonalExpectation(tuple(map(tuple, random_partition(6, rng))))
    a = random_hermitian(6, rng)
    once = apply(E, a)
    np.testing.assert_allclose(apply(E, once).entries, once.entries, atol=reconstruction_tol(6))
    assert classify(E).unital


def test_block_expectation_rejects_non_partition():
    with pytest.raises(ValidationError):
        BlockDiagonalExpectation(((0, 1), (1, 2)))


def test_schur_rejects_indefinite_multiplier():
    with pytest.raises(NotPSD):
        SchurMultiplier(np.array([[1, 2], [2, 1]]))


def test_state_rejects_wrong_trace():
    with pytest.raises(ValidationError):
        State(np.eye(2))


def test_block_pinch_rejects_bad_alpha():
    with pytest.raises(ValidationError):
        BlockPinch(1.0)


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        apply(BlockPinch(0.5, 2), np.eye(6))
    with pytest.raises(DimensionMismatch):
        apply(BlockPinch(0.5), np.eye(3))


def test_discrete_density_weights_and_shapes():
    with pytest.raises(ValidationError):
        DiscreteDensity(((np.eye(2), -1.0),))
    with pytest.raises(DimensionMismatch):
        DiscreteDensity(((np.eye(2), 1.0), (np.eye(3), 1.0)))


def test_centralizer_defect_for_states_and_blocks():
    x = np.diag([1.0, 1.0, 3.0])
    assert centralizer_defect(normalized_trace(3), x) == 0
    assert centralizer_defect(BlockDiagonalExpectation(((0, 1), (2,))), x) == 0
    assert centralizer_defect(diagonal_pinching(3), x) == 0
    assert centralizer_defect(diagonal_pinching(3), x + np.eye(3)[::-1]) > 0
    assert centralizer_defect(BlockDiagonalExpectation(((0, 1), (2,))), np.diag([1.0, 2.0, 3.0])) > 0
    with pytest.raises(ValidationError):
        centralizer_defect(BlockAverage(), x)
