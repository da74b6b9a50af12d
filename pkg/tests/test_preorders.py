import numpy as np
import pytest

from majorize.errors import DimensionMismatch, PreconditionFailed
from majorize.hermitian import HermitianMatrix, diag, eigenvalues, identity, reconstruction_tol
from majorize.preorders import (
    conjugating_unitary,
    evaluate_probe,
    loewner_leq,
    majorization_leq,
    spectral_leq,
    spectral_scale,
    spectral_scale_leq,
    trace_probe,
    weak_majorization_leq,
)
from majorize.repro import block_average_abs
from majorize.sampling import haar_unitary, philox_rng, random_hermitian

S2 = 1 / np.sqrt(2)


@pytest.fixture(scope="module")
def example_pair():
    *_, phi_f, f_phi = block_average_abs()
    return f_phi, phi_f


def _random_pair(seed, n=None):
    rng = philox_rng(seed)
    n = n or 2 + seed % 7
    return (HermitianMatrix(random_hermitian(n, rng, (-2, 2))),
            HermitianMatrix(random_hermitian(n, rng, (-1.5, 2.5))))


def test_loewner_holds_on_shifted_diagonal():
    v = loewner_leq(diag(1, 2), diag(2, 3))
    assert v.holds and v.witness is None
    np.testing.assert_allclose(v.margins, [1, 1])


def test_loewner_fails_on_incomparable_pair():
    v = loewner_leq(diag(0, 2), diag(2, 0))
    assert not v.holds
    assert v.min_margin == pytest.approx(-2)


def test_loewner_fails_on_example(example_pair):
    a, b = example_pair
    v = loewner_leq(a, b)
    # B - A = [[3/2 - 1/sqrt2, 1/2], [1/2, 1/2 - 1/sqrt2]]
    t, d = 2 - 2 * S2, (1.5 - S2) * (0.5 - S2) - 0.25
    lmin = t / 2 - np.sqrt(t * t / 4 - d)
    assert not v.holds
    assert v.min_margin == pytest.approx(lmin, abs=1e-12)


def test_spectral_leq_shifted_diagonal():
    assert spectral_leq(diag(1, 2), diag(2, 3)).holds


def test_spectral_leq_fails_on_example_at_second_index(example_pair):
    v = spectral_leq(*example_pair)
    assert not v.holds
    assert v.witness["index"] == 2
    np.testing.assert_allclose(v.margins, [1.0, -0.41421356], atol=1e-8)


def test_spectral_leq_reflexive():
    a = HermitianMatrix(random_hermitian(5, philox_rng(0)))
    v = spectral_leq(a, a)
    assert v.holds
    np.testing.assert_array_equal(v.margins, 0)


@pytest.mark.parametrize("a, b, holds, index", [
    (diag(2, 2), diag(3, 1), True, None),
    (diag(3, 1), diag(2, 2), False, 1),
])
def test_weak_majorization_hand_cases(a, b, holds, index):
    v = weak_majorization_leq(a, b)
    assert v.holds is holds
    assert (v.witness or {}).get("index") == index


def test_weak_majorization_on_example(example_pair):
    v = weak_majorization_leq(*example_pair)
    assert v.holds
    np.testing.assert_allclose(v.margins, [1.0, 0.58578644], atol=1e-8)


def test_majorization_hand_cases():
    assert majorization_leq(diag(2, 2), diag(3, 1)).holds
    assert weak_majorization_leq(diag(1, 1), diag(3, 1)).holds
    v = majorization_leq(diag(1, 1), diag(3, 1))
    assert not v.holds and v.witness["criterion"] == "trace"
    a = HermitianMatrix(random_hermitian(4, philox_rng(1)))
    assert majorization_leq(a, a).holds


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        loewner_leq(identity(2), identity(3))


@pytest.mark.parametrize("c, breaks, values", [
    (diag(2, -1), [0, 0.5, 1], [2, -1]),
    (identity(3), [0, 1 / 3, 2 / 3, 1], [1, 1, 1]),
    (diag(3, 2, 1), [0, 1 / 3, 2 / 3, 1], [3, 2, 1]),
])
def test_spectral_scale_steps(c, breaks, values):
    e = spectral_scale(c)
    np.testing.assert_allclose(e.breakpoints, breaks)
    np.testing.assert_allclose(e.values, values)
    mids = (np.asarray(breaks[:-1]) + np.asarray(breaks[1:])) / 2
    np.testing.assert_allclose(e(mids), values)


def test_spectral_scale_integral():
    e = spectral_scale(diag(2, -1))
    assert e.integral(0.25) == pytest.approx(0.5)
    assert e.integral(1.0) == pytest.approx(0.5)


def test_conjugating_unitary_swap():
    a, b = diag(1, 0), diag(0, 2)
    u = conjugating_unitary(a, b)
    np.testing.assert_allclose(np.abs(u), [[0, 1], [1, 0]], atol=1e-15)
    c = u @ a.entries @ u.conj().T
    np.testing.assert_allclose(c, np.diag([0, 1]), atol=1e-15)
    assert loewner_leq(c, b).holds


def test_conjugating_unitary_equal_diagonal():
    u = conjugating_unitary(diag(3, 1), diag(3, 1))
    np.testing.assert_allclose(np.abs(u), np.eye(2), atol=1e-15)


def test_conjugating_unitary_precondition():
    with pytest.raises(PreconditionFailed):
        conjugating_unitary(diag(1, 1), diag(1, 0.5))


def test_trace_probe_holds_for_ordered_pair():
    assert trace_probe(diag(1, 2), diag(2, 3), "monotone", trials=1000).holds


def test_trace_probe_finds_step_on_example(example_pair):
    v = trace_probe(*example_pair, "monotone", trials=1000)
    assert not v.holds
    a, b = example_pair
    f = lambda m: evaluate_probe(v.witness, eigenvalues(m)).sum() / 2
    assert f(b) - f(a) < 0


def test_trace_probe_equal_pair_has_zero_margins():
    a = HermitianMatrix(random_hermitian(4, philox_rng(2)))
    v = trace_probe(a, a, "convex_increasing", trials=200)
    assert v.holds
    np.testing.assert_array_equal(v.margins, 0)


def test_trace_probe_rejects_unknown_family():
    with pytest.raises(ValueError):
        trace_probe(diag(1, 2), diag(2, 3), "wiggly")


@pytest.mark.parametrize("family", ["monotone", "convex_increasing"])
def test_trace_probe_functions_have_family_shape(family):
    v = trace_probe(diag(3, 0), diag(0, 0), family, trials=50)
    x = np.linspace(0, 3, 301)
    y = evaluate_probe(v.witness, x)
    assert np.all(np.diff(y) >= -1e-12)
    if family == "convex_increasing":
        assert np.all(np.diff(y, 2) >= -1e-9)


def test_order_chain():
    counts = [0, 0, 0]
    for seed in range(1000):
        a, b = _random_pair(seed)
        lw, sp, wm = loewner_leq(a, b).holds, spectral_leq(a, b).holds, weak_majorization_leq(a, b).holds
        counts[0] += lw
        counts[1] += sp
        counts[2] += wm
        assert not lw or sp
        assert not sp or wm
    # the chain is exercised in both directions
    assert 0 < counts[0] < counts[1] < counts[2] < 1000


@pytest.mark.parametrize("seed", range(30))
def test_unitary_invariance(seed):
    a, b = _random_pair(seed)
    u = haar_unitary(a.dim, philox_rng(seed, 1))
    ua, ub = (HermitianMatrix(u @ m.entries @ u.conj().T) for m in (a, b))
    inflate = 10 * reconstruction_tol(a.dim)
    for check in (loewner_leq, spectral_leq, weak_majorization_leq):
        v, w = check(a, b), check(ua, ub)
        np.testing.assert_allclose(v.margins, w.margins, atol=inflate)
        if abs(v.min_margin + v.tol) > inflate:
            assert v.holds == w.holds


@pytest.mark.parametrize("seed", range(100))
def test_scale_integral_agrees_with_weak_majorization(seed):
    a, b = _random_pair(seed)
    assert spectral_scale_leq(a, b).holds == weak_majorization_leq(a, b).holds
