import numpy as np
import pytest

from majorize.convexity import (
    OperatorConvexMeasure,
    affine_minorants,
    builtin,
    convexity_gap,
    matrix_convexity_test,
    minorant_sup_error,
    monotonicity_check,
    operator_convex_from_measure,
    random_measure,
    restrict,
    three_point_check,
)
from majorize.errors import BadParameter, NotConvexClaim, UnknownName
from majorize.sampling import philox_rng

CONVEX_BUILTINS = [
    builtin("power", r=2),
    builtin("power", r=2, domain=(None, None)),
    builtin("power", r=4, domain=(None, None)),
    builtin("power", r=1.5),
    builtin("power", r=-1),
    builtin("abs"),
    builtin("abs", shift=0.5),
    builtin("exp"),
    builtin("relu"),
    builtin("relu", shift=-1),
    builtin("identity"),
    builtin("constant", c=2.0),
]
CONCAVE_BUILTINS = [builtin("log"), builtin("neg_xlogx"), builtin("power", r=0.5)]


def test_power_two_flags():
    f = builtin("power", r=2)
    assert f.convex and f.operator_convex and f.increasing


def test_abs_flags():
    f = builtin("abs")
    assert f.convex and not f.increasing and not f.decreasing and not f.operator_convex


def test_log_flags():
    f = builtin("log")
    assert f.concave and f.increasing and f.operator_concave and not f.convex


@pytest.mark.parametrize("f, convex, increasing, decreasing", [
    (builtin("abs", domain=(0, None)), True, True, False),
    (builtin("abs", domain=(None, 0)), True, False, True),
    (builtin("relu", domain=(None, 0)), True, True, True),
    (builtin("power", r=2, domain=(None, 0)), True, False, True),
    (builtin("power", r=4, domain=(None, None)), True, False, False),
    (builtin("power", r=3), True, True, False),
    (builtin("power", r=3, domain=(None, None)), False, True, False),
    (builtin("power", r=-1), True, False, True),
])
def test_flags_follow_domain(f, convex, increasing, decreasing):
    assert (f.convex, f.increasing, f.decreasing) == (convex, increasing, decreasing)


def test_shift_moves_function_and_domain():
    f = builtin("abs", shift=0.5, domain=(0, None))
    assert f.interval == (0, np.inf)
    assert not f.monotone
    np.testing.assert_allclose(f(np.array([0.5, 1.5])), [0, 1])
    assert f.label == "|(t-0.5)|"


def test_bad_builtins():
    with pytest.raises(UnknownName):
        builtin("sinc")
    with pytest.raises(BadParameter):
        builtin("power", r=0.5, domain=(-1, 1))
    with pytest.raises(BadParameter):
        builtin("log", domain=(-1, 1))
    with pytest.raises(BadParameter):
        builtin("power")


def test_restrict_keeps_flags():
    f = restrict(builtin("abs"), (0, 1))
    assert f.interval == (0, 1) and f.convex


@pytest.mark.parametrize("f", CONVEX_BUILTINS, ids=lambda f: f.label)
def test_three_point_convexity(f):
    assert f.convex
    assert three_point_check(f, samples=10_000) >= -1e-10


@pytest.mark.parametrize("f", CONCAVE_BUILTINS, ids=lambda f: f.label)
def test_three_point_concavity(f):
    assert f.concave
    assert three_point_check(f, samples=10_000, concave=True) >= -1e-10


@pytest.mark.parametrize("f", CONVEX_BUILTINS + CONCAVE_BUILTINS, ids=lambda f: f.label)
def test_monotone_flags_hold(f):
    if f.increasing:
        assert monotonicity_check(f) >= -1e-12
    if f.decreasing:
        assert monotonicity_check(f, decreasing=True) >= -1e-12


def test_minorants_of_square():
    s = affine_minorants(builtin("power", r=2, domain=(None, None)), (-1, 1), 3)
    lines = sorted(zip(s.slopes[:, 0], s.intercepts))
    np.testing.assert_allclose(lines, [(-2, -1), (0, 0), (2, -1)], atol=1e-8)


def test_minorants_of_affine_function():
    f = builtin("identity")
    s = affine_minorants(f, (-1, 2), 5)
    assert len(s) == 1
    assert minorant_sup_error(f, s) == pytest.approx(0, abs=1e-9)


def test_minorants_of_abs_include_both_slopes():
    s = affine_minorants(builtin("abs"), (-1, 1), 3)
    slopes = set(np.round(s.slopes[:, 0], 6))
    assert {-1.0, 1.0} <= slopes


def test_minorants_reject_nonconvex_and_bad_m():
    with pytest.raises(NotConvexClaim):
        affine_minorants(builtin("log"), (1, 2), 3)
    with pytest.raises(BadParameter):
        affine_minorants(builtin("exp"), (0, 1), 1)
    with pytest.raises(BadParameter):
        affine_minorants(builtin("power", r=2), (-1, 1), 3)


def test_square_sup_error_at_three_anchors():
    f = builtin("power", r=2, domain=(None, None))
    assert minorant_sup_error(f, affine_minorants(f, (-1, 1), 3)) == pytest.approx(0.25, abs=1e-9)


@pytest.mark.parametrize("f, K", [
    (builtin("power", r=2, domain=(None, None)), (-1, 1)),
    (builtin("exp"), (-2, 1)),
    (builtin("abs"), (-1, 2)),
    (builtin("power", r=-1), (0.5, 3)),
    (builtin("relu"), (-1, 1)),
])
def test_minorant_error_decreases_as_anchors_double(f, K):
    errs = [minorant_sup_error(f, affine_minorants(f, K, m)) for m in (3, 5, 9, 17, 33)]
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize("f", [f for f in CONVEX_BUILTINS], ids=lambda f: f.label)
def test_minorants_lie_below(f):
    lo, hi = f.interval
    K = (max(lo, -1.5), min(hi, 1.5)) if lo < 0 else (lo + 0.1, lo + 2)
    s = affine_minorants(f, K, 9)
    x = np.linspace(*K, 1000)
    assert np.all(s(x) <= f(x) + 1e-12 * (1 + np.abs(f(x))) + 1e-9)


def test_minorants_of_two_variable_max():
    f = builtin("max")
    s = affine_minorants(f, [(-1, 1), (-1, 1)], 3)
    pts = np.random.default_rng(0).uniform(-1, 1, (200, 2))
    assert np.all(s(pts) <= f(pts) + 1e-9)
    assert minorant_sup_error(f, s, grid=21) <= 1e-6


def test_square_is_matrix_convex_order_four():
    v = matrix_convexity_test(builtin("power", r=2, domain=(None, None)), 4, trials=1000)
    assert v.holds


@pytest.mark.parametrize("f", [builtin("power", r=4, domain=(None, None)), builtin("abs")], ids=["t^4", "abs"])
def test_violation_witness_reverifies(f):
    v = matrix_convexity_test(f, 2, trials=1000)
    assert not v.holds
    w = v.witness
    a, b, lam = w["a"], w["b"], w["lam"]
    # direct re-verification without the package's functional calculus
    def fc(m):
        x, u = np.linalg.eigh(m)
        return (u * f(x)) @ u.conj().T
    gap = lam * fc(a) + (1 - lam) * fc(b) - fc(lam * a + (1 - lam) * b)
    assert np.linalg.eigvalsh(gap)[0] == pytest.approx(w["margin"], abs=1e-10)
    assert np.linalg.eigvalsh(gap)[0] < -v.tol


@pytest.mark.parametrize("f", CONVEX_BUILTINS[:8], ids=lambda f: f.label)
def test_order_one_matches_scalar_convexity(f):
    assert matrix_convexity_test(f, 1, trials=300).holds == (three_point_check(f) >= -1e-10)


def test_convexity_gap_of_square_on_commuting_pair_is_scalar_gap():
    a, b = np.diag([1.0, -1.0]), np.diag([0.0, 3.0])
    gap = convexity_gap(builtin("power", r=2, domain=(None, None)), a, b, 0.5)
    np.testing.assert_allclose(sorted(gap), sorted([0.25, 4.0]), atol=1e-14)


@pytest.mark.parametrize("m, t, expected", [
    (OperatorConvexMeasure(atoms=((1.0, 1.0),)), np.array([1.0, 3.0]), [0.5, 9 / 4]),
    (OperatorConvexMeasure(gamma=1.0), np.array([1.0, 3.0]), [1.0, 9.0]),
    (OperatorConvexMeasure(alpha=1.0, beta=2.0), np.array([1.0, 3.0]), [3.0, 7.0]),
])
def test_measure_functions(m, t, expected):
    f = operator_convex_from_measure(m)
    np.testing.assert_allclose(f(t), expected)
    assert f.operator_convex and f.interval == (0, np.inf)


def test_measure_validation():
    with pytest.raises(BadParameter):
        OperatorConvexMeasure(gamma=-1)
    with pytest.raises(BadParameter):
        OperatorConvexMeasure(atoms=((-1.0, 1.0),))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_measure_functions_are_matrix_convex(n):
    rng = philox_rng(9)
    for k in range(5):
        f = operator_convex_from_measure(random_measure(rng))
        assert matrix_convexity_test(f, n, trials=1000, seed=k, tol=1e-8).holds
