"""Numerical verification of Jensen-type inequalities for positive maps on matrices."""

from .convexity import (
    AffineMinorantSet,
    OperatorConvexMeasure,
    ScalarFunction,
    affine_minorants,
    builtin,
    from_callable,
    matrix_convexity_test,
    minorant_sup_error,
    operator_convex_from_measure,
)
from .hermitian import (
    CommutingTuple,
    HermitianMatrix,
    JointDecomposition,
    SpectralDecomposition,
    eigh,
    func_calc,
    joint_eig,
    joint_func_calc,
    make_commuting_tuple,
    make_hermitian,
)
from .inequalities import (
    InequalityReport,
    holder,
    information_inequality,
    jensen_commuting,
    jensen_conditional,
    jensen_loewner,
    jensen_majorization,
    jensen_multivar,
    jensen_spectral,
    jensen_state,
    liapunov,
)
from .maps import (
    BlockAverage,
    BlockDiagonalExpectation,
    BlockPinch,
    ChoiKraus,
    DiscreteDensity,
    SchurMultiplier,
    State,
    apply,
    classify,
    compose_with_state,
)
from .preorders import (
    PreorderVerdict,
    conjugating_unitary,
    loewner_leq,
    majorization_leq,
    spectral_leq,
    spectral_scale,
    trace_probe,
    weak_majorization_leq,
)

__version__ = "0.1.0"
