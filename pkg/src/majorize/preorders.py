"""Loewner order, spectral preorder and (weak) majorization on Hermitian matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DimensionMismatch, PreconditionFailed
from .hermitian import as_hermitian, eigenvalues, eigh
from .sampling import philox_rng

PROBE_BREAKPOINTS = 8


@dataclass(frozen=True, eq=False)
class PreorderVerdict:
    """Outcome of an order comparison.

    ``margins`` are per-criterion slacks; the verdict holds exactly when every
    margin is at least ``-tol``. ``witness`` identifies the first violated
    criterion and is ``None`` when the verdict holds.
    """

    holds: bool
    margins: np.ndarray
    tol: float
    witness: dict[str, Any] | None = field(default=None)

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margins)) if len(self.margins) else 0.0

    def to_dict(self) -> dict:
        from .io import to_jsonable

        return {
            "holds": bool(self.holds),
            "margins": [float(m) for m in self.margins],
            "tol": float(self.tol),
            "witness": to_jsonable(self.witness),
        }


def default_tol(A, B) -> float:
    return 1e-8 * (1.0 + as_hermitian(A).norm + as_hermitian(B).norm)


def _pair(A, B):
    A, B = as_hermitian(A), as_hermitian(B)
    if A.dim != B.dim:
        raise DimensionMismatch(f"dimensions differ: {A.dim} vs {B.dim}")
    return A, B


def _verdict(margins: np.ndarray, tol: float, criterion: str) -> PreorderVerdict:
    bad = np.flatnonzero(margins < -tol)
    if bad.size == 0:
        return PreorderVerdict(True, margins, tol)
    k = int(bad[0])
    return PreorderVerdict(
        False, margins, tol, {"criterion": criterion, "index": k + 1, "margin": float(margins[k])}
    )


def loewner_leq(A, B, tol: float | None = None) -> PreorderVerdict:
    """``A <= B`` in the usual order: ``B - A`` is positive semidefinite.

    Margins are the eigenvalues of ``B - A`` in non-increasing order, so a
    violation is reported at the last index.
    """
    A, B = _pair(A, B)
    if tol is None:
        tol = default_tol(A, B)
    margins = eigenvalues(B - A)
    v = _verdict(margins, tol, "loewner")
    if not v.holds:
        # the most negative eigenvalue is the informative one
        k = len(margins) - 1
        v.witness.update(index=k + 1, margin=float(margins[k]))
    return v


def spectral_leq(A, B, tol: float | None = None) -> PreorderVerdict:
    """Spectral preorder: ``lambda_i(A) <= lambda_i(B)`` for every ``i``."""
    A, B = _pair(A, B)
    if tol is None:
        tol = default_tol(A, B)
    return _verdict(eigenvalues(B) - eigenvalues(A), tol, "spectral")


def weak_majorization_leq(A, B, tol: float | None = None) -> PreorderVerdict:
    """Submajorization: leading partial sums of ``lambda(A)`` are dominated by those of ``B``."""
    A, B = _pair(A, B)
    if tol is None:
        tol = default_tol(A, B)
    margins = np.cumsum(eigenvalues(B)) - np.cumsum(eigenvalues(A))
    return _verdict(margins, tol, "partial_sum")


def majorization_leq(A, B, tol: float | None = None) -> PreorderVerdict:
    """Weak majorization together with equal traces.

    The trace condition ``|tr A - tr B| <= tol * dim`` is appended to the
    margins as ``-|tr A - tr B| / dim``.
    """
    A, B = _pair(A, B)
    if tol is None:
        tol = default_tol(A, B)
    weak = weak_majorization_leq(A, B, tol)
    trace_gap = abs(np.trace(A.entries).real - np.trace(B.entries).real)
    margins = np.append(weak.margins, -trace_gap / A.dim)
    if not weak.holds:
        return PreorderVerdict(False, margins, tol, weak.witness)
    if margins[-1] < -tol:
        return PreorderVerdict(
            False, margins, tol, {"criterion": "trace", "index": A.dim + 1, "margin": float(margins[-1])}
        )
    return PreorderVerdict(True, margins, tol)


@dataclass(frozen=True, eq=False)
class SpectralScale:
    """Non-increasing step function ``e_C(t) = lambda_k(C)`` on ``[(k-1)/n, k/n)``."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        n = len(self.values)
        k = np.clip(np.floor(t * n).astype(int), 0, n - 1)
        return self.values[k]

    def integral(self, alpha: float) -> float:
        """``int_0^alpha e_C(t) dt`` for ``alpha`` in ``[0, 1]``."""
        n = len(self.values)
        alpha = min(max(float(alpha), 0.0), 1.0)
        k = min(int(np.floor(alpha * n)), n)
        total = self.values[:k].sum() / n
        if k < n:
            total += (alpha - k / n) * self.values[k]
        return float(total)


def spectral_scale(C) -> SpectralScale:
    C = as_hermitian(C)
    n = C.dim
    return SpectralScale(np.linspace(0.0, 1.0, n + 1), eigenvalues(C))


def spectral_scale_leq(A, B, tol: float | None = None) -> PreorderVerdict:
    """Compare integrals of the spectral scales at every breakpoint.

    Margins are in units of the normalized trace, hence a factor ``1/n``
    relative to :func:`weak_majorization_leq`.
    """
    A, B = _pair(A, B)
    if tol is None:
        tol = default_tol(A, B)
    ea, eb = spectral_scale(A), spectral_scale(B)
    margins = np.array([eb.integral(t) - ea.integral(t) for t in ea.breakpoints[1:]])
    return _verdict(margins, tol / A.dim, "scale_integral")


def conjugating_unitary(A, B, tol: float | None = None) -> np.ndarray:
    """Unitary ``U`` with ``U A U* <= B`` and ``[U A U*, B] = 0``.

    Sends the i-th eigenvector of ``A`` to the i-th eigenvector of ``B``,
    both taken in non-increasing eigenvalue order. Requires
    ``spectral_leq(A, B)``.
    """
    A, B = _pair(A, B)
    verdict = spectral_leq(A, B, tol)
    if not verdict.holds:
        raise PreconditionFailed(f"spectral preorder fails: {verdict.witness}")
    va = eigh(A).eigenvectors
    vb = eigh(B).eigenvectors
    return vb @ va.conj().T


def _sample_piecewise_linear(rng, trials: int, lo: float, hi: float, anchors: np.ndarray, family: str):
    """Knots ``(trials, PROBE_BREAKPOINTS + 2)`` and slopes ``(trials, PROBE_BREAKPOINTS + 1)``.

    Interior knots are drawn half uniformly from ``[lo, hi]`` and half from
    ``anchors``; slopes are sparse exponentials (each piece is switched on with
    a per-sample probability), so single ramps and hinges occur often.
    """
    k = PROBE_BREAKPOINTS
    uniform = rng.uniform(lo, hi, size=(trials, k))
    snapped = anchors[rng.integers(0, len(anchors), size=(trials, k))]
    inner = np.where(rng.random((trials, k)) < 0.5, uniform, snapped)
    knots = np.concatenate(
        [np.full((trials, 1), lo), np.sort(inner, axis=1), np.full((trials, 1), hi)], axis=1
    )
    on = rng.random((trials, k + 1)) < rng.random((trials, 1))
    steps = rng.exponential(size=(trials, k + 1)) * on
    if family == "monotone":
        slopes = steps
    elif family == "convex_increasing":
        slopes = np.cumsum(steps, axis=1)
    else:
        raise ValueError(f"unknown probe family {family!r}")
    return knots, slopes


def _eval_piecewise_linear(knots, slopes, x):
    widths = np.diff(knots, axis=1)  # (T, k+1)
    offs = x[None, None, :] - knots[:, :-1, None]  # (T, k+1, n)
    return np.einsum("tp,tpn->tn", slopes, np.clip(offs, 0.0, widths[:, :, None]))


def trace_probe(A, B, family: str = "monotone", trials: int = 1000, seed: int = 0,
                tol: float | None = None) -> PreorderVerdict:
    """Search for a function ``f`` of ``family`` with ``tr f(A) > tr f(B)``.

    Samples random piecewise-linear functions on the hull of both spectra and
    compares normalized traces. Each function is scaled to total rise 1 on
    that interval, so margins are comparable across samples. ``family`` is
    ``"monotone"`` (non-decreasing) or ``"convex_increasing"``.

    A sample counts as a violation when its margin is below
    ``-tol * (1 + L)``, ``L`` being its largest normalized slope: eigenvalue
    ties within ``tol`` cannot be separated by a steep ramp.
    """
    A, B = _pair(A, B)
    if tol is None:
        tol = default_tol(A, B)
    la, lb = eigenvalues(A), eigenvalues(B)
    pooled = np.concatenate([la, lb])
    lo, hi = float(pooled.min()), float(pooled.max())
    if hi - lo <= 0:
        return PreorderVerdict(True, np.zeros(trials), tol)
    rng = philox_rng(seed)
    knots, slopes = _sample_piecewise_linear(rng, trials, lo, hi, pooled, family)
    rise = np.einsum("tp,tp->t", slopes, np.diff(knots, axis=1))
    rise[rise == 0] = 1.0
    n = A.dim
    fa = _eval_piecewise_linear(knots, slopes, la).sum(axis=1) / n
    fb = _eval_piecewise_linear(knots, slopes, lb).sum(axis=1) / n
    margins = (fb - fa) / rise
    lipschitz = slopes.max(axis=1) / rise
    bad = np.flatnonzero(margins < -tol * (1.0 + lipschitz))
    if bad.size == 0:
        return PreorderVerdict(True, margins, tol)
    k = int(bad[np.argmin(margins[bad])])
    return PreorderVerdict(False, margins, tol, {
        "criterion": f"trace_{family}",
        "index": k + 1,
        "margin": float(margins[k]),
        "knots": knots[k].tolist(),
        "slopes": (slopes[k] / rise[k]).tolist(),
    })


def evaluate_probe(witness: dict, x) -> np.ndarray:
    """Evaluate the piecewise-linear function recorded in a probe witness."""
    knots = np.asarray(witness["knots"])[None, :]
    slopes = np.asarray(witness["slopes"])[None, :]
    return _eval_piecewise_linear(knots, slopes, np.asarray(x, dtype=float))[0]
