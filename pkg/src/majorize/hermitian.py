"""Hermitian matrices, eigendecomposition and functional calculus.

Eigenvalues are always reported in non-increasing order. Joint spectra of
commuting tuples are reported in ascending lexicographic order of the
points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import (
    DegeneracyUnresolved,
    DimensionMismatch,
    NotCommuting,
    NotHermitian,
    NotSquare,
    SpectrumOutsideDomain,
)

if TYPE_CHECKING:
    from .convexity import ScalarFunction

DOMAIN_TOL = 1e-9
JOINT_EIG_RETRIES = 5


def hermiticity_tol(raw: np.ndarray) -> float:
    return 1e-10 * (1.0 + float(np.max(np.abs(raw), initial=0.0)))


def reconstruction_tol(dim: int) -> float:
    return 1e-9 * dim


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """A validated, exactly symmetrized Hermitian matrix.

    Build instances with :func:`make_hermitian` (or :func:`as_hermitian`);
    the constructor itself trusts its input.
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries.copy()
        return self.entries.astype(dtype)

    def __repr__(self):
        return f"HermitianMatrix(dim={self.dim})"

    @property
    def norm(self) -> float:
        """Operator (spectral) norm."""
        return float(np.max(np.abs(np.linalg.eigvalsh(self.entries)), initial=0.0))

    def __add__(self, other):
        return HermitianMatrix(self.entries + np.asarray(other))

    def __sub__(self, other):
        return HermitianMatrix(self.entries - np.asarray(other))

    def __neg__(self):
        return HermitianMatrix(-self.entries)

    def scale(self, c: float) -> HermitianMatrix:
        return HermitianMatrix(float(c) * self.entries)


def make_hermitian(raw, tol: float | None = None) -> HermitianMatrix:
    """Validate ``raw`` as Hermitian and return its symmetrization.

    Parameters
    ----------
    raw : array_like of shape (n, n)
    tol : float, optional
        Largest allowed entry of ``|raw - raw*|``. Defaults to
        ``1e-10 * (1 + max|entry|)``.
    """
    raw = np.asarray(raw, dtype=complex)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1] or raw.shape[0] < 1:
        raise NotSquare(f"expected a non-empty square matrix, got shape {raw.shape}")
    if tol is None:
        tol = hermiticity_tol(raw)
    deviation = float(np.max(np.abs(raw - raw.conj().T)))
    if deviation > tol:
        raise NotHermitian(deviation, tol)
    return HermitianMatrix((raw + raw.conj().T) / 2)


def as_hermitian(x) -> HermitianMatrix:
    if isinstance(x, HermitianMatrix):
        return x
    return make_hermitian(x)


def identity(n: int) -> HermitianMatrix:
    return HermitianMatrix(np.eye(n))


def diag(*values: float) -> HermitianMatrix:
    return HermitianMatrix(np.diag(np.asarray(values, dtype=float)))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eigh(A) -> SpectralDecomposition:
    """Eigendecomposition with eigenvalues in non-increasing order."""
    A = as_hermitian(A)
    w, v = np.linalg.eigh(A.entries)
    return SpectralDecomposition(w[::-1].copy(), v[:, ::-1].copy())


def eigenvalues(A) -> np.ndarray:
    """Non-increasing eigenvalues of a Hermitian matrix."""
    return np.linalg.eigvalsh(np.asarray(as_hermitian(A).entries))[::-1]


def _rebuild(v: np.ndarray, values: np.ndarray) -> HermitianMatrix:
    out = (v * values) @ v.conj().T
    return HermitianMatrix((out + out.conj().T) / 2)


def check_in_interval(values: np.ndarray, interval: tuple[float, float], tol: float = DOMAIN_TOL):
    lo, hi = interval
    for x in np.ravel(values):
        if x < lo - tol or x > hi + tol:
            raise SpectrumOutsideDomain(float(x), (lo, hi))


def func_calc(f: ScalarFunction, A) -> HermitianMatrix:
    """Apply a scalar function to a Hermitian matrix through its eigenbasis."""
    if f.arity != 1:
        raise DimensionMismatch(f"func_calc needs a one-variable function, got arity {f.arity}")
    sd = eigh(A)
    interval = f.domain[0]
    check_in_interval(sd.eigenvalues, interval)
    # values within DOMAIN_TOL outside the interval are evaluated at the end point
    lam = np.clip(sd.eigenvalues, *interval)
    return _rebuild(sd.eigenvectors, np.asarray(f(lam), dtype=float))


def commutator_norm(A, B) -> float:
    a = np.asarray(A)
    b = np.asarray(B)
    return float(np.linalg.norm(a @ b - b @ a, 2))


@dataclass(frozen=True, eq=False)
class CommutingTuple:
    matrices: tuple[HermitianMatrix, ...]
    commutator_norm: float

    @property
    def dim(self) -> int:
        return self.matrices[0].dim

    def __len__(self):
        return len(self.matrices)


def make_commuting_tuple(ms: Sequence, tol: float | None = None) -> CommutingTuple:
    ms = tuple(as_hermitian(m) for m in ms)
    if not ms:
        raise DimensionMismatch("a commuting tuple needs at least one matrix")
    dims = {m.dim for m in ms}
    if len(dims) != 1:
        raise DimensionMismatch(f"matrices have differing dimensions {sorted(dims)}")
    if tol is None:
        tol = 1e-10 * (1.0 + max(float(np.max(np.abs(m.entries))) for m in ms))
    worst, worst_pair = 0.0, (0, 0)
    for i in range(len(ms)):
        for j in range(i + 1, len(ms)):
            c = commutator_norm(ms[i], ms[j])
            if c > worst:
                worst, worst_pair = c, (i, j)
    if worst > tol:
        raise NotCommuting(worst_pair, worst, tol)
    return CommutingTuple(ms, worst)


@dataclass(frozen=True, eq=False)
class JointDecomposition:
    basis: np.ndarray
    points: np.ndarray  # shape (dim, n); row k holds the joint eigenvalues on column k


def _clusters(w: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group sorted eigenvalues whose consecutive gaps are at most ``tol``."""
    groups, start = [], 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[k - 1] > tol:
            groups.append(np.arange(start, k))
            start = k
    return groups


def _is_scalar_block(q: np.ndarray, mats: Sequence[np.ndarray], tol: float) -> bool:
    for a in mats:
        p = q.conj().T @ a @ q
        mu = np.trace(p).real / p.shape[0]
        if np.linalg.norm(p - mu * np.eye(p.shape[0]), 2) > tol:
            return False
    return True


def _refine(q: np.ndarray, mats: Sequence[np.ndarray], tol: float) -> np.ndarray:
    if q.shape[1] == 1:
        return q
    for a in mats:
        p = q.conj().T @ a @ q
        w, v = np.linalg.eigh((p + p.conj().T) / 2)
        groups = _clusters(w, tol)
        if len(groups) > 1:
            qv = q @ v
            return np.hstack([_refine(qv[:, g], mats, tol) for g in groups])
    return q


def joint_eig(t: CommutingTuple, seed: int = 0) -> JointDecomposition:
    """Common orthonormal eigenbasis of a commuting tuple.

    A random linear combination of the matrices is diagonalized; clusters of
    equal combination eigenvalues on which some matrix is not scalar trigger a
    retry with a new combination, and after the retries are exhausted those
    clusters are split by diagonalizing each matrix in turn.
    """
    mats = [m.entries for m in t.matrices]
    dim = t.dim
    scale = max(float(np.max(np.abs(a))) for a in mats)
    tol = 1e-8 * (1.0 + scale)

    if len(mats) == 1:
        basis = eigh(t.matrices[0]).eigenvectors
    else:
        basis = None
        for attempt in range(JOINT_EIG_RETRIES):
            rng = np.random.Generator(np.random.Philox(key=seed + attempt))
            c = rng.standard_normal(len(mats))
            combo = sum(ci * a for ci, a in zip(c, mats))
            w, v = np.linalg.eigh((combo + combo.conj().T) / 2)
            groups = _clusters(w, tol * (1.0 + np.abs(c).sum()))
            bad = [g for g in groups if len(g) > 1 and not _is_scalar_block(v[:, g], mats, tol)]
            if not bad:
                basis = v
                break
        if basis is None:
            basis = np.hstack([
                v[:, g] if len(g) == 1 or _is_scalar_block(v[:, g], mats, tol)
                else _refine(v[:, g], mats, tol)
                for g in groups
            ])

    points = np.stack(
        [np.einsum("ik,ij,jk->k", basis.conj(), a, basis).real for a in mats], axis=1
    )
    order = np.lexsort(points.T[::-1])
    basis, points = basis[:, order], points[order]

    tau = reconstruction_tol(dim)
    for i, a in enumerate(mats):
        err = float(np.max(np.abs((basis * points[:, i]) @ basis.conj().T - a)))
        if err > tau * (1.0 + scale):
            blocks = [list(map(int, g)) for g in _clusters(points[:, i], tol)]
            raise DegeneracyUnresolved(
                f"matrix {i} is not diagonal in the computed basis (error {err:.3e})", blocks
            )
    return JointDecomposition(basis, points)


def joint_func_calc(f: ScalarFunction, t: CommutingTuple, seed: int = 0) -> HermitianMatrix:
    """Evaluate a function of several variables on a commuting tuple."""
    if f.arity != len(t):
        raise DimensionMismatch(f"function of {f.arity} variables applied to {len(t)} matrices")
    jd = joint_eig(t, seed=seed)
    pts = jd.points.copy()
    for i, interval in enumerate(f.domain):
        check_in_interval(pts[:, i], interval)
        pts[:, i] = np.clip(pts[:, i], *interval)
    # one-variable functions take a flat vector, not a column
    args = pts[:, 0] if f.arity == 1 else pts
    return _rebuild(jd.basis, np.asarray(f(args), dtype=float))
