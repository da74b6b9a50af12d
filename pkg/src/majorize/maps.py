"""Concrete positive maps between matrix algebras.

Each map family is a frozen dataclass with an ``_apply`` on raw arrays and a
``_dual`` giving the density ``sigma`` with ``tr(rho phi(A)) = tr(sigma A)``.
Use the module functions :func:`apply`, :func:`classify` and
:func:`compose_with_state`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionMismatch, NotPSD, ValidationError
from .hermitian import HermitianMatrix, as_hermitian, reconstruction_tol


def _complex(x) -> np.ndarray:
    arr = np.array(x, dtype=complex)
    arr.setflags(write=False)
    return arr


def _check_psd(m: np.ndarray, what: str):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{what} must be square, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > 1e-10 * (1 + np.max(np.abs(m))):
        raise NotPSD(f"{what} is not Hermitian")
    lmin = np.linalg.eigvalsh((m + m.conj().T) / 2)[0]
    if lmin < -reconstruction_tol(m.shape[0]):
        raise NotPSD(f"{what} has eigenvalue {lmin:.3e} < 0")


@dataclass(frozen=True, eq=False)
class ChoiKraus:
    """``A -> sum_i W_i* A W_i`` for ``W_i`` of shape ``(m, n)``; maps ``M_m`` to ``M_n``."""

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ks = tuple(_complex(w) for w in self.kraus)
        if not ks:
            raise ValidationError("at least one Kraus operator is required")
        shapes = {w.shape for w in ks}
        if len(shapes) != 1 or ks[0].ndim != 2:
            raise DimensionMismatch(f"Kraus operators have shapes {sorted(shapes)}")
        object.__setattr__(self, "kraus", ks)

    kind = "choi_kraus"

    @property
    def in_dim(self):
        return self.kraus[0].shape[0]

    @property
    def out_dim(self):
        return self.kraus[0].shape[1]

    def _apply(self, a):
        return sum(w.conj().T @ a @ w for w in self.kraus)

    def _dual(self, rho):
        return sum(w @ rho @ w.conj().T for w in self.kraus)


@dataclass(frozen=True, eq=False)
class SchurMultiplier:
    """Entrywise product ``A -> A o B`` with ``B`` positive semidefinite."""

    B: np.ndarray

    def __post_init__(self):
        b = _complex(self.B)
        _check_psd(b, "Schur multiplier")
        object.__setattr__(self, "B", b)

    kind = "schur"

    @property
    def in_dim(self):
        return self.B.shape[0]

    out_dim = in_dim

    def _apply(self, a):
        return a * self.B

    def _dual(self, rho):
        return rho * self.B.T


@dataclass(frozen=True, eq=False)
class BlockPinch:
    """``[[A11, A12], [A21, A22]] -> alpha A11 + (1 - alpha) A22``.

    ``n`` (the block size) is optional; without it the map accepts any even
    dimension.
    """

    alpha: float
    n: int | None = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValidationError(f"alpha must lie in (0, 1), got {self.alpha}")

    kind = "block_pinch"

    @property
    def in_dim(self):
        return None if self.n is None else 2 * self.n

    @property
    def out_dim(self):
        return self.n

    def _weights(self):
        return self.alpha, 1 - self.alpha

    def _apply(self, a):
        h = a.shape[0] // 2
        w1, w2 = self._weights()
        return w1 * a[:h, :h] + w2 * a[h:, h:]

    def _dual(self, rho):
        w1, w2 = self._weights()
        z = np.zeros_like(rho)
        return np.block([[w1 * rho, z], [z, w2 * rho]])


@dataclass(frozen=True, eq=False)
class BlockAverage(BlockPinch):
    """``(A11 + A22) / 2``."""

    alpha: float = 0.5
    n: int | None = None

    kind = "block_average"

    def _weights(self):
        return 0.5, 0.5


@dataclass(frozen=True, eq=False)
class State:
    """``A -> [tr(rho A)]`` as a 1x1 matrix.

    ``normalized=False`` skips the trace-one check; used for compositions
    with contractive maps.
    """

    rho: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        r = _complex(self.rho)
        _check_psd(r, "density")
        if self.normalized and abs(np.trace(r).real - 1) > reconstruction_tol(r.shape[0]):
            raise ValidationError(f"density has trace {np.trace(r).real} != 1")
        object.__setattr__(self, "rho", r)

    kind = "state"

    @property
    def in_dim(self):
        return self.rho.shape[0]

    out_dim = 1

    def _apply(self, a):
        return np.array([[np.trace(self.rho @ a)]])

    def _dual(self, rho):
        return rho[0, 0] * self.rho


def normalized_trace(n: int) -> State:
    return State(np.eye(n) / n)


@dataclass(frozen=True, eq=False)
class BlockDiagonalExpectation:
    """Pinching onto block-diagonal matrices: off-block entries are zeroed."""

    partition: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        part = tuple(tuple(int(i) for i in block) for block in self.partition)
        flat = sorted(i for block in part for i in block)
        if flat != list(range(len(flat))) or any(not b for b in part):
            raise ValidationError(f"{self.partition!r} is not a partition of range(n)")
        object.__setattr__(self, "partition", part)

    kind = "block_expectation"

    @property
    def in_dim(self):
        return sum(len(b) for b in self.partition)

    out_dim = in_dim

    def mask(self) -> np.ndarray:
        n = self.in_dim
        m = np.zeros((n, n), dtype=bool)
        for block in self.partition:
            m[np.ix_(block, block)] = True
        return m

    def _apply(self, a):
        return np.where(self.mask(), a, 0)

    def _dual(self, rho):
        return self._apply(rho)


def diagonal_pinching(n: int) -> BlockDiagonalExpectation:
    return BlockDiagonalExpectation(tuple((i,) for i in range(n)))


@dataclass(frozen=True, eq=False)
class DiscreteDensity:
    """``A -> sum_k w_k d_k* A d_k`` for atoms ``(d_k, w_k)``, ``d_k`` of shape ``(m, n)``."""

    atoms: tuple[tuple[np.ndarray, float], ...]

    def __post_init__(self):
        atoms = tuple((_complex(d), float(w)) for d, w in self.atoms)
        if not atoms:
            raise ValidationError("a density needs at least one atom")
        if len({d.shape for d, _ in atoms}) != 1:
            raise DimensionMismatch("density atoms have differing shapes")
        if any(w <= 0 for _, w in atoms):
            raise ValidationError("density weights must be positive")
        object.__setattr__(self, "atoms", atoms)

    kind = "discrete_density"

    @property
    def in_dim(self):
        return self.atoms[0][0].shape[0]

    @property
    def out_dim(self):
        return self.atoms[0][0].shape[1]

    def _apply(self, a):
        return sum(w * d.conj().T @ a @ d for d, w in self.atoms)

    def _dual(self, rho):
        return sum(w * d @ rho @ d.conj().T for d, w in self.atoms)


PositiveMapSpec = Union[
    ChoiKraus, SchurMultiplier, BlockPinch, BlockAverage, State, BlockDiagonalExpectation, DiscreteDensity
]


def input_dim(phi: PositiveMapSpec, default_out: int | None = None) -> int:
    if phi.in_dim is not None:
        return phi.in_dim
    return 2 * (default_out or 1)


def _check_input(phi: PositiveMapSpec, a: np.ndarray):
    n = a.shape[0]
    if phi.in_dim is None:
        if n % 2:
            raise DimensionMismatch(f"{phi.kind} needs an even dimension, got {n}")
    elif phi.in_dim != n:
        raise DimensionMismatch(f"{phi.kind} acts on dimension {phi.in_dim}, got {n}")


def apply(phi: PositiveMapSpec, A) -> HermitianMatrix:
    """Image of a Hermitian matrix under ``phi``."""
    a = as_hermitian(A).entries
    _check_input(phi, a)
    out = np.asarray(phi._apply(a), dtype=complex)
    return HermitianMatrix((out + out.conj().T) / 2)


@dataclass(frozen=True)
class MapClassification:
    unital: bool
    contractive: bool
    unit_defect: float
    contraction_margin: float


def classify(phi: PositiveMapSpec, n: int | None = None) -> MapClassification:
    """Unitality and contractivity from ``phi(I)``.

    ``n`` fixes the block size of block maps that were built without one.
    """
    dim = input_dim(phi, n)
    image = apply(phi, np.eye(dim)).entries
    tau = reconstruction_tol(image.shape[0])
    defect = float(np.linalg.norm(image - np.eye(image.shape[0]), 2))
    margin = float(np.linalg.eigvalsh(image)[-1] - 1)
    return MapClassification(defect <= tau, margin <= tau, defect, margin)


def compose_with_state(phi: PositiveMapSpec, rho) -> State:
    """The functional ``A -> tr(rho phi(A))`` as a :class:`State`.

    ``rho`` is either a :class:`State` or a density matrix on the output space
    of ``phi``. The result is normalized exactly when ``phi`` is unital.
    """
    r = rho.rho if isinstance(rho, State) else _complex(rho)
    out = phi.out_dim if phi.out_dim is not None else r.shape[0]
    if r.shape != (out, out):
        raise DimensionMismatch(f"{phi.kind} outputs dimension {out}, state has shape {r.shape}")
    sigma = np.asarray(phi._dual(r), dtype=complex)
    sigma = (sigma + sigma.conj().T) / 2
    unital = abs(np.trace(sigma).real - 1) <= reconstruction_tol(sigma.shape[0])
    return State(sigma, normalized=unital)


def centralizer_defect(E, X) -> float:
    """How far ``X`` is from the centralizer of a block expectation or state.

    For a block expectation this is the largest commutator norm of ``X`` with
    a matrix unit supported on the block pattern; for a state with density
    ``rho`` it is ``||[rho, X]||``.
    """
    x = as_hermitian(X).entries
    if isinstance(E, State):
        r = E.rho
        return float(np.linalg.norm(r @ x - x @ r, 2))
    if isinstance(E, BlockDiagonalExpectation):
        if E.in_dim != x.shape[0]:
            raise DimensionMismatch(f"expectation acts on {E.in_dim}, got {x.shape[0]}")
        worst = 0.0
        for block in E.partition:
            for i in block:
                for j in block:
                    # [X, e_ij] = X[:, i] e_j^T - e_i X[j, :]
                    c = np.zeros_like(x)
                    c[:, j] += x[:, i]
                    c[i, :] -= x[j, :]
                    worst = max(worst, float(np.linalg.norm(c, 2)))
        return worst
    raise ValidationError(f"{type(E).__name__} is not a supported conditional expectation")
