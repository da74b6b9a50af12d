"""Seeded random matrices and maps.

All randomness flows through :func:`philox_rng`, a counter-based Philox4x64
stream keyed by ``(seed, index)``, so trial ``index`` of a campaign can be
regenerated on its own.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BadDomain

# finite stand-in for an infinite end of a domain when sampling spectra
UNBOUNDED_SPAN = 3.0
SHRINK = 0.05


def philox_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Generator keyed by a 64-bit seed and a 64-bit stream index."""
    if not (0 <= seed < 2**64 and 0 <= index < 2**64):
        raise ValueError("seed and index must be unsigned 64-bit integers")
    return np.random.Generator(np.random.Philox(key=seed + (index << 64)))


def sampling_window(interval: tuple[float, float]) -> tuple[float, float]:
    """Closed interval used to draw eigenvalues for a function domain.

    Infinite ends are replaced by a span of ``UNBOUNDED_SPAN`` and the result
    is shrunk by 5% of its width at both ends.
    """
    lo, hi = interval
    if math.isinf(lo) and math.isinf(hi):
        lo, hi = -UNBOUNDED_SPAN, UNBOUNDED_SPAN
    elif math.isinf(hi):
        hi = lo + UNBOUNDED_SPAN
    elif math.isinf(lo):
        lo = hi - UNBOUNDED_SPAN
    width = hi - lo
    if not width > 0:
        raise BadDomain(f"cannot sample spectra inside {interval!r}")
    return lo + SHRINK * width, hi - SHRINK * width


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator, interval=(-1.0, 1.0)) -> np.ndarray:
    """``U diag(x) U*`` with ``x`` uniform on ``interval`` and ``U`` Haar."""
    lo, hi = interval
    x = rng.uniform(lo, hi, size=n)
    u = haar_unitary(n, rng)
    out = (u * x) @ u.conj().T
    return (out + out.conj().T) / 2


def random_hermitian_in_domain(n: int, rng: np.random.Generator, domain) -> np.ndarray:
    return random_hermitian(n, rng, sampling_window(domain))


def random_psd(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    p = scale * (g @ g.conj().T) / n
    return (p + p.conj().T) / 2


def inv_sqrtm_pd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v / np.sqrt(w)) @ v.conj().T


def random_unital_kraus(m: int, n: int, r: int, rng: np.random.Generator) -> list[np.ndarray]:
    """``r`` matrices of shape ``(m, n)`` with ``sum W_i* W_i = I_n``."""
    gs = [rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)) for _ in range(r)]
    s = inv_sqrtm_pd(sum(g.conj().T @ g for g in gs))
    return [g @ s for g in gs]


def random_correlation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random PSD matrix with unit diagonal (a unital Schur multiplier)."""
    p = random_psd(n, rng) + 1e-3 * np.eye(n)
    d = 1 / np.sqrt(np.diag(p).real)
    c = p * np.outer(d, d)
    c = (c + c.conj().T) / 2
    np.fill_diagonal(c, 1.0)
    return c


def random_partition(n: int, rng: np.random.Generator) -> list[list[int]]:
    """Random partition of ``range(n)`` into contiguous blocks."""
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, n), size=rng.integers(0, n), replace=False)) if n > 1 else []
    edges = [0, *cuts, n]
    return [list(range(edges[k], edges[k + 1])) for k in range(len(edges) - 1)]


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    p = random_psd(n, rng)
    return p / np.trace(p).real
