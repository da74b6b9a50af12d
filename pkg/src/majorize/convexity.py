"""Scalar functions with convexity metadata, affine minorants and matrix convexity tests."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np

from .errors import BadParameter, DimensionMismatch, NotConvexClaim, UnknownName
from .hermitian import HermitianMatrix, func_calc
from .preorders import PreorderVerdict
from .sampling import haar_unitary, philox_rng, sampling_window

INF = math.inf


@dataclass(frozen=True, eq=False)
class ScalarFunction:
    """A real function on an interval (or a box) plus claimed shape properties.

    ``eval`` is vectorized: for one variable it maps an array elementwise, for
    ``n`` variables it maps an array of shape ``(k, n)`` to shape ``(k,)``.
    ``domain`` holds one ``(lo, hi)`` pair per variable; ends may be infinite.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    domain: tuple[tuple[float, float], ...] = ((-INF, INF),)
    label: str = ""
    convex: bool = False
    concave: bool = False
    increasing: bool = False
    decreasing: bool = False
    operator_convex: bool = False
    operator_concave: bool = False
    spec: dict[str, Any] | None = field(default=None, repr=False)

    @property
    def arity(self) -> int:
        return len(self.domain)

    @property
    def interval(self) -> tuple[float, float]:
        if self.arity != 1:
            raise DimensionMismatch("interval is only defined for functions of one variable")
        return self.domain[0]

    @property
    def monotone(self) -> bool:
        return self.increasing or self.decreasing

    def contains(self, x: float) -> bool:
        lo, hi = self.interval
        return lo <= x <= hi

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))


def _interval(domain) -> tuple[float, float]:
    lo, hi = domain
    lo = -INF if lo is None else float(lo)
    hi = INF if hi is None else float(hi)
    if not lo < hi:
        raise BadParameter(f"empty domain {domain!r}")
    return lo, hi


def _affine_flags():
    return dict(convex=True, concave=True, increasing=True, operator_convex=True, operator_concave=True)


def _turning_flags(lo: float, hi: float, tp: float, left: dict, right: dict, neither: dict) -> dict:
    if hi <= tp:
        return left
    if lo >= tp:
        return right
    return neither


def _power_flags(r: float, lo: float, hi: float) -> dict:
    integer = float(r).is_integer()
    if lo < 0 and not (integer and r >= 0):
        raise BadParameter(f"power({r}) needs a domain inside [0, inf), got ({lo}, {hi})")
    if r == 0:
        return _affine_flags() | dict(decreasing=True)
    if r == 1:
        return _affine_flags()
    if lo >= 0:
        return dict(
            convex=r >= 1 or r < 0,
            concave=0 < r < 1,
            increasing=r > 0,
            decreasing=r < 0,
            operator_convex=(-1 <= r <= 0) or (1 <= r <= 2),
            operator_concave=0 <= r <= 1,
        )
    if int(r) % 2 == 0:
        return dict(
            convex=True,
            decreasing=hi <= 0,
            operator_convex=r == 2,
        )
    # odd powers on a domain reaching below zero
    return dict(concave=hi <= 0, increasing=True)


def _is_whole(r) -> bool:
    try:
        return float(r) >= 0 and float(r).is_integer()
    except (TypeError, ValueError):
        return False


def builtin(name: str, **params) -> ScalarFunction:
    """Named scalar function with flags set from known results.

    One-variable names: ``power`` (``r``), ``log``, ``neg_xlogx``, ``abs``,
    ``exp``, ``relu``, ``identity``, ``constant`` (``c``). All accept
    ``shift`` (the function becomes ``t -> base(t - shift)``) and ``domain``,
    a ``(lo, hi)`` pair in ``t``; ``None`` ends are infinite.

    Several-variable names: ``sum``, ``max``, ``sqnorm`` (``n``, default 2)
    with an optional ``box``.
    """
    spec = {"name": name, "params": {k: v for k, v in params.items()}}
    if name in ("sum", "max", "sqnorm"):
        n = int(params.get("n", 2))
        box = params.get("box") or [(-INF, INF)] * n
        box = tuple(_interval(b) for b in box)
        if len(box) != n:
            raise BadParameter(f"box has {len(box)} intervals for {n} variables")
        fn = {
            "sum": lambda x: np.sum(x, axis=1),
            "max": lambda x: np.max(x, axis=1),
            "sqnorm": lambda x: np.sum(x * x, axis=1),
        }[name]
        return ScalarFunction(fn, box, label=f"{name}{n}", convex=True, spec=spec)

    shift = float(params.get("shift", 0.0))
    natural = {
        "power": (0.0, INF),
        "log": (0.0, INF),
        "neg_xlogx": (0.0, INF),
    }.get(name, (-INF, INF))
    if "domain" in params and params["domain"] is not None:
        lo, hi = _interval(params["domain"])
        lo, hi = lo - shift, hi - shift
    else:
        lo, hi = natural
    # whole powers extend to the real line only on request
    if name == "power" and _is_whole(params.get("r")):
        natural = (-INF, INF)
    if lo < natural[0] or hi > natural[1]:
        raise BadParameter(f"{name} is not defined on ({lo}, {hi})")

    if name == "power":
        if "r" not in params:
            raise BadParameter("power needs an exponent r")
        r = float(params["r"])
        flags = _power_flags(r, lo, hi)
        base = lambda x, r=r: np.power(x, r)
        label = f"t^{params['r']}"
    elif name == "log":
        flags = dict(concave=True, increasing=True, operator_concave=True)
        base = np.log
        label = "log"
    elif name == "neg_xlogx":
        tp = math.exp(-1)
        flags = dict(concave=True, operator_concave=True) | _turning_flags(
            lo, hi, tp, dict(increasing=True), dict(decreasing=True), {}
        )
        base = lambda x: -x * np.log(x)
        label = "-t log t"
    elif name == "abs":
        flags = _turning_flags(lo, hi, 0.0, dict(convex=True, concave=True, decreasing=True,
                                                  operator_convex=True, operator_concave=True),
                               _affine_flags(), dict(convex=True))
        base = np.abs
        label = "|t|"
    elif name == "exp":
        flags = dict(convex=True, increasing=True)
        base = np.exp
        label = "exp"
    elif name == "relu":
        flags = _turning_flags(lo, hi, 0.0, _affine_flags() | dict(decreasing=True),
                               _affine_flags(), dict(convex=True, increasing=True))
        base = lambda x: np.maximum(x, 0.0)
        label = "relu"
    elif name == "identity":
        flags = _affine_flags()
        base = lambda x: x.copy()
        label = "t"
    elif name == "constant":
        c = float(params.get("c", 0.0))
        flags = _affine_flags() | dict(decreasing=True)
        base = lambda x, c=c: np.full_like(x, c)
        label = f"const({c})"
    else:
        raise UnknownName(f"unknown function {name!r}")

    if shift:
        fn = lambda x, base=base, s=shift: base(x - s)
        shifted = f"(t-{shift:g})"
        label = re.sub(r"\bt\b", shifted, label) if re.search(r"\bt\b", label) else f"{label}{shifted}"
    else:
        fn = base
    return ScalarFunction(fn, ((lo + shift, hi + shift),), label=label, spec=spec, **flags)


def from_callable(fn: Callable, domain=(-INF, INF), label: str = "", **flags) -> ScalarFunction:
    """Wrap a vectorized one-variable callable."""
    return ScalarFunction(fn, (_interval(domain),), label=label or getattr(fn, "__name__", "f"), **flags)


def restrict(f: ScalarFunction, *domain: tuple[float, float]) -> ScalarFunction:
    """The same function on a smaller domain (flags are kept)."""
    return replace(f, domain=tuple(_interval(d) for d in domain))


@dataclass(frozen=True, eq=False)
class OperatorConvexMeasure:
    """Data of ``alpha + beta t + gamma t^2 + sum_k mass_k * lam_k t^2 / (1 + lam_k t)``."""

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    atoms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.gamma < 0:
            raise BadParameter("gamma must be non-negative")
        atoms = tuple((float(lam), float(mass)) for lam, mass in self.atoms)
        for lam, mass in atoms:
            if lam < 0 or mass <= 0:
                raise BadParameter(f"atom ({lam}, {mass}) needs lam >= 0 and mass > 0")
        object.__setattr__(self, "atoms", atoms)


def operator_convex_from_measure(m: OperatorConvexMeasure) -> ScalarFunction:
    """Operator convex function on ``(0, inf)`` from its integral representation."""

    def fn(t):
        out = m.alpha + m.beta * t + m.gamma * t * t
        for lam, mass in m.atoms:
            out = out + mass * lam * t * t / (1 + lam * t)
        return out

    spec = {"measure": {"alpha": m.alpha, "beta": m.beta, "gamma": m.gamma,
                        "atoms": [list(a) for a in m.atoms]}}
    label = f"measure(a={m.alpha:g},b={m.beta:g},g={m.gamma:g},atoms={len(m.atoms)})"
    return ScalarFunction(fn, ((0.0, INF),), label=label, convex=True, operator_convex=True,
                          increasing=m.beta >= 0, spec=spec)


def random_measure(rng: np.random.Generator, max_atoms: int = 3) -> OperatorConvexMeasure:
    """Random ``alpha, beta, gamma`` in ``[0, 2]`` with up to ``max_atoms`` atoms."""
    alpha, beta, gamma = rng.uniform(0, 2, size=3)
    k = int(rng.integers(0, max_atoms + 1))
    atoms = tuple((float(rng.uniform(0, 5)), float(rng.uniform(0.1, 2))) for _ in range(k))
    return OperatorConvexMeasure(float(alpha), float(beta), float(gamma), atoms)


@dataclass(frozen=True, eq=False)
class AffineMinorantSet:
    """Affine functions ``x -> slopes[i] . x + intercepts[i]`` below ``f`` on ``compact``."""

    slopes: np.ndarray  # shape (k, arity)
    intercepts: np.ndarray  # shape (k,)
    compact: tuple[tuple[float, float], ...]

    def __len__(self):
        return len(self.intercepts)

    def lines(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        pts = x.reshape(-1, 1) if x.ndim <= 1 and self.slopes.shape[1] == 1 else np.atleast_2d(x)
        return pts @ self.slopes.T + self.intercepts

    def __call__(self, x) -> np.ndarray:
        return self.lines(x).max(axis=1)


def _as_box(f: ScalarFunction, K) -> tuple[tuple[float, float], ...]:
    if f.arity == 1 and len(K) == 2 and np.isscalar(K[0]):
        K = (K,)
    K = tuple((float(lo), float(hi)) for lo, hi in K)
    if len(K) != f.arity:
        raise DimensionMismatch(f"compact set has {len(K)} sides for a function of {f.arity} variables")
    for (lo, hi), (dlo, dhi) in zip(K, f.domain):
        if not (dlo <= lo <= hi <= dhi) or math.isinf(lo) or math.isinf(hi):
            raise BadParameter(f"[{lo}, {hi}] is not a compact subset of ({dlo}, {dhi})")
    return K


def _grid(K, m: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, m) for lo, hi in K]
    return np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)


def _partial(f: ScalarFunction, x: np.ndarray, i: int, h: float) -> float:
    lo, hi = f.domain[i]
    fwd, back = x.copy(), x.copy()
    fwd[i] += h
    back[i] -= h
    call = (lambda p: float(f(p[:1])[0])) if f.arity == 1 else (lambda p: float(f(p[None, :])[0]))
    if back[i] >= lo and fwd[i] <= hi:
        return (call(fwd) - call(back)) / (2 * h)
    if fwd[i] <= hi:
        return (call(fwd) - call(x)) / h
    return (call(x) - call(back)) / h


def _step(width: float) -> float:
    # power of two so that dyadic anchors plus or minus the step are exact
    return 2.0 ** math.floor(math.log2(1e-6 * (width or 1.0)))


def affine_minorants(f: ScalarFunction, K, m: int) -> AffineMinorantSet:
    """Support lines of a convex ``f`` at ``m`` evenly spaced anchors per axis of ``K``.

    Slopes are symmetric difference quotients with step about ``1e-6 * width``
    (rounded down to a power of two);
    one-sided quotients are used only where the symmetric stencil would leave
    the domain of ``f``. Coinciding lines are merged.
    """
    if not f.convex:
        raise NotConvexClaim(f"{f.label or 'function'} is not flagged convex")
    if m < 2:
        raise BadParameter("need at least two anchors")
    K = _as_box(f, K)
    anchors = _grid(K, m)
    slopes, intercepts = [], []
    for x in anchors:
        grad = np.array([_partial(f, x, i, _step(hi - lo)) for i, (lo, hi) in enumerate(K)])
        fx = float(f(x[:1])[0]) if f.arity == 1 else float(f(x[None, :])[0])
        b = fx - grad @ x
        if any(np.allclose(g, grad, rtol=1e-9, atol=1e-9) and abs(c - b) <= 1e-9 * (1 + abs(b))
               for g, c in zip(slopes, intercepts)):
            continue
        slopes.append(grad)
        intercepts.append(b)
    return AffineMinorantSet(np.array(slopes), np.array(intercepts), K)


def minorant_sup_error(f: ScalarFunction, S: AffineMinorantSet, grid: int | None = None) -> float:
    """``max (f - sup_i f_i)`` over an even grid on the compact set of ``S``."""
    if grid is None:
        grid = 1001 if f.arity == 1 else 101
    pts = _grid(S.compact, grid)
    vals = f(pts[:, 0]) if f.arity == 1 else f(pts)
    return float(np.max(vals - S(pts)))


def _random_pair(f: ScalarFunction, n: int, rng: np.random.Generator):
    lo, hi = sampling_window(f.interval)
    mats = []
    for _ in range(2):
        x = rng.uniform(lo, hi, size=n)
        u = haar_unitary(n, rng)
        a = (u * x) @ u.conj().T
        mats.append(HermitianMatrix((a + a.conj().T) / 2))
    return mats


def convexity_gap(f: ScalarFunction, a, b, lam: float) -> np.ndarray:
    """Eigenvalues of ``lam f(a) + (1-lam) f(b) - f(lam a + (1-lam) b)``, computed directly."""
    a, b = np.asarray(a), np.asarray(b)
    mix = HermitianMatrix(lam * a + (1 - lam) * b)
    rhs = lam * func_calc(f, a).entries + (1 - lam) * func_calc(f, b).entries
    gap = rhs - func_calc(f, mix).entries
    return np.linalg.eigvalsh((gap + gap.conj().T) / 2)[::-1]


def matrix_convexity_test(f: ScalarFunction, n: int, trials: int = 1000, seed: int = 0,
                          tol: float | None = None) -> PreorderVerdict:
    """Randomized search for a violation of matrix convexity of order ``n``.

    Each trial draws ``a, b`` with spectra inside the domain of ``f`` and
    ``lam`` uniform in ``[0, 1]``. Margins are the smallest eigenvalue of the
    convexity gap per trial; the witness holds the worst ``(a, b, lam)``.
    """
    if f.arity != 1:
        raise DimensionMismatch("matrix convexity is tested for functions of one variable")
    if n < 1 or trials < 1:
        raise BadParameter("n and trials must be positive")
    rng = philox_rng(seed)
    margins = np.empty(trials)
    worst = None
    scale = 0.0
    for k in range(trials):
        a, b = _random_pair(f, n, rng)
        lam = float(rng.uniform())
        gap = convexity_gap(f, a, b, lam)
        margins[k] = gap[-1]
        scale = max(scale, float(np.max(np.abs(f(np.linalg.eigvalsh(a.entries))))),
                    float(np.max(np.abs(f(np.linalg.eigvalsh(b.entries))))))
        if worst is None or margins[k] < margins[worst[0]]:
            worst = (k, a, b, lam)
    if tol is None:
        tol = 1e-8 * (1.0 + 2 * scale)
    k, a, b, lam = worst
    if margins[k] >= -tol:
        return PreorderVerdict(True, margins, tol)
    return PreorderVerdict(False, margins, tol, {
        "criterion": "matrix_convexity",
        "index": k + 1,
        "margin": float(margins[k]),
        "a": a.entries,
        "b": b.entries,
        "lam": lam,
    })


def three_point_check(f: ScalarFunction, samples: int = 10_000, seed: int = 0,
                      tol: float = 1e-10, concave: bool = False) -> float:
    """Smallest slack of the scalar convexity inequality over random triples.

    Returns ``min(lam f(x) + (1-lam) f(y) - f(lam x + (1-lam) y))`` (sign
    flipped for ``concave=True``); a value below ``-tol`` refutes the claim.
    Slack is measured relative to ``1 + |f|``.
    """
    rng = philox_rng(seed)
    lo, hi = sampling_window(f.interval)
    x = rng.uniform(lo, hi, samples)
    y = rng.uniform(lo, hi, samples)
    lam = rng.uniform(0, 1, samples)
    fx, fy = f(x), f(y)
    slack = lam * fx + (1 - lam) * fy - f(lam * x + (1 - lam) * y)
    if concave:
        slack = -slack
    return float(np.min(slack / (1 + np.abs(fx) + np.abs(fy))))


def monotonicity_check(f: ScalarFunction, samples: int = 10_000, seed: int = 0,
                       decreasing: bool = False) -> float:
    """Smallest ``(f(y) - f(x)) * sign`` over random ordered pairs ``x < y``."""
    rng = philox_rng(seed)
    lo, hi = sampling_window(f.interval)
    x = np.sort(rng.uniform(lo, hi, (samples, 2)), axis=1)
    diff = f(x[:, 1]) - f(x[:, 0])
    return float(np.min(-diff if decreasing else diff))
