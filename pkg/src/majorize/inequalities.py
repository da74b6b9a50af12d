"""Jensen-type operator inequalities and three named consequences.

Each check returns an :class:`InequalityReport`. Hypotheses that fail do not
raise; the report is marked exploratory instead and its verdict is an
observation, not an assertion. Structural problems (dimensions, domains,
invalid densities or exponents) raise.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields, is_dataclass

import numpy as np

from .convexity import ScalarFunction, builtin
from .errors import (
    BadExponents,
    DimensionMismatch,
    DomainMismatch,
    HypothesisUnmet,
    InequalityViolation,
    NotCommuting,
    NotDensity,
    NotPSD,
    NotUnital,
    Singular,
    SpectrumOutsideDomain,
)
from .hermitian import (
    CommutingTuple,
    HermitianMatrix,
    as_hermitian,
    check_in_interval,
    commutator_norm,
    eigenvalues,
    func_calc,
    joint_func_calc,
    make_commuting_tuple,
    reconstruction_tol,
)
from .maps import (
    BlockDiagonalExpectation,
    PositiveMapSpec,
    State,
    apply,
    centralizer_defect,
    classify,
)
from .preorders import PreorderVerdict, default_tol, loewner_leq, spectral_leq, weak_majorization_leq

THEOREMS = (
    "jensen_state",
    "jensen_loewner",
    "jensen_spectral",
    "jensen_commuting",
    "jensen_conditional",
    "jensen_majorization",
    "jensen_multivar",
    "information_inequality",
    "liapunov",
    "holder",
)


@dataclass(frozen=True)
class Hypothesis:
    ok: bool
    detail: str = ""


@dataclass(frozen=True, eq=False)
class InequalityReport:
    theorem_id: str
    hypotheses: dict[str, Hypothesis]
    verdict: PreorderVerdict
    lhs: HermitianMatrix
    rhs: HermitianMatrix
    inputs_digest: str
    labels: tuple[str, ...] = field(default=())

    @property
    def hypotheses_ok(self) -> bool:
        return all(h.ok for h in self.hypotheses.values())

    @property
    def exploratory(self) -> bool:
        return not self.hypotheses_ok

    @property
    def asserted_failure(self) -> bool:
        return self.hypotheses_ok and not self.verdict.holds

    def assert_holds(self) -> None:
        if not self.hypotheses_ok:
            failed = [k for k, h in self.hypotheses.items() if not h.ok]
            raise HypothesisUnmet(f"{self.theorem_id}: hypotheses not met: {failed}")
        if not self.verdict.holds:
            raise InequalityViolation(f"{self.theorem_id}: {self.verdict.witness}")

    def to_dict(self) -> dict:
        from .io import matrix_to_json

        return {
            "schema": 1,
            "theorem_id": self.theorem_id,
            "hypotheses_ok": self.hypotheses_ok,
            "hypotheses": {k: {"ok": h.ok, "detail": h.detail} for k, h in self.hypotheses.items()},
            "verdict": self.verdict.to_dict(),
            "lhs": matrix_to_json(self.lhs.entries),
            "rhs": matrix_to_json(self.rhs.entries),
            "inputs_digest": self.inputs_digest,
            "labels": list(self.labels),
        }


def _feed(h, obj) -> None:
    if isinstance(obj, HermitianMatrix):
        obj = obj.entries
    if isinstance(obj, np.ndarray):
        h.update(repr((obj.shape, obj.dtype.str)).encode())
        h.update(np.ascontiguousarray(obj).tobytes())
    elif isinstance(obj, ScalarFunction):
        h.update(repr((obj.label, obj.domain, obj.spec)).encode())
    elif isinstance(obj, CommutingTuple):
        for m in obj.matrices:
            _feed(h, m)
    elif is_dataclass(obj):
        h.update(type(obj).__name__.encode())
        for f in fields(obj):
            _feed(h, getattr(obj, f.name))
    elif isinstance(obj, (list, tuple)):
        h.update(b"[")
        for x in obj:
            _feed(h, x)
        h.update(b"]")
    else:
        h.update(repr(obj).encode())


def inputs_digest(*objs) -> str:
    h = hashlib.sha256()
    for obj in objs:
        _feed(h, obj)
    return h.hexdigest()


def _scalar(x: float) -> HermitianMatrix:
    return HermitianMatrix(np.array([[float(x)]]))


def _zero_ok(f: ScalarFunction) -> bool:
    zero = np.zeros(f.arity)
    if not all(lo <= 0.0 <= hi for lo, hi in f.domain):
        return False
    value = f(zero[:1]) if f.arity == 1 else f(zero[None, :])
    return float(np.ravel(value)[0]) <= 0.0


def _map_hypothesis(phi: PositiveMapSpec, f: ScalarFunction | None, in_dim: int,
                    allow_contractive: bool = True) -> Hypothesis:
    n = in_dim // 2 if phi.in_dim is None else None
    c = classify(phi, n)
    if c.unital:
        return Hypothesis(True, "unital")
    if allow_contractive and c.contractive:
        if f is None:
            return Hypothesis(True, "contractive")
        if _zero_ok(f):
            return Hypothesis(True, "contractive with f(0) <= 0")
        return Hypothesis(False, "contractive but 0 is outside the domain or f(0) > 0")
    return Hypothesis(False, f"not unital (defect {c.unit_defect:.3e}), not contractive "
                             f"(margin {c.contraction_margin:.3e})")


def _commute_tol(*ms: HermitianMatrix) -> float:
    return 1e-10 * (1.0 + max(float(np.max(np.abs(m.entries))) for m in ms))


def _check_spectrum(f: ScalarFunction, a: HermitianMatrix, i: int = 0) -> None:
    check_in_interval(eigenvalues(a), f.domain[i])


def _jensen_pair(f: ScalarFunction, phi: PositiveMapSpec, a: HermitianMatrix):
    _check_spectrum(f, a)
    phi_a = apply(phi, a)
    lhs = func_calc(f, phi_a)
    rhs = apply(phi, func_calc(f, a))
    return phi_a, lhs, rhs


def _report(theorem_id, hyps, verdict, lhs, rhs, digest_inputs, labels=()):
    return InequalityReport(theorem_id, hyps, verdict, lhs, rhs, inputs_digest(theorem_id, *digest_inputs),
                            tuple(labels))


def _tol(tol, lhs, rhs):
    return default_tol(lhs, rhs) if tol is None else tol


def jensen_state(f: ScalarFunction, rho, a, tol: float | None = None) -> InequalityReport:
    """``f(tr(rho a)) <= tr(rho f(a))`` for a state ``rho`` and convex ``f``."""
    state = rho if isinstance(rho, State) else State(np.asarray(rho))
    a = as_hermitian(a)
    if state.in_dim != a.dim:
        raise DimensionMismatch(f"state acts on {state.in_dim}, matrix has dim {a.dim}")
    fa = func_calc(f, a)
    mean = float(np.trace(state.rho @ a.entries).real)
    lhs = _scalar(float(f(np.array([np.clip(mean, *f.interval)]))[0]))
    rhs = _scalar(float(np.trace(state.rho @ fa.entries).real))
    hyps = {"convex": Hypothesis(f.convex, f.label)}
    return _report("jensen_state", hyps, loewner_leq(lhs, rhs, _tol(tol, lhs, rhs)), lhs, rhs, (f, state, a))


def jensen_loewner(f: ScalarFunction, phi: PositiveMapSpec, a, tol: float | None = None) -> InequalityReport:
    """``f(phi(a)) <= phi(f(a))`` in the Loewner order for operator convex ``f`` and unital ``phi``."""
    a = as_hermitian(a)
    _check_spectrum(f, a)
    unit = _map_hypothesis(phi, f, a.dim, allow_contractive=False)
    if not unit.ok:
        raise NotUnital(unit.detail)
    _, lhs, rhs = _jensen_pair(f, phi, a)
    hyps = {
        "unital": unit,
        "operator_convex": Hypothesis(f.operator_convex, f.label),
    }
    return _report("jensen_loewner", hyps, loewner_leq(lhs, rhs, _tol(tol, lhs, rhs)), lhs, rhs, (f, phi, a))


def jensen_spectral(f: ScalarFunction, phi: PositiveMapSpec, a, tol: float | None = None) -> InequalityReport:
    """``lambda_i(f(phi(a))) <= lambda_i(phi(f(a)))`` for monotone convex ``f``.

    Decreasing convex functions are accepted and carry the label
    ``"monotone_decreasing"`` so they can be tallied separately.
    """
    a = as_hermitian(a)
    _check_spectrum(f, a)
    _, lhs, rhs = _jensen_pair(f, phi, a)
    if f.increasing:
        mono = Hypothesis(True, "increasing")
    elif f.decreasing:
        mono = Hypothesis(True, "decreasing")
    else:
        mono = Hypothesis(False, "not monotone")
    hyps = {
        "map": _map_hypothesis(phi, f, a.dim),
        "convex": Hypothesis(f.convex, f.label),
        "monotone": mono,
    }
    labels = ("monotone_decreasing",) if (f.decreasing and not f.increasing) else ()
    return _report("jensen_spectral", hyps, spectral_leq(lhs, rhs, _tol(tol, lhs, rhs)), lhs, rhs,
                   (f, phi, a), labels)


def jensen_commuting(f: ScalarFunction, phi: PositiveMapSpec, a, tol: float | None = None) -> InequalityReport:
    """Loewner-order Jensen inequality for convex ``f`` when ``phi(a)`` and ``phi(f(a))`` commute."""
    a = as_hermitian(a)
    _check_spectrum(f, a)
    phi_a, lhs, rhs = _jensen_pair(f, phi, a)
    c = commutator_norm(phi_a, rhs)
    tau = _commute_tol(phi_a, rhs)
    hyps = {
        "map": _map_hypothesis(phi, f, a.dim),
        "convex": Hypothesis(f.convex, f.label),
        "images_commute": Hypothesis(c <= tau, f"||[phi(a), phi(f(a))]|| = {c:.3e} (tol {tau:.1e})"),
    }
    return _report("jensen_commuting", hyps, loewner_leq(lhs, rhs, _tol(tol, lhs, rhs)), lhs, rhs,
                   (f, phi, a))


def _expect(E, X: HermitianMatrix) -> HermitianMatrix:
    return apply(E, X)


def jensen_conditional(f: ScalarFunction, g: ScalarFunction, phi: PositiveMapSpec, E, a,
                       tol: float | None = None) -> InequalityReport:
    """``E(g(f(phi(a)))) <= E(g(phi(f(a))))`` for a conditional expectation ``E``.

    ``E`` is a :class:`BlockDiagonalExpectation` or a :class:`State`; ``phi(a)``
    must lie in its centralizer and ``g`` must be increasing and convex.
    """
    if not isinstance(E, (BlockDiagonalExpectation, State)):
        raise DimensionMismatch(f"unsupported conditional expectation {type(E).__name__}")
    a = as_hermitian(a)
    _check_spectrum(f, a)
    phi_a, inner_l, inner_r = _jensen_pair(f, phi, a)
    if E.in_dim != phi_a.dim:
        raise DimensionMismatch(f"expectation acts on {E.in_dim}, phi(a) has dim {phi_a.dim}")
    try:
        check_in_interval(eigenvalues(inner_l), g.interval)
        check_in_interval(eigenvalues(inner_r), g.interval)
    except SpectrumOutsideDomain as exc:
        raise DomainMismatch(f"values of f leave the domain of g: {exc}") from None
    lhs = _expect(E, func_calc(g, inner_l))
    rhs = _expect(E, func_calc(g, inner_r))
    defect = centralizer_defect(E, phi_a)
    tau = _commute_tol(phi_a)
    hyps = {
        "map": _map_hypothesis(phi, None, a.dim, allow_contractive=False),
        "convex": Hypothesis(f.convex, f.label),
        "g_increasing_convex": Hypothesis(g.convex and g.increasing, g.label),
        "centralizer": Hypothesis(defect <= tau, f"defect {defect:.3e} (tol {tau:.1e})"),
    }
    return _report("jensen_conditional", hyps, loewner_leq(lhs, rhs, _tol(tol, lhs, rhs)), lhs, rhs,
                   (f, g, phi, E, a))


def jensen_majorization(f: ScalarFunction, phi: PositiveMapSpec, a, tol: float | None = None) -> InequalityReport:
    """Submajorization ``f(phi(a)) <_w phi(f(a))`` for arbitrary convex ``f``."""
    a = as_hermitian(a)
    _check_spectrum(f, a)
    _, lhs, rhs = _jensen_pair(f, phi, a)
    hyps = {
        "map": _map_hypothesis(phi, f, a.dim),
        "convex": Hypothesis(f.convex, f.label),
    }
    return _report("jensen_majorization", hyps, weak_majorization_leq(lhs, rhs, _tol(tol, lhs, rhs)),
                   lhs, rhs, (f, phi, a))


def jensen_multivar(f: ScalarFunction, phi: PositiveMapSpec, t: CommutingTuple, order: str = "loewner",
                    tol: float | None = None) -> InequalityReport:
    """Jensen inequality for a convex function of a commuting tuple.

    ``order="loewner"`` additionally needs ``phi(f(a_1, ..., a_n))`` to commute
    with every ``phi(a_i)``; ``order="majorization"`` compares by weak
    majorization. The images ``phi(a_i)`` must commute in either case, since
    otherwise the left-hand side is undefined.
    """
    if order not in ("loewner", "majorization"):
        raise ValueError(f"order must be 'loewner' or 'majorization', got {order!r}")
    if f.arity != len(t):
        raise DimensionMismatch(f"function of {f.arity} variables for a tuple of {len(t)}")
    for i, m in enumerate(t.matrices):
        _check_spectrum(f, m, i)
    images = [apply(phi, m) for m in t.matrices]
    try:
        image_tuple = make_commuting_tuple(images, _commute_tol(*images))
    except NotCommuting as exc:
        raise HypothesisUnmet(f"images phi(a_{exc.pair[0]}) and phi(a_{exc.pair[1]}) do not commute: "
                              f"norm {exc.norm:.3e}") from None
    if len(t) == 1:
        lhs = func_calc(f, images[0])
        rhs = apply(phi, func_calc(f, t.matrices[0]))
    else:
        lhs = joint_func_calc(f, image_tuple)
        rhs = apply(phi, joint_func_calc(f, t))
    hyps = {
        "map": _map_hypothesis(phi, f, t.dim),
        "convex": Hypothesis(f.convex, f.label),
    }
    if order == "loewner":
        worst, worst_i = 0.0, 0
        for i, m in enumerate(images):
            c = commutator_norm(m, rhs)
            if c > worst:
                worst, worst_i = c, i
        tau = _commute_tol(rhs, *images)
        hyps["rhs_commutes"] = Hypothesis(worst <= tau, f"worst ||[phi(a_{worst_i}), rhs]|| = {worst:.3e}")
        verdict = loewner_leq(lhs, rhs, _tol(tol, lhs, rhs))
    else:
        verdict = weak_majorization_leq(lhs, rhs, _tol(tol, lhs, rhs))
    return _report("jensen_multivar", hyps, verdict, lhs, rhs, (f, phi, t, order), (order,))


def _psd_power(x: np.ndarray, p: float) -> np.ndarray:
    w, v = np.linalg.eigh((x + x.conj().T) / 2)
    out = (v * np.power(np.clip(w, 0.0, None), p)) @ v.conj().T
    return (out + out.conj().T) / 2


def _require_psd(a: HermitianMatrix, name: str) -> None:
    lmin = float(eigenvalues(a)[-1])
    if lmin < -reconstruction_tol(a.dim):
        raise NotPSD(f"{name} has eigenvalue {lmin:.3e} < 0")


def information_inequality(atoms, tol: float | None = None) -> InequalityReport:
    """``sum_k w_k a_k* log(a_k^{-*} b_k* b_k a_k^{-1}) a_k <= 0`` for densities ``a`` and ``b``.

    ``atoms`` is a sequence of ``(a_k, b_k, w_k)``. The ``a_k`` must form a
    density (``sum w a*a = I``); for ``b`` the relaxed condition
    ``sum w b*b <= I`` is accepted and recorded in the report.
    """
    atoms = [(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex), float(w)) for a, b, w in atoms]
    if not atoms:
        raise NotDensity("no atoms")
    n = atoms[0][0].shape[0]
    for a, b, w in atoms:
        if a.shape != (n, n) or b.shape != (n, n):
            raise DimensionMismatch("all atoms must be square of a common size")
        if w <= 0:
            raise NotDensity("weights must be positive")
        for m, name in ((a, "a"), (b, "b")):
            smin = np.linalg.svd(m, compute_uv=False)[-1]
            if smin <= 1e-8:
                raise Singular(f"{name}_k has smallest singular value {smin:.3e}")
    tau = reconstruction_tol(n)
    eye = np.eye(n)
    sa = sum(w * a.conj().T @ a for a, _, w in atoms)
    sb = sum(w * b.conj().T @ b for _, b, w in atoms)
    if np.linalg.norm(sa - eye, 2) > tau:
        raise NotDensity(f"sum w a*a differs from I by {np.linalg.norm(sa - eye, 2):.3e}")
    gap_b = float(np.linalg.eigvalsh((eye - sb + (eye - sb).conj().T) / 2)[0])
    if gap_b < -tau:
        raise NotDensity(f"sum w b*b exceeds I (min eigenvalue of I - sum = {gap_b:.3e})")
    exact_b = np.linalg.norm(sb - eye, 2) <= tau
    log = builtin("log")
    total = np.zeros((n, n), dtype=complex)
    for a, b, w in atoms:
        ba = b @ np.linalg.inv(a)
        x = ba.conj().T @ ba
        x = HermitianMatrix((x + x.conj().T) / 2)
        total += w * a.conj().T @ func_calc(log, x).entries @ a
    lhs = HermitianMatrix((total + total.conj().T) / 2)
    rhs = HermitianMatrix(np.zeros((n, n)))
    hyps = {"b_density": Hypothesis(True, "exact" if exact_b else "relaxed: sum w b*b <= I")}
    labels = () if exact_b else ("relaxed_b_density",)
    return _report("information_inequality", hyps, loewner_leq(lhs, rhs, _tol(tol, lhs, rhs)), lhs, rhs,
                   (atoms,), labels)


def liapunov(phi: PositiveMapSpec, a, r: float, s: float, tol: float | None = None) -> InequalityReport:
    """``phi(a^r)^{1/r} <= phi(a^s)^{1/s}`` for positive ``a`` and ``1 <= r <= s``."""
    if not 1 <= r <= s:
        raise BadExponents(f"need 1 <= r <= s, got r={r}, s={s}")
    a = as_hermitian(a)
    _require_psd(a, "a")
    ar = apply(phi, HermitianMatrix(_psd_power(a.entries, r)))
    as_ = apply(phi, HermitianMatrix(_psd_power(a.entries, s)))
    lhs = HermitianMatrix(_psd_power(ar.entries, 1 / r))
    rhs = HermitianMatrix(_psd_power(as_.entries, 1 / s))
    hyps = {"map": _map_hypothesis(phi, None, a.dim)}
    return _report("liapunov", hyps, loewner_leq(lhs, rhs, _tol(tol, lhs, rhs)), lhs, rhs, (phi, a, r, s))


def holder(c, d, a, b, p: float, q: float, tol: float | None = None) -> InequalityReport:
    """``tr(ca + db) <= (tr(a^p + b^p))^{1/p}`` with the normalized trace, given ``c^q + d^q <= I``."""
    if not (p > 1 and q > 1 and abs(1 / p + 1 / q - 1) <= 1e-12):
        raise BadExponents(f"need conjugate exponents p, q > 1, got p={p}, q={q}")
    mats = [as_hermitian(x) for x in (c, d, a, b)]
    if len({m.dim for m in mats}) != 1:
        raise DimensionMismatch("c, d, a, b must share a dimension")
    for m, name in zip(mats, "cdab"):
        _require_psd(m, name)
    c, d, a, b = (m.entries for m in mats)
    n = c.shape[0]
    cq_dq = _psd_power(c, q) + _psd_power(d, q)
    gap = float(np.linalg.eigvalsh(np.eye(n) - cq_dq)[0])
    tau = reconstruction_tol(n)
    value = float(np.trace(c @ a + d @ b).real) / n
    bound = (float(np.trace(_psd_power(a, p) + _psd_power(b, p)).real) / n) ** (1 / p)
    lhs, rhs = _scalar(value), _scalar(bound)
    hyps = {"cq_plus_dq_leq_identity": Hypothesis(gap >= -tau, f"min eigenvalue of I - c^q - d^q = {gap:.3e}")}
    return _report("holder", hyps, loewner_leq(lhs, rhs, _tol(tol, lhs, rhs)), lhs, rhs, (c, d, a, b, p, q))


__all__ = [
    "THEOREMS",
    "Hypothesis",
    "InequalityReport",
    "holder",
    "information_inequality",
    "inputs_digest",
    "jensen_commuting",
    "jensen_conditional",
    "jensen_loewner",
    "jensen_majorization",
    "jensen_multivar",
    "jensen_spectral",
    "jensen_state",
    "liapunov",
]
