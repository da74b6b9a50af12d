"""Seeded falsification campaigns over random instances.

Trial ``k`` of a campaign with seed ``s`` draws everything from
``philox_rng(s, k)``, so any trial can be replayed on its own and the summary
does not depend on evaluation order.
"""

from __future__ import annotations

import csv
import io as _io
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import inequalities as ineq
from .convexity import ScalarFunction, builtin, operator_convex_from_measure, random_measure
from .errors import UnknownTheorem
from .hermitian import HermitianMatrix, make_commuting_tuple
from .maps import (
    BlockDiagonalExpectation,
    BlockPinch,
    ChoiKraus,
    DiscreteDensity,
    SchurMultiplier,
    State,
    apply,
    diagonal_pinching,
    normalized_trace,
)
from .sampling import (
    haar_unitary,
    philox_rng,
    random_correlation,
    random_hermitian,
    random_hermitian_in_domain,
    random_partition,
    random_psd,
    random_state,
    random_unital_kraus,
)

log = logging.getLogger(__name__)

POOL_STREAM = 2**64 - 1
MIN_DIM, MAX_DIM = 2, 8


def monotone_convex_pool() -> list[ScalarFunction]:
    return [
        builtin("exp"),
        builtin("relu"),
        builtin("power", r=2),
        builtin("abs", shift=-0.5, domain=(0, None)),
    ]


def nonmonotone_convex_pool() -> list[ScalarFunction]:
    return [
        builtin("abs"),
        builtin("power", r=2, shift=1, domain=(None, None)),
        builtin("power", r=4, domain=(None, None)),
        builtin("abs", shift=0.5),
    ]


UNITAL_KINDS = ("block_pinch", "schur", "choi_kraus", "block_expectation")


def random_unital_map(rng: np.random.Generator, n: int, kind: str):
    """A unital positive map with output dimension ``n`` and its input dimension."""
    if kind == "block_pinch":
        return BlockPinch(float(rng.uniform(0.05, 0.95)), n), 2 * n
    if kind == "schur":
        return SchurMultiplier(random_correlation(n, rng)), n
    if kind == "choi_kraus":
        m = n + int(rng.integers(0, 3))
        return ChoiKraus(tuple(random_unital_kraus(m, n, int(rng.integers(1, 4)), rng))), m
    if kind == "block_expectation":
        return BlockDiagonalExpectation(tuple(map(tuple, random_partition(n, rng)))), n
    if kind == "density":
        ws = rng.uniform(0.2, 1.0, size=int(rng.integers(1, 4)))
        ks = random_unital_kraus(n, n, len(ws), rng)
        return DiscreteDensity(tuple((k / np.sqrt(w), float(w)) for k, w in zip(ks, ws))), n
    if kind == "diagonal":
        return diagonal_pinching(n), n
    if kind == "state":
        return State(random_state(n, rng)), n
    if kind == "unitary":
        return ChoiKraus((haar_unitary(n, rng),)), n
    raise ValueError(f"unknown map kind {kind!r}")


def random_contractive_map(rng: np.random.Generator, n: int):
    phi, m = random_unital_map(rng, n, "choi_kraus")
    s = float(rng.uniform(0.3, 0.95))
    return ChoiKraus(tuple(np.sqrt(s) * w for w in phi.kraus)), m


def block_scalar_map(rng: np.random.Generator, m: int, partition) -> ChoiKraus:
    """Unital CP map ``A -> sum_k tr(rho_k A) I_k`` onto block-scalar matrices."""
    n = sum(len(b) for b in partition)
    kraus = []
    for block in partition:
        w, v = np.linalg.eigh(random_state(m, rng))
        for p, vec in zip(w, v.T):
            if p <= 1e-14:
                continue
            for j in block:
                k = np.zeros((m, n), dtype=complex)
                k[:, j] = np.sqrt(p) * vec
                kraus.append(k)
    return ChoiKraus(tuple(kraus))


@dataclass(frozen=True)
class TrialRecord:
    theorem_id: str
    seed: int
    trial: int
    dim: int
    hypotheses_ok: bool
    holds: bool
    min_margin: float
    function: str = ""
    map_kind: str = ""

    @property
    def asserted_failure(self) -> bool:
        return self.hypotheses_ok and not self.holds


@dataclass
class CampaignSummary:
    theorem_id: str
    seed: int
    pool: str
    trials: int = 0
    holds: int = 0
    asserted_failures: int = 0
    exploratory: int = 0
    exploratory_violations: int = 0
    worst_margin: float = float("inf")
    worst_trial: int | None = None
    worst_exploratory_margin: float = float("inf")
    worst_exploratory_trial: int | None = None
    records: list[TrialRecord] = field(default_factory=list, repr=False)

    def add(self, r: TrialRecord) -> None:
        self.trials += 1
        self.holds += r.holds
        self.records.append(r)
        if r.hypotheses_ok:
            self.asserted_failures += not r.holds
            if (r.min_margin, r.trial) < (self.worst_margin, self.worst_trial if self.worst_trial is not None else -1):
                self.worst_margin, self.worst_trial = r.min_margin, r.trial
        else:
            self.exploratory += 1
            self.exploratory_violations += not r.holds
            key = self.worst_exploratory_trial if self.worst_exploratory_trial is not None else -1
            if (r.min_margin, r.trial) < (self.worst_exploratory_margin, key):
                self.worst_exploratory_margin, self.worst_exploratory_trial = r.min_margin, r.trial

    def to_dict(self) -> dict:
        def finite(x):
            return None if x == float("inf") else x

        return {
            "schema": 1,
            "theorem_id": self.theorem_id,
            "seed": self.seed,
            "pool": self.pool,
            "trials": self.trials,
            "holds": self.holds,
            "asserted_failures": self.asserted_failures,
            "exploratory": self.exploratory,
            "exploratory_violations": self.exploratory_violations,
            "worst_margin": finite(self.worst_margin),
            "worst_trial": self.worst_trial,
            "worst_exploratory_margin": finite(self.worst_exploratory_margin),
            "worst_exploratory_trial": self.worst_exploratory_trial,
        }

    def to_csv(self) -> str:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theorem_id", "seed", "dim", "holds", "min_margin", "trial", "hypotheses_ok",
                    "function", "map"])
        for r in sorted(self.records, key=lambda r: r.trial):
            w.writerow([r.theorem_id, r.seed, r.dim, int(r.holds), repr(r.min_margin), r.trial,
                        int(r.hypotheses_ok), r.function, r.map_kind])
        return buf.getvalue()


# --- instance generators -------------------------------------------------------------
# Each takes (rng, dim, ctx) and returns (report, inputs). ``ctx`` carries
# pool-level data derived from the campaign seed.

Generator = Callable[[np.random.Generator, int, dict], tuple]


def _pick(rng, seq):
    return seq[int(rng.integers(0, len(seq)))]


def _gen_single(check, functions_key: str, kinds=UNITAL_KINDS):
    def gen(rng, n, ctx):
        f = _pick(rng, ctx[functions_key])
        phi, m = random_unital_map(rng, n, _pick(rng, ctx.get("kinds", kinds)))
        a = HermitianMatrix(random_hermitian_in_domain(m, rng, f.interval))
        return check(f, phi, a), {"f": f, "phi": phi, "a": a}

    return gen


def _gen_contractive_spectral(rng, n, ctx):
    f = _pick(rng, ctx["functions"])
    phi, m = random_contractive_map(rng, n)
    a = HermitianMatrix(random_hermitian_in_domain(m, rng, f.interval))
    return ineq.jensen_spectral(f, phi, a), {"f": f, "phi": phi, "a": a}


def _gen_state(rng, n, ctx):
    f = _pick(rng, ctx["functions"])
    rho = State(random_state(n, rng))
    a = HermitianMatrix(random_hermitian_in_domain(n, rng, f.interval))
    return ineq.jensen_state(f, rho, a), {"f": f, "rho": rho, "a": a}


def _gen_conditional(rng, n, ctx):
    f = _pick(rng, ctx["functions"])
    g = _pick(rng, ctx["outer"])
    mode = _pick(rng, ("trace", "gibbs", "block"))
    if mode == "block":
        part = tuple(map(tuple, random_partition(n, rng)))
        m = n + int(rng.integers(0, 3))
        phi = block_scalar_map(rng, m, part)
        E = BlockDiagonalExpectation(part)
    else:
        phi, m = random_unital_map(rng, n, _pick(rng, UNITAL_KINDS))
    a = HermitianMatrix(random_hermitian_in_domain(m, rng, f.interval))
    if mode == "trace":
        E = normalized_trace(n)
    elif mode == "gibbs":
        w, v = np.linalg.eigh(apply(phi, a).entries)
        p = np.exp(-(w - w.min()))
        E = State((v * (p / p.sum())) @ v.conj().T)
    return ineq.jensen_conditional(f, g, phi, E, a), {"f": f, "g": g, "phi": phi, "E": E, "a": a}


def _gen_multivar(rng, n, ctx):
    f = _pick(rng, ctx["functions"])
    u = haar_unitary(n, rng)
    mats = []
    for _ in range(f.arity):
        x = rng.uniform(-2, 2, size=n)
        mats.append(HermitianMatrix((u * x) @ u.conj().T))
    t = make_commuting_tuple(mats)
    phi, _ = random_unital_map(rng, n, _pick(rng, ("diagonal", "state", "unitary")))
    return ineq.jensen_multivar(f, phi, t, order=ctx["order"]), {"f": f, "phi": phi, "t": t}


def _gen_information(rng, n, ctx):
    k = int(rng.integers(1, 4))
    w = rng.uniform(0.2, 1.0, size=k)
    a = [g / np.sqrt(wi) for g, wi in zip(random_unital_kraus(n, n, k, rng), w)]
    s = 1.0 if rng.random() < 0.5 else float(rng.uniform(0.5, 1.0))
    b = [np.sqrt(s) * g / np.sqrt(wi) for g, wi in zip(random_unital_kraus(n, n, k, rng), w)]
    atoms = list(zip(a, b, w))
    return ineq.information_inequality(atoms), {"atoms": atoms}


EXPONENTS = (1.0, 1.5, 2.0, 3.0)


def _gen_liapunov(rng, n, ctx):
    kind = _pick(rng, (*UNITAL_KINDS, "state", "contractive"))
    if kind == "contractive":
        phi, m = random_contractive_map(rng, n)
    else:
        phi, m = random_unital_map(rng, n, kind)
    a = HermitianMatrix(random_hermitian(m, rng, (0.0, 3.0)))
    r, s = sorted(rng.choice(EXPONENTS, size=2))
    return ineq.liapunov(phi, a, float(r), float(s)), {"phi": phi, "a": a, "r": float(r), "s": float(s)}


def _gen_holder(rng, n, ctx):
    p = float(_pick(rng, (1.5, 2.0, 3.0)))
    q = p / (p - 1)
    u = haar_unitary(n, rng)
    t = rng.uniform(0, 1, size=n)
    c = (u * t) @ u.conj().T
    d = (u * (1 - t**q) ** (1 / q)) @ u.conj().T
    a, b = random_psd(n, rng, 2.0), random_psd(n, rng, 2.0)
    mats = [HermitianMatrix((x + x.conj().T) / 2) for x in (c, d, a, b)]
    return ineq.holder(*mats, p, q), {"c": mats[0], "d": mats[1], "a": mats[2], "b": mats[3], "p": p, "q": q}


def _loewner_measure_pool(seed: int) -> list[ScalarFunction]:
    rng = philox_rng(seed, POOL_STREAM)
    return [operator_convex_from_measure(random_measure(rng)) for _ in range(20)]


def _outer_pool():
    return [builtin("exp"), builtin("relu", shift=0.5), builtin("identity"), builtin("power", r=2)]


# theorem -> pool -> (generator, ctx factory)
CAMPAIGNS: dict[str, dict[str, tuple[Generator, Callable[[int], dict]]]] = {
    "jensen_spectral": {
        "default": (_gen_single(ineq.jensen_spectral, "functions"),
                    lambda s: {"functions": monotone_convex_pool()}),
        "nonmonotone": (_gen_single(ineq.jensen_spectral, "functions"),
                        lambda s: {"functions": nonmonotone_convex_pool(), "kinds": ("block_pinch",)}),
        "contractive": (_gen_contractive_spectral, lambda s: {"functions": [builtin("relu")]}),
        "nonunital": (_gen_contractive_spectral,
                      lambda s: {"functions": [builtin("exp"), builtin("relu", shift=-1)]}),
    },
    "jensen_majorization": {
        "default": (_gen_single(ineq.jensen_majorization, "functions"),
                    lambda s: {"functions": nonmonotone_convex_pool()}),
    },
    "jensen_loewner": {
        "default": (_gen_single(ineq.jensen_loewner, "functions", (*UNITAL_KINDS, "density")),
                    lambda s: {"functions": _loewner_measure_pool(s)}),
        "t4": (_gen_single(ineq.jensen_loewner, "functions", (*UNITAL_KINDS, "density")),
               lambda s: {"functions": [builtin("power", r=4, domain=(None, None))]}),
    },
    "jensen_commuting": {
        "default": (_gen_single(ineq.jensen_commuting, "functions", ("diagonal", "state")),
                    lambda s: {"functions": nonmonotone_convex_pool() + monotone_convex_pool()}),
    },
    "jensen_conditional": {
        "default": (_gen_conditional, lambda s: {"functions": nonmonotone_convex_pool(),
                                                 "outer": _outer_pool()}),
    },
    "jensen_state": {
        "default": (_gen_state, lambda s: {"functions": nonmonotone_convex_pool() + monotone_convex_pool()}),
    },
    "jensen_multivar": {
        "default": (_gen_multivar, lambda s: {"functions": [builtin(k) for k in ("max", "sum", "sqnorm")],
                                              "order": "loewner"}),
        "majorization": (_gen_multivar, lambda s: {"functions": [builtin(k) for k in ("max", "sum", "sqnorm")],
                                                   "order": "majorization"}),
    },
    "information_inequality": {"default": (_gen_information, lambda s: {})},
    "liapunov": {"default": (_gen_liapunov, lambda s: {})},
    "holder": {"default": (_gen_holder, lambda s: {})},
}


def _lookup(theorem_id: str, pool: str):
    if theorem_id not in CAMPAIGNS:
        raise UnknownTheorem(f"unknown theorem {theorem_id!r}; known: {sorted(CAMPAIGNS)}")
    pools = CAMPAIGNS[theorem_id]
    if pool not in pools:
        raise UnknownTheorem(f"theorem {theorem_id!r} has no pool {pool!r}; known: {sorted(pools)}")
    return pools[pool]


def trial_dim(trial: int, dim: int | None) -> int:
    return dim if dim is not None else MIN_DIM + trial % (MAX_DIM - MIN_DIM + 1)


def replay(theorem_id: str, seed: int, trial: int, dim: int | None = None, pool: str = "default",
           ctx: dict | None = None):
    """Regenerate one trial; returns ``(report, inputs)``."""
    gen, make_ctx = _lookup(theorem_id, pool)
    if ctx is None:
        ctx = make_ctx(seed)
    return gen(philox_rng(seed, trial), trial_dim(trial, dim), ctx)


def _record(theorem_id, seed, trial, n, report, inputs) -> TrialRecord:
    f = inputs.get("f")
    phi = inputs.get("phi")
    return TrialRecord(
        theorem_id, seed, trial, n, report.hypotheses_ok, bool(report.verdict.holds),
        report.verdict.min_margin, f.label if f is not None else "", getattr(phi, "kind", ""),
    )


def run_campaign(theorem_id: str, trials: int, seed: int = 0, dim: int | None = None,
                 pool: str = "default") -> CampaignSummary:
    """Run ``trials`` independent seeded instances and summarize the outcomes."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    _, make_ctx = _lookup(theorem_id, pool)
    ctx = make_ctx(seed)
    summary = CampaignSummary(theorem_id, seed, pool)
    for k in range(trials):
        n = trial_dim(k, dim)
        report, inputs = replay(theorem_id, seed, k, dim, pool, ctx)
        rec = _record(theorem_id, seed, k, n, report, inputs)
        if not rec.holds:
            log.info("trial %d (%s): verdict fails, margin %.3e, exploratory=%s",
                     k, theorem_id, rec.min_margin, not rec.hypotheses_ok)
        summary.add(rec)
    return summary
