"""Command-line front end: ``majorize verify | fuzz | repro``.

Exit codes for ``verify``: 0 when hypotheses hold and the inequality holds,
1 on an asserted violation, 2 when a hypothesis fails (the exploratory report
is still written), 3 on I/O, parse or validation errors. ``fuzz`` exits 1
when any asserted failure was recorded.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import inequalities as ineq
from .campaigns import CAMPAIGNS, run_campaign
from .convexity import ScalarFunction, builtin
from .errors import MajorizeError, ParseError, UnknownTheorem
from .hermitian import make_commuting_tuple
from .io import dumps, function_from_json, load_json, map_from_json, matrix_from_json, write_atomic
from .maps import State
from .repro import REPROS, run_repro

EXIT_OK, EXIT_VIOLATION, EXIT_HYPOTHESIS, EXIT_ERROR = 0, 1, 2, 3

log = logging.getLogger("majorize")


@dataclass(frozen=True)
class RunConfig:
    command: str
    theorem_id: str | None = None
    inputs: tuple[str, ...] = ()
    map: str | None = None
    function: str | None = None
    seed: int = 0
    trials: int = 1
    dim: int | None = None
    tol: float | None = None
    out: str | None = None
    format: str = "json"
    pool: str = "default"
    name: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ParseError("--trials must be at least 1")
        if self.dim is not None and self.dim < 1:
            raise ParseError("--dim must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ParseError("--seed must be a 64-bit unsigned integer")


def _doc(value) -> dict:
    """A JSON document given inline, as a path, or already parsed."""
    return value if isinstance(value, dict) else load_json(value)


def _function(value) -> ScalarFunction:
    if isinstance(value, str) and not value.lstrip().startswith("{") and not Path(value).exists():
        return builtin(value)
    return function_from_json(_doc(value))


def _matrix(doc):
    if isinstance(doc, dict):
        return matrix_from_json(doc)
    return matrix_from_json({"entries": doc})


def _need(bundle: dict, key: str):
    if key not in bundle:
        raise ParseError(f"input bundle is missing {key!r}")
    return bundle[key]


def load_bundle(cfg: RunConfig) -> dict:
    bundle: dict = {}
    for path in cfg.inputs:
        bundle.update(load_json(path))
    if cfg.map is not None:
        bundle["map"] = _doc(cfg.map)
    if cfg.function is not None:
        bundle["function"] = cfg.function
    return bundle


def run_verify(theorem_id: str, bundle: dict, tol: float | None = None) -> ineq.InequalityReport:
    """Dispatch one verification from a parsed input bundle."""
    fn = lambda key="function": _function(_need(bundle, key))
    mp = lambda key="map": map_from_json(_doc(_need(bundle, key)))
    mat = lambda key: _matrix(_need(bundle, key))
    if theorem_id == "jensen_state":
        rho = bundle.get("state") or bundle.get("map")
        state = map_from_json(rho) if isinstance(rho, dict) and "kind" in rho else State(_matrix(_need(bundle, "rho")).entries)
        return ineq.jensen_state(fn(), state, mat("a"), tol)
    if theorem_id in ("jensen_loewner", "jensen_spectral", "jensen_commuting", "jensen_majorization"):
        return getattr(ineq, theorem_id)(fn(), mp(), mat("a"), tol)
    if theorem_id == "jensen_conditional":
        return ineq.jensen_conditional(fn(), fn("outer"), mp(), mp("expectation"), mat("a"), tol)
    if theorem_id == "jensen_multivar":
        t = make_commuting_tuple([_matrix(m) for m in _need(bundle, "matrices")])
        return ineq.jensen_multivar(fn(), mp(), t, bundle.get("order", "loewner"), tol)
    if theorem_id == "information_inequality":
        atoms = [(_matrix_raw(x["a"]), _matrix_raw(x["b"]), float(x["w"])) for x in _need(bundle, "atoms")]
        return ineq.information_inequality(atoms, tol)
    if theorem_id == "liapunov":
        return ineq.liapunov(mp(), mat("a"), float(_need(bundle, "r")), float(_need(bundle, "s")), tol)
    if theorem_id == "holder":
        return ineq.holder(mat("c"), mat("d"), mat("a"), mat("b"),
                           float(_need(bundle, "p")), float(_need(bundle, "q")), tol)
    raise UnknownTheorem(f"unknown theorem {theorem_id!r}; known: {list(ineq.THEOREMS)}")


def _matrix_raw(doc):
    from .io import decode_complex

    return decode_complex(doc["entries"] if isinstance(doc, dict) else doc)


def verify_exit_code(report: ineq.InequalityReport) -> int:
    if not report.hypotheses_ok:
        return EXIT_HYPOTHESIS
    return EXIT_OK if report.verdict.holds else EXIT_VIOLATION


def _report_csv(report: ineq.InequalityReport) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theorem_id", "hypotheses_ok", "holds", "min_margin", "inputs_digest"])
    w.writerow([report.theorem_id, int(report.hypotheses_ok), int(report.verdict.holds),
                repr(report.verdict.min_margin), report.inputs_digest])
    return buf.getvalue()


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_verify(cfg: RunConfig) -> int:
    if not cfg.theorem_id:
        raise ParseError("verify needs --theorem")
    report = run_verify(cfg.theorem_id, load_bundle(cfg), cfg.tol)
    _emit(cfg, _report_csv(report) if cfg.format == "csv" else dumps(report.to_dict()))
    code = verify_exit_code(report)
    log.info("%s: exit %d (min margin %.3e)", cfg.theorem_id, code, report.verdict.min_margin)
    return code


def cmd_fuzz(cfg: RunConfig) -> int:
    if not cfg.theorem_id:
        raise ParseError("fuzz needs --theorem")
    summary = run_campaign(cfg.theorem_id, cfg.trials, cfg.seed, cfg.dim, cfg.pool)
    if cfg.format == "csv":
        _emit(cfg, summary.to_csv())
    else:
        doc = summary.to_dict()
        doc["dim"] = cfg.dim
        doc["rows"] = [
            {"trial": r.trial, "dim": r.dim, "hypotheses_ok": r.hypotheses_ok, "holds": r.holds,
             "min_margin": r.min_margin, "function": r.function, "map": r.map_kind}
            for r in sorted(summary.records, key=lambda r: r.trial)
        ]
        _emit(cfg, dumps(doc))
    return EXIT_VIOLATION if summary.asserted_failures else EXIT_OK


def cmd_repro(cfg: RunConfig) -> int:
    _emit(cfg, dumps(run_repro(cfg.name)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="majorize", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    v = sub.add_parser("verify", parents=[common], help="check one inequality instance")
    v.add_argument("--theorem", required=True, choices=ineq.THEOREMS)
    v.add_argument("--input", action="append", default=[], help="JSON bundle (path or inline); repeatable")
    v.add_argument("--map", help="map document overriding the bundle")
    v.add_argument("--function", help="builtin name or function document overriding the bundle")
    v.add_argument("--tol", type=float)

    f = sub.add_parser("fuzz", parents=[common], help="run a seeded campaign")
    f.add_argument("--theorem", required=True, choices=sorted(CAMPAIGNS))
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--trials", type=int, default=100)
    f.add_argument("--dim", type=int)
    f.add_argument("--pool", default="default", help="instance pool of the campaign")

    r = sub.add_parser("repro", parents=[common], help="emit a canned worked example")
    r.add_argument("name", choices=sorted(REPROS))
    return parser


def _config(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        theorem_id=getattr(ns, "theorem", None),
        inputs=tuple(getattr(ns, "input", ())),
        map=getattr(ns, "map", None),
        function=getattr(ns, "function", None),
        seed=getattr(ns, "seed", 0),
        trials=getattr(ns, "trials", 1),
        dim=getattr(ns, "dim", None),
        tol=getattr(ns, "tol", None),
        out=ns.out,
        format=ns.format,
        pool=getattr(ns, "pool", "default"),
        name=getattr(ns, "name", None),
    )


COMMANDS = {"verify": cmd_verify, "fuzz": cmd_fuzz, "repro": cmd_repro}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("MAJORIZE_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        cfg = _config(ns)
        return COMMANDS[cfg.command](cfg)
    except (MajorizeError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
