"""Canned worked examples with fixed inputs."""

from __future__ import annotations

import numpy as np

from .convexity import builtin
from .errors import UnknownRepro
from .hermitian import HermitianMatrix, eigenvalues, func_calc
from .io import matrix_to_json
from .maps import BlockAverage, apply
from .preorders import spectral_leq, weak_majorization_leq


def _rank_above(m: HermitianMatrix, level: float) -> int:
    return int(np.sum(eigenvalues(m) > level))


def block_average_abs():
    """``|t|`` under the block average ``M_4 -> M_2``: a spectral Jensen failure.

    Returns the inputs and both sides; ``phi(f(A))`` is the larger side in
    weak majorization but not in the spectral preorder.
    """
    f = builtin("abs")
    phi = BlockAverage(n=2)
    a = HermitianMatrix(np.array([
        [-2, 0, 0, 0],
        [0, 0, 0, 0],
        [0, 0, 1, 1],
        [0, 0, 1, 1],
    ], dtype=complex))
    phi_f = apply(phi, func_calc(f, a))
    f_phi = func_calc(f, apply(phi, a))
    return f, phi, a, phi_f, f_phi


def aujla_silva() -> dict:
    f, phi, a, phi_f, f_phi = block_average_abs()
    level = 0.5
    spec = spectral_leq(f_phi, phi_f)
    weak = weak_majorization_leq(f_phi, phi_f)
    return {
        "schema": 1,
        "name": "aujla-silva",
        "function": f.label,
        "map": phi.kind,
        "A": matrix_to_json(a.entries),
        "phi_f_A": matrix_to_json(phi_f.entries),
        "f_phi_A": matrix_to_json(f_phi.entries),
        "eigenvalues_phi_f_A": eigenvalues(phi_f),
        "eigenvalues_f_phi_A": eigenvalues(f_phi),
        "projection_rank_level": level,
        "rank_phi_f_A_above": _rank_above(phi_f, level),
        "rank_f_phi_A_above": _rank_above(f_phi, level),
        "spectral_leq": spec.to_dict(),
        "weak_majorization_leq": weak.to_dict(),
    }


REPROS = {"aujla-silva": aujla_silva}


def run_repro(name: str) -> dict:
    try:
        return REPROS[name]()
    except KeyError:
        raise UnknownRepro(f"unknown reproduction {name!r}; known: {sorted(REPROS)}") from None
