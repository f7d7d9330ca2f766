"""Communication cost of a box over deterministic-strategy decompositions.

A decomposition writes the box as a convex combination of deterministic
boxes; its cost is the weighted number of communicated bits.  Two bases are
supported: the full set of 256 deterministic boxes (every valid box is a
mixture of these, so the program is always feasible) and the 16-element
canonical basis, where membership can genuinely fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import lp
from .boxes import Box, enumerate_deterministic, format_fraction, mix
from .measures import chsh, signal

BASIS_KINDS = ("full256", "chsh16")


class NotInHull(ValueError):
    """The box is not a mixture of the requested basis."""


class BadDimension(ValueError):
    """Alphabet dimension for eta_star must be at least 2."""


@dataclass(frozen=True)
class Decomposition:
    """Convex combination of deterministic boxes, keyed by strategy id.

    weights holds only nonzero entries; cost is the weighted bit count."""

    weights: dict[int, Fraction]
    basis_kind: str
    cost: Fraction

    def as_mixture(self) -> Box:
        dets = enumerate_deterministic()
        return mix([(w, dets[i].as_box()) for i, w in sorted(self.weights.items())])


@dataclass(frozen=True)
class CostReport:
    """c is the optimal cost, eta = c - s the part no signal accounts for,
    lower_bound the facet bound max(0, (lambda_max - 2) / 2)."""

    c: Fraction
    eta: Fraction
    s: Fraction
    decomposition: Decomposition
    lower_bound: Fraction


@lru_cache(maxsize=1)
def _full256_system() -> tuple[lp._Prepared, tuple[int, ...]]:
    dets = enumerate_deterministic()
    ids = tuple(range(256))
    columns = np.zeros((16, 256), dtype=np.int64)
    costs = []
    for j, i in enumerate(ids):
        det = dets[i]
        box = det.as_box()
        for cell in range(16):
            if box.p[cell] != 0:
                columns[cell, j] = 1
        costs.append(det.cost_bits)
    return lp._prepare_int01(columns, costs), ids


@lru_cache(maxsize=1)
def _chsh16_system() -> tuple[lp._Prepared, tuple[int, ...]]:
    from .generators import canonical_det_ids

    ids = canonical_det_ids()
    dets = enumerate_deterministic()
    columns = np.zeros((16, len(ids)), dtype=np.int64)
    costs = []
    for j, i in enumerate(ids):
        det = dets[i]
        box = det.as_box()
        for cell in range(16):
            if box.p[cell] != 0:
                columns[cell, j] = 1
        costs.append(det.cost_bits)
    return lp._prepare_int01(columns, costs), ids


def _system_for(basis: str) -> tuple[lp._Prepared, tuple[int, ...]]:
    if basis == "full256":
        return _full256_system()
    if basis == "chsh16":
        return _chsh16_system()
    raise ValueError(f"unknown basis {basis!r}, expected one of {BASIS_KINDS}")


def _objective(prep: lp._Prepared) -> tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in prep.col_cost)


def _decomposition_from_point(
    point: tuple[Fraction, ...], ids: tuple[int, ...], basis: str
) -> Decomposition:
    weights = {ids[j]: v for j, v in enumerate(point) if v != 0}
    dets = enumerate_deterministic()
    cost = sum(
        (w * dets[i].cost_bits for i, w in weights.items()), Fraction(0)
    )
    return Decomposition(weights=weights, basis_kind=basis, cost=cost)


def _solve_cost(box: Box, basis: str) -> tuple[lp.LpSolution, lp._Engine | None, tuple[int, ...]]:
    prep, ids = _system_for(basis)
    solution, engine = lp._solve_prepared(prep, box.p, _objective(prep))
    if solution.status == "infeasible":
        if basis == "full256":
            raise RuntimeError("a valid box left the full deterministic hull")
        raise NotInHull("box is not a mixture of the 16-box canonical basis")
    if solution.status != "optimal":
        raise RuntimeError(f"cost program ended {solution.status}")
    return solution, engine, ids


def communication_cost(box: Box, basis: str = "full256") -> CostReport:
    """Minimal expected communicated bits over decompositions in the basis.

    Raises NotInHull when basis="chsh16" and the box lies outside that hull."""
    solution, _, ids = _solve_cost(box, basis)
    assert solution.value is not None
    decomposition = _decomposition_from_point(solution.point, ids, basis)
    if decomposition.cost != solution.value:
        raise RuntimeError("decomposition cost disagrees with program value")
    s = signal(box).s
    lam = chsh(box).lambda_max
    lower = max(Fraction(0), (lam - 2) / 2)
    return CostReport(
        c=solution.value,
        eta=solution.value - s,
        s=s,
        decomposition=decomposition,
        lower_bound=lower,
    )


def eta_star(box: Box, d: int) -> float:
    """Signal deficit against a d-letter channel: c - log2(d).  Approximate:
    this is the one quantity in the package computed in floating point."""
    if d < 2:
        raise BadDimension(f"alphabet dimension must be at least 2, got {d}")
    report = communication_cost(box, basis="full256")
    return float(report.c) - math.log2(d)


def find_distinct_decompositions(
    box: Box, basis: str = "full256"
) -> tuple[Decomposition, Decomposition] | None:
    """Two optimal decompositions with different supports, or None when the
    optimum's support is unique on the optimal face."""
    solution, engine, ids = _solve_cost(box, basis)
    assert solution.value is not None and engine is not None
    prep, _ = _system_for(basis)
    objective = _objective(prep)
    first = _decomposition_from_point(solution.point, ids, basis)
    known = frozenset(j for j, v in enumerate(solution.point) if v != 0)
    other = lp._alternative_from_engine(prep, engine, objective, solution.value, known)
    if other is None:
        return None
    second = _decomposition_from_point(other.point, ids, basis)
    return first, second


def decomposition_to_json_obj(decomposition: Decomposition) -> dict:
    weights = {
        str(i): format_fraction(w) for i, w in sorted(decomposition.weights.items())
    }
    return {
        "basis": decomposition.basis_kind,
        "cost": format_fraction(decomposition.cost),
        "weights": weights,
    }
