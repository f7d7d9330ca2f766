"""Exact rational linear programming.

Minimize c.x subject to A x = b, x >= 0, with every coefficient a Fraction.
The solver is a revised simplex with Bland's rule, run fraction-free: the
basis inverse is carried as an integer adjugate matrix M with determinant
delta, so every tableau quantity is an exact integer and every status comes
with a checkable certificate.  Systems whose matrix entries are all 0/1 (the
deterministic-strategy systems this package mostly solves) run on int64 numpy
kernels; anything else, or anything approaching the int64 range, runs on
arbitrary-precision Python integers.

Update rule per pivot (entering column j, pivot row p, w = M a_j):
    delta' = w_p,   M'_p = M_p,   M'_i = (w_p M_i - w_i M_p) / delta
The division is exact (Sylvester's identity); the solver asserts zero
remainders, which doubles as an overflow trip-wire, and re-substitutes every
optimal point into A x = b before returning it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

_ITERATION_CAP = 50000
# Steepest-descent pricing for this many pivots, then Bland's rule, whose
# first-index selection provably terminates from any basis.
_BLAND_AFTER = 200
# Escalate int64 -> bigint when the adjugate outgrows this.  With a 0/1
# matrix, m <= 16 rows and |M| below the bound, every intermediate product
# stays under 2**61.
_MAT_MAX_INT64 = 2**28


class DimensionMismatch(ValueError):
    """Matrix, rhs, and objective shapes disagree."""


@dataclass(frozen=True)
class LinearProgram:
    """Equality-form program: minimize objective.x with A x = rhs, x >= 0."""

    constraint_matrix: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    objective: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        m = len(self.constraint_matrix)
        if m == 0:
            raise DimensionMismatch("no constraint rows")
        n = len(self.constraint_matrix[0])
        if n == 0:
            raise DimensionMismatch("no columns")
        for i, row in enumerate(self.constraint_matrix):
            if len(row) != n:
                raise DimensionMismatch(f"row {i} has {len(row)} entries, expected {n}")
        if len(self.rhs) != m:
            raise DimensionMismatch(f"rhs has {len(self.rhs)} entries, expected {m}")
        if len(self.objective) != n:
            raise DimensionMismatch(
                f"objective has {len(self.objective)} entries, expected {n}"
            )


@dataclass(frozen=True)
class LpSolution:
    """status is one of optimal / infeasible / unbounded.

    value and basis are present only when optimal.  certificate carries a
    Farkas vector (infeasible: y.A <= 0 and y.rhs > 0) or a ray (unbounded:
    A ray = 0, ray >= 0, objective.ray < 0).
    """

    status: str
    value: Fraction | None
    point: tuple[Fraction, ...]
    basis: tuple[int, ...] | None
    certificate: tuple[Fraction, ...] | None = None


@dataclass
class _Prepared:
    """Integerized column system, reusable across solves with varying rhs."""

    m: int
    n: int
    a_int: np.ndarray  # (m, n); row i of the original matrix times row_scale[i]
    col_cost: list[int]
    cost_den: int
    row_scale: tuple[Fraction, ...]
    int_mode: bool


def _lcm_of(denominators: Iterable[int]) -> int:
    out = 1
    for d in denominators:
        out = math.lcm(out, d)
    return out


def _prepare_program(program: LinearProgram) -> _Prepared:
    m = len(program.constraint_matrix)
    n = len(program.constraint_matrix[0])
    rows = []
    scales = []
    for i, row in enumerate(program.constraint_matrix):
        k = _lcm_of(x.denominator for x in row)
        sign = -1 if program.rhs[i] < 0 else 1
        scales.append(Fraction(sign * k))
        rows.append([sign * int(x * k) for x in row])
    cost_den = _lcm_of(x.denominator for x in program.objective)
    col_cost = [int(x * cost_den) for x in program.objective]
    int_mode = (
        m <= 16
        and all(v in (0, 1) for row in rows for v in row)
        and max(abs(c) for c in col_cost) <= 2**20
    )
    a_int = np.array(rows, dtype=np.int64 if int_mode else object)
    return _Prepared(
        m=m,
        n=n,
        a_int=a_int,
        col_cost=col_cost,
        cost_den=cost_den,
        row_scale=tuple(scales),
        int_mode=int_mode,
    )


def _prepare_int01(columns: np.ndarray, costs: Sequence[int]) -> _Prepared:
    """Prepared system for a 0/1 integer matrix given directly.

    Callers guarantee a nonnegative rhs at solve time."""
    m, n = columns.shape
    int_mode = m <= 16 and max(abs(int(c)) for c in costs) <= 2**20
    return _Prepared(
        m=m,
        n=n,
        a_int=columns.astype(np.int64 if int_mode else object),
        col_cost=[int(c) for c in costs],
        cost_den=1,
        row_scale=tuple(Fraction(1) for _ in range(m)),
        int_mode=int_mode,
    )


class _Engine:
    """One solve: two-phase fraction-free simplex over a prepared system."""

    def __init__(self, prep: _Prepared, rhs: Sequence[Fraction]):
        if len(rhs) != prep.m:
            raise DimensionMismatch(f"rhs has {len(rhs)} entries, expected {prep.m}")
        self.prep = prep
        self.m = prep.m
        self.n = prep.n
        self.int_mode = prep.int_mode
        self.a = prep.a_int
        scaled = [rhs[i] * prep.row_scale[i] for i in range(prep.m)]
        if any(v < 0 for v in scaled):
            raise ValueError("rhs negative after row scaling")
        self.den = _lcm_of(v.denominator for v in scaled)
        self.b_num = [int(v * self.den) for v in scaled]
        self.basis = [prep.n + i for i in range(prep.m)]  # artificials first
        eye = np.eye(prep.m, dtype=np.int64)
        self.mat = eye if self.int_mode else eye.astype(object)
        self.mat_max = 1
        self.delta = 1
        self.xi = list(self.b_num)  # M @ b_num, exact Python ints
        self.inert = [False] * prep.m  # redundant rows, permanently zero

    # -- arithmetic kernels ------------------------------------------------

    def _escalate(self) -> None:
        if self.int_mode:
            self.mat = self.mat.astype(object)
            self.a = self.a.astype(object)
            self.int_mode = False

    def _entering_w(self, j: int) -> np.ndarray:
        if self.int_mode and self.mat_max >= _MAT_MAX_INT64:
            self._escalate()
        return self.mat @ self.a[:, j]

    def _pivot(self, j: int, p: int, w: np.ndarray) -> None:
        wp = int(w[p])
        if wp == 0:
            raise RuntimeError("zero pivot element")
        numer = wp * self.mat - np.outer(w, self.mat[p])
        if (numer % self.delta != 0).any():
            raise RuntimeError("inexact division in basis update")
        new_mat = numer // self.delta
        new_mat[p] = self.mat[p]
        self.mat = new_mat
        if self.int_mode:
            self.mat_max = int(np.abs(self.mat).max())
        xi_p = self.xi[p]
        for i in range(self.m):
            if i == p:
                continue
            q, r = divmod(wp * self.xi[i] - int(w[i]) * xi_p, self.delta)
            if r != 0:
                raise RuntimeError("inexact division in rhs update")
            self.xi[i] = q
        self.delta = wp
        self.basis[p] = j

    def _cost_basis(self, col_cost: Sequence[int] | None) -> np.ndarray:
        # col_cost None means phase 1: artificials cost 1, columns cost 0.
        out = []
        for jb in self.basis:
            if jb >= self.n:
                out.append(1 if col_cost is None else 0)
            else:
                out.append(0 if col_cost is None else col_cost[jb])
        return np.array(out, dtype=np.int64 if self.int_mode else object)

    def _reduced(self, col_cost: Sequence[int] | None) -> np.ndarray:
        """delta-scaled reduced costs of the structural columns."""
        yhat = self._cost_basis(col_cost) @ self.mat
        ata = self.a.T @ yhat
        if col_cost is None:
            return -ata
        cc = np.array(col_cost, dtype=np.int64 if self.int_mode else object)
        return cc * self.delta - ata

    # -- simplex loop ------------------------------------------------------

    def _ratio_row(self, w: np.ndarray) -> int | None:
        """Bland leaving row: minimum ratio, ties by smallest basis index."""
        sgn = 1 if self.delta > 0 else -1
        best: tuple[int, int] | None = None  # (xi_pos, w_pos) of best row
        best_row = -1
        for i in range(self.m):
            if self.inert[i]:
                continue
            w_pos = sgn * int(w[i])
            if w_pos <= 0:
                continue
            xi_pos = sgn * self.xi[i]
            if best is None:
                better = True
            else:
                lhs = xi_pos * best[1]
                rhs = best[0] * w_pos
                better = lhs < rhs or (
                    lhs == rhs and self.basis[i] < self.basis[best_row]
                )
            if better:
                best = (xi_pos, w_pos)
                best_row = i
        return None if best is None else best_row

    def _loop(
        self, col_cost: Sequence[int] | None, allowed: np.ndarray | None = None
    ) -> tuple[str, int | None, np.ndarray | None]:
        """Pivot to optimality or unboundedness for one objective."""
        for iteration in range(_ITERATION_CAP):
            sgn = 1 if self.delta > 0 else -1
            reduced = self._reduced(col_cost) * sgn
            neg = np.asarray(reduced < 0)
            if allowed is not None:
                neg &= allowed
            candidates = np.flatnonzero(neg)
            if len(candidates) == 0:
                return "optimal", None, None
            if iteration < _BLAND_AFTER:
                # argmin takes the first minimum, so ties stay deterministic
                j = int(candidates[int(np.argmin(reduced[candidates]))])
            else:
                j = int(candidates[0])
            w = self._entering_w(j)
            p = self._ratio_row(w)
            if p is None:
                return "unbounded", j, w
            self._pivot(j, p, w)
        raise RuntimeError("simplex iteration cap exceeded")

    def _drive_out_artificials(self) -> None:
        for p in range(self.m):
            if self.basis[p] < self.n:
                continue
            if self.xi[p] != 0:
                raise RuntimeError("artificial basic at nonzero value")
            row = self.mat[p] @ self.a
            pivots = np.flatnonzero(np.asarray(row != 0))
            if len(pivots) == 0:
                # Redundant constraint row: inert from here on.  Its M row
                # only ever gets rescaled, so it stays orthogonal to every
                # column and never blocks a pivot.
                self.inert[p] = True
                continue
            j = int(pivots[0])
            self._pivot(j, p, self._entering_w(j))

    # -- runs --------------------------------------------------------------

    def run_two_phase(self) -> tuple[str, int | None, np.ndarray | None]:
        status, _, _ = self._loop(None)
        if status != "optimal":
            raise RuntimeError("phase 1 cannot be unbounded")
        if any(self.xi[i] != 0 for i in range(self.m) if self.basis[i] >= self.n):
            return "infeasible", None, None
        self._drive_out_artificials()
        return self._loop(self.prep.col_cost)

    def reoptimize(self, col_cost: Sequence[int], allowed: np.ndarray) -> None:
        """Continue from an optimal state under a new objective, entering only
        through an allowed column set.  The caller guarantees boundedness."""
        status, _, _ = self._loop(col_cost, allowed)
        if status != "optimal":
            raise RuntimeError("restricted reoptimization became unbounded")

    # -- extraction --------------------------------------------------------

    def point(self) -> list[Fraction]:
        x = [Fraction(0)] * self.n
        for i, jb in enumerate(self.basis):
            if jb < self.n:
                x[jb] = Fraction(self.xi[i], self.den * self.delta)
        return x

    def structural_basis(self) -> tuple[int, ...]:
        return tuple(sorted(jb for jb in self.basis if jb < self.n))

    def check_basic_state(self) -> None:
        """Integer re-substitution of the current basic solution."""
        for i in range(self.m):
            if self.xi[i] != 0 and (self.xi[i] < 0) != (self.delta < 0):
                raise RuntimeError("negative coordinate in solver state")
        for r in range(self.m):
            total = 0
            for i, jb in enumerate(self.basis):
                if jb < self.n and self.xi[i] != 0:
                    total += int(self.a[r, jb]) * self.xi[i]
            if total != self.b_num[r] * self.delta:
                raise RuntimeError("solver state fails re-substitution")

    def check_point(self, x: Sequence[Fraction]) -> None:
        support = [j for j in range(self.n) if x[j] != 0]
        if any(x[j] < 0 for j in support):
            raise RuntimeError("negative coordinate in solver output")
        for i in range(self.m):
            total = sum((Fraction(int(self.a[i, j])) * x[j] for j in support), Fraction(0))
            if total != Fraction(self.b_num[i], self.den):
                raise RuntimeError("solver output fails re-substitution")

    def farkas_certificate(self) -> tuple[Fraction, ...]:
        yhat = self._cost_basis(None) @ self.mat
        return tuple(
            Fraction(int(yhat[i]), self.delta) * self.prep.row_scale[i]
            for i in range(self.m)
        )

    def ray_certificate(self, j: int, w: np.ndarray) -> tuple[Fraction, ...]:
        ray = [Fraction(0)] * self.n
        ray[j] = Fraction(1)
        for i, jb in enumerate(self.basis):
            if jb < self.n:
                ray[jb] = -Fraction(int(w[i]), self.delta)
        return tuple(ray)

    def zero_reduced_mask(self, col_cost: Sequence[int]) -> np.ndarray:
        return np.asarray(self._reduced(col_cost) == 0)


def _value_of(objective: Sequence[Fraction], x: Sequence[Fraction]) -> Fraction:
    return sum((objective[j] * x[j] for j in range(len(x)) if x[j] != 0), Fraction(0))


def _solve_prepared(
    prep: _Prepared, rhs: Sequence[Fraction], objective: Sequence[Fraction]
) -> tuple[LpSolution, _Engine | None]:
    engine = _Engine(prep, rhs)
    status, j, w = engine.run_two_phase()
    if status == "infeasible":
        solution = LpSolution(
            status="infeasible",
            value=None,
            point=(),
            basis=None,
            certificate=engine.farkas_certificate(),
        )
        return solution, None
    if status == "unbounded":
        assert j is not None and w is not None
        solution = LpSolution(
            status="unbounded",
            value=None,
            point=(),
            basis=None,
            certificate=engine.ray_certificate(j, w),
        )
        return solution, None
    engine.check_basic_state()
    x = engine.point()
    solution = LpSolution(
        status="optimal",
        value=_value_of(objective, x),
        point=tuple(x),
        basis=engine.structural_basis(),
    )
    return solution, engine


def solve(program: LinearProgram) -> LpSolution:
    """Exact two-phase simplex; deterministic in its input."""
    prep = _prepare_program(program)
    solution, _ = _solve_prepared(prep, program.rhs, program.objective)
    return solution


def _support(x: Sequence[Fraction]) -> frozenset[int]:
    return frozenset(j for j, v in enumerate(x) if v != 0)


def _alternative_from_engine(
    prep: _Prepared,
    engine: _Engine,
    objective: Sequence[Fraction],
    opt_value: Fraction,
    known_support: frozenset[int],
) -> LpSolution | None:
    """Search the optimal face for a basic solution with different support.

    Stage 1: minimize the total weight on the known support, entering only
    through zero-reduced-cost columns (they span the optimal face).  Stage 2:
    single pivots along zero-reduced-cost columns from the resulting vertex.
    """
    face = engine.zero_reduced_mask(prep.col_cost)
    overlap_cost = [1 if j in known_support else 0 for j in range(prep.n)]
    engine.reoptimize(overlap_cost, face)
    x2 = engine.point()
    engine.check_point(x2)
    if _value_of(objective, x2) != opt_value:
        raise RuntimeError("optimal-face search left the optimal face")
    if _support(x2) != known_support:
        return LpSolution(
            status="optimal",
            value=opt_value,
            point=tuple(x2),
            basis=engine.structural_basis(),
        )
    face = engine.zero_reduced_mask(prep.col_cost)
    basic = set(engine.basis)
    for j in np.flatnonzero(face):
        j = int(j)
        if j in basic:
            continue
        w = engine._entering_w(j)
        p = engine._ratio_row(w)
        if p is None:
            continue
        theta = Fraction(engine.xi[p], engine.den * int(w[p]))
        if theta == 0:
            continue
        x3 = engine.point()
        for i, jb in enumerate(engine.basis):
            if jb < prep.n:
                x3[jb] -= theta * Fraction(int(w[i]), engine.delta)
        x3[j] = theta
        if _support(x3) == known_support:
            continue
        engine.check_point(x3)
        if _value_of(objective, x3) != opt_value:
            raise RuntimeError("optimal-face pivot left the optimal face")
        basis = sorted(
            [jb for jb in engine.basis if jb < prep.n and jb != engine.basis[p]] + [j]
        )
        return LpSolution(
            status="optimal",
            value=opt_value,
            point=tuple(x3),
            basis=tuple(basis),
        )
    return None


def find_alternative_vertex(program: LinearProgram, known: LpSolution) -> LpSolution | None:
    """A second optimal basic solution whose support differs from known's,
    or None when the search over the optimal face finds none."""
    if known.status != "optimal":
        return None
    prep = _prepare_program(program)
    solution, engine = _solve_prepared(prep, program.rhs, program.objective)
    if solution.status != "optimal" or engine is None:
        return None
    assert solution.value is not None
    return _alternative_from_engine(
        prep, engine, program.objective, solution.value, _support(known.point)
    )
