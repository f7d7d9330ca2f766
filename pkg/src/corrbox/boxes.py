"""Core types for two-input two-output bipartite correlation boxes.

A box is the conditional distribution P(A, B | a, b) with all four variables
binary.  Entries are stored as a flat tuple of 16 exact rationals indexed by
8*a + 4*b + 2*A + B, i.e. grouped into four setting columns (a, b) in the order
(0,0), (0,1), (1,0), (1,1), each column holding the four outcomes (A, B) in the
order (0,0), (0,1), (1,0), (1,1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence


class NegativeEntry(ValueError):
    """A probability entry is negative."""


class NotNormalized(ValueError):
    """A setting column does not sum to exactly 1."""


class BadWeights(ValueError):
    """Mixture weights are negative, empty, or do not sum to exactly 1."""


_ONE = Fraction(1)


def cell_index(a: int, b: int, out_a: int, out_b: int) -> int:
    """Flat index of the cell P(out_a, out_b | a, b)."""
    return 8 * a + 4 * b + 2 * out_a + out_b


def _to_fraction(value: object) -> Fraction:
    if isinstance(value, float):
        raise TypeError("float entries are not accepted; pass exact rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_fraction(x: Fraction) -> str:
    """Lowest-terms num/den string, e.g. 1/2, 0/1, 3/1."""
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


@dataclass(frozen=True)
class Box:
    """An exact correlation box.  Invariants checked on construction."""

    p: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.p) != 16:
            raise ValueError(f"a box needs 16 entries, got {len(self.p)}")
        for i, value in enumerate(self.p):
            if not isinstance(value, Fraction):
                raise TypeError(f"entry {i} is {type(value).__name__}, not Fraction")
            if value < 0:
                raise NegativeEntry(f"entry {i} is negative: {value}")
        for setting in range(4):
            column = self.p[4 * setting : 4 * setting + 4]
            total = sum(column)
            if total != _ONE:
                raise NotNormalized(
                    f"setting column {setting} sums to {total}, expected 1"
                )

    def prob(self, a: int, b: int, out_a: int, out_b: int) -> Fraction:
        return self.p[cell_index(a, b, out_a, out_b)]

    def setting_column(self, a: int, b: int) -> tuple[Fraction, ...]:
        base = 8 * a + 4 * b
        return self.p[base : base + 4]

    def marginal_a(self, a: int, b: int) -> Fraction:
        """P(A = 0 | a, b)."""
        base = 8 * a + 4 * b
        return self.p[base] + self.p[base + 1]

    def marginal_b(self, a: int, b: int) -> Fraction:
        """P(B = 0 | a, b)."""
        base = 8 * a + 4 * b
        return self.p[base] + self.p[base + 2]

    def expectation(self, a: int, b: int) -> Fraction:
        """Correlator E(a, b) under the outcome sign convention x -> (-1)^x."""
        base = 8 * a + 4 * b
        return self.p[base] - self.p[base + 1] - self.p[base + 2] + self.p[base + 3]


def box_from_table(entries: Sequence[object]) -> Box:
    """Build a validated Box from 16 rationals (int, str, or Fraction)."""
    return Box(tuple(_to_fraction(e) for e in entries))


def mix(terms: Iterable[tuple[object, Box]]) -> Box:
    """Convex mixture of boxes.  Weights must be exact and sum to 1."""
    pairs = [(_to_fraction(w), box) for w, box in terms]
    if not pairs:
        raise BadWeights("empty mixture")
    for w, _ in pairs:
        if w < 0:
            raise BadWeights(f"negative weight {w}")
    total = sum(w for w, _ in pairs)
    if total != _ONE:
        raise BadWeights(f"weights sum to {total}, expected 1")
    cells = [Fraction(0)] * 16
    for w, box in pairs:
        if w == 0:
            continue
        for i in range(16):
            cells[i] += w * box.p[i]
    return Box(tuple(cells))


class Direction(Enum):
    """Which way a deterministic strategy needs its inputs forwarded."""

    NONE = "none"
    A_TO_B = "AtoB"
    B_TO_A = "BtoA"
    BOTH = "both"


@dataclass(frozen=True)
class DeterministicBox:
    """A deterministic strategy: output tables over the four settings.

    out_a[k] and out_b[k] give the outputs at setting k = 2*a + b.  The id
    packs both tables as 16 * value(out_a) + value(out_b), where value() reads
    the table as a 4-bit number with setting (0,0) in the most significant bit.
    """

    id: int
    out_a: tuple[int, int, int, int]
    out_b: tuple[int, int, int, int]
    cost_bits: int
    direction: Direction

    def as_box(self) -> Box:
        cells = [Fraction(0)] * 16
        for a in range(2):
            for b in range(2):
                k = 2 * a + b
                cells[cell_index(a, b, self.out_a[k], self.out_b[k])] = Fraction(1)
        return Box(tuple(cells))


def _classify_tables(
    out_a: tuple[int, int, int, int], out_b: tuple[int, int, int, int]
) -> tuple[int, Direction]:
    a_depends_on_b = out_a[0] != out_a[1] or out_a[2] != out_a[3]
    b_depends_on_a = out_b[0] != out_b[2] or out_b[1] != out_b[3]
    cost = int(a_depends_on_b) + int(b_depends_on_a)
    if a_depends_on_b and b_depends_on_a:
        direction = Direction.BOTH
    elif b_depends_on_a:
        direction = Direction.A_TO_B
    elif a_depends_on_b:
        direction = Direction.B_TO_A
    else:
        direction = Direction.NONE
    return cost, direction


def classify(d: DeterministicBox) -> tuple[int, Direction]:
    """Communication bits and direction needed by a strategy's output tables."""
    return _classify_tables(d.out_a, d.out_b)


def _table_bits(value: int) -> tuple[int, int, int, int]:
    return ((value >> 3) & 1, (value >> 2) & 1, (value >> 1) & 1, value & 1)


@lru_cache(maxsize=1)
def enumerate_deterministic() -> tuple[DeterministicBox, ...]:
    """All 256 deterministic strategies, indexed by id."""
    out = []
    for fa in range(16):
        for gb in range(16):
            out_a = _table_bits(fa)
            out_b = _table_bits(gb)
            cost, direction = _classify_tables(out_a, out_b)
            out.append(
                DeterministicBox(
                    id=16 * fa + gb,
                    out_a=out_a,
                    out_b=out_b,
                    cost_bits=cost,
                    direction=direction,
                )
            )
    return tuple(out)


def is_no_signaling(box: Box) -> bool:
    """True iff each party's marginal is independent of the other's setting."""
    for a in range(2):
        if box.marginal_a(a, 0) != box.marginal_a(a, 1):
            return False
    for b in range(2):
        if box.marginal_b(0, b) != box.marginal_b(1, b):
            return False
    return True


@dataclass(frozen=True)
class Relabeling:
    """A symmetry of the box scenario.

    Applied as: optionally swap the parties, then flip inputs, then flip each
    party's outcome conditioned on that party's (pre-flip) input.  flip_out_a
    is indexed by the source setting of the first party, flip_out_b by the
    source setting of the second.
    """

    swap: bool
    flip_a: int
    flip_b: int
    flip_out_a: tuple[int, int]
    flip_out_b: tuple[int, int]

    def permutation(self) -> tuple[int, ...]:
        """perm[new_cell] = source_cell in the original box."""
        perm = [0] * 16
        for a in range(2):
            for b in range(2):
                a0 = a ^ self.flip_a
                b0 = b ^ self.flip_b
                for out_a in range(2):
                    for out_b in range(2):
                        oa = out_a ^ self.flip_out_a[a0]
                        ob = out_b ^ self.flip_out_b[b0]
                        if self.swap:
                            src = cell_index(b0, a0, ob, oa)
                        else:
                            src = cell_index(a0, b0, oa, ob)
                        perm[cell_index(a, b, out_a, out_b)] = src
        return tuple(perm)

    def inverse(self) -> "Relabeling":
        perm = self.permutation()
        inv = [0] * 16
        for i, j in enumerate(perm):
            inv[j] = i
        element = _group_by_permutation().get(tuple(inv))
        if element is None:
            raise RuntimeError("relabeling group is not closed under inversion")
        return element


def relabel(box: Box, r: Relabeling) -> Box:
    perm = r.permutation()
    return Box(tuple(box.p[perm[i]] for i in range(16)))


@lru_cache(maxsize=1)
def relabeling_group() -> tuple[Relabeling, ...]:
    """All distinct scenario symmetries (deduplicated by cell permutation)."""
    seen: dict[tuple[int, ...], Relabeling] = {}
    bits = (0, 1)
    pairs = tuple(itertools.product(bits, bits))
    for swap in (False, True):
        for flip_a in bits:
            for flip_b in bits:
                for foa in pairs:
                    for fob in pairs:
                        r = Relabeling(swap, flip_a, flip_b, foa, fob)
                        seen.setdefault(r.permutation(), r)
    return tuple(seen.values())


@lru_cache(maxsize=1)
def _group_by_permutation() -> dict[tuple[int, ...], Relabeling]:
    return {r.permutation(): r for r in relabeling_group()}


def box_to_json_obj(box: Box) -> dict:
    """Serializable form: four setting columns of four num/den strings."""
    return {
        "format": "box-v1",
        "p": [
            [format_fraction(x) for x in box.setting_column(a, b)]
            for a in range(2)
            for b in range(2)
        ],
    }


def box_from_json_obj(obj: object) -> Box:
    """Parse and validate the box-v1 JSON object form."""
    if not isinstance(obj, dict):
        raise ValueError("box JSON must be an object")
    if obj.get("format") != "box-v1":
        raise ValueError(f"unsupported box format: {obj.get('format')!r}")
    columns = obj.get("p")
    if not isinstance(columns, list) or len(columns) != 4:
        raise ValueError("box JSON needs a 'p' list of 4 setting columns")
    cells: list[object] = []
    for column in columns:
        if not isinstance(column, list) or len(column) != 4:
            raise ValueError("each setting column needs 4 outcome entries")
        cells.extend(column)
    return box_from_table(cells)
