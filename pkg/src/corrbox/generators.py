"""Canonical boxes, parametric families, and seeded samplers.

The canonical basis is 16 named deterministic boxes: eight zero-bit ones
(d0_0 .. d7_0) and eight one-bit ones (d0_1 .. d7_1), plus the derived names
"pr" (the even mixture of d0_1 and d3_1) and "noise" (uniform outcomes).
Samplers draw Fractions from a seeded random.Random stream, so a family
spec plus a count pins the exact boxes; shorter runs are prefixes of longer
ones.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import cos, pi

from .boxes import (
    Box,
    DeterministicBox,
    box_from_table,
    enumerate_deterministic,
    mix,
    relabel,
    relabeling_group,
)

FAMILY_KINDS = ("general", "chsh16_mixture", "oneway_slice", "no_signaling")


class UnknownName(ValueError):
    """No canonical box has this name."""


class BadParameter(ValueError):
    """A family parameter is outside its allowed range."""


# Output tables indexed by setting pair (0,0), (0,1), (1,0), (1,1).
_NAMED_TABLES: dict[str, tuple[tuple[int, int, int, int], tuple[int, int, int, int]]] = {
    "d0_0": ((0, 0, 0, 0), (0, 0, 0, 0)),
    "d1_0": ((0, 0, 1, 1), (0, 0, 0, 0)),
    "d2_0": ((0, 0, 0, 0), (1, 0, 1, 0)),
    "d3_0": ((1, 1, 0, 0), (1, 0, 1, 0)),
    "d4_0": ((0, 0, 1, 1), (0, 1, 0, 1)),
    "d5_0": ((1, 1, 1, 1), (0, 1, 0, 1)),
    "d6_0": ((1, 1, 0, 0), (1, 1, 1, 1)),
    "d7_0": ((1, 1, 1, 1), (1, 1, 1, 1)),
    "d0_1": ((0, 0, 0, 0), (0, 0, 1, 0)),
    "d1_1": ((1, 1, 0, 0), (1, 1, 1, 0)),
    "d2_1": ((0, 0, 1, 1), (0, 0, 0, 1)),
    "d3_1": ((1, 1, 1, 1), (1, 1, 0, 1)),
    "d4_1": ((0, 0, 1, 0), (0, 0, 0, 0)),
    "d5_1": ((1, 0, 0, 0), (1, 0, 1, 0)),
    "d6_1": ((0, 1, 1, 1), (0, 1, 0, 1)),
    "d7_1": ((1, 1, 0, 1), (1, 1, 1, 1)),
}

_DERIVED_NAMES = ("pr", "noise")


def canonical_names() -> tuple[str, ...]:
    """The 16 basis names in order, then the derived names pr and noise."""
    return tuple(_NAMED_TABLES) + _DERIVED_NAMES


def _det_for_tables(
    out_a: tuple[int, int, int, int], out_b: tuple[int, int, int, int]
) -> DeterministicBox:
    f_val = 8 * out_a[0] + 4 * out_a[1] + 2 * out_a[2] + out_a[3]
    g_val = 8 * out_b[0] + 4 * out_b[1] + 2 * out_b[2] + out_b[3]
    det = enumerate_deterministic()[16 * f_val + g_val]
    assert det.out_a == out_a and det.out_b == out_b
    return det


@lru_cache(maxsize=1)
def canonical_det_ids() -> tuple[int, ...]:
    """Strategy ids of the 16 named deterministic boxes, in name order."""
    return tuple(
        _det_for_tables(out_a, out_b).id for out_a, out_b in _NAMED_TABLES.values()
    )


def canonical_deterministic(name: str) -> DeterministicBox:
    """The named deterministic box; UnknownName for pr, noise, or anything
    else outside the 16-name basis."""
    try:
        out_a, out_b = _NAMED_TABLES[name]
    except KeyError:
        raise UnknownName(f"no deterministic box named {name!r}") from None
    return _det_for_tables(out_a, out_b)


def canonical(name: str) -> Box:
    """A canonical box by name: the 16 basis names, pr, or noise."""
    if name == "noise":
        return box_from_table([Fraction(1, 4)] * 16)
    if name == "pr":
        half = Fraction(1, 2)
        return mix(
            [
                (half, canonical_deterministic("d0_1").as_box()),
                (half, canonical_deterministic("d3_1").as_box()),
            ]
        )
    return canonical_deterministic(name).as_box()


def isotropic(v: Fraction | int | str) -> Box:
    """Mixture v * pr + (1 - v) * noise for v in [0, 1]."""
    weight = Fraction(v)
    if not 0 <= weight <= 1:
        raise BadParameter(f"isotropic parameter must be in [0, 1], got {weight}")
    if weight == 0:
        return canonical("noise")
    if weight == 1:
        return canonical("pr")
    return mix([(weight, canonical("pr")), (1 - weight, canonical("noise"))])


# Measurement angles that maximize the CHSH value of a quantum box.
TSIRELSON_ANGLES = (0.0, pi / 2, pi / 4, -pi / 4)


def quantum_box(
    angles: tuple[float, float, float, float], approx_denominator: int = 10**6
) -> Box:
    """Correlated box with uniform marginals from measurement angles
    (theta_a0, theta_a1, theta_b0, theta_b1): the correlator at settings
    (a, b) is cos(theta_a - theta_b), rationalized to the denominator bound.

    The result is exact arithmetic on an approximate input: downstream
    quantities are exact for the rationalized box, not for the ideal one."""
    if len(angles) != 4:
        raise BadParameter(f"need two angles per party, got {len(angles)}")
    if approx_denominator < 1:
        raise BadParameter(
            f"denominator bound must be at least 1, got {approx_denominator}"
        )
    entries = []
    for a in range(2):
        for b in range(2):
            e = Fraction(cos(angles[a] - angles[2 + b]))
            e = e.limit_denominator(approx_denominator)
            e = min(max(e, Fraction(-1)), Fraction(1))
            same = (1 + e) / 4
            diff = (1 - e) / 4
            entries.extend([same, diff, diff, same])
    return box_from_table(entries)


@lru_cache(maxsize=1)
def no_signaling_vertices() -> tuple[Box, ...]:
    """The 24 extreme points of the no-signaling polytope: 16 zero-bit
    deterministic boxes (by strategy id) and the 8 relabelings of pr."""
    locals_ = [
        det.as_box() for det in enumerate_deterministic() if det.cost_bits == 0
    ]
    assert len(locals_) == 16
    seen: dict[tuple[Fraction, ...], Box] = {}
    pr = canonical("pr")
    for r in relabeling_group():
        image = relabel(pr, r)
        seen.setdefault(image.p, image)
    prs = [seen[key] for key in sorted(seen)]
    assert len(prs) == 8
    return tuple(locals_ + prs)


@dataclass(frozen=True)
class FamilySpec:
    """A sampling family plus its seed; equal specs sample equal boxes."""

    kind: str
    seed: int

    def __post_init__(self) -> None:
        if self.kind not in FAMILY_KINDS:
            raise BadParameter(
                f"unknown family {self.kind!r}, expected one of {FAMILY_KINDS}"
            )


def _draw_weights(rng: random.Random, count: int) -> list[Fraction]:
    while True:
        raw = [rng.randint(0, 65536) for _ in range(count)]
        total = sum(raw)
        if total > 0:
            return [Fraction(r, total) for r in raw]


def _sample_general(rng: random.Random) -> Box:
    entries: list[Fraction] = []
    for _ in range(4):
        entries.extend(_draw_weights(rng, 4))
    return box_from_table(entries)


def _mixture_over(rng: random.Random, parts: tuple[Box, ...]) -> Box:
    weights = _draw_weights(rng, len(parts))
    return mix(
        [(w, part) for w, part in zip(weights, parts) if w != 0]
    )


@lru_cache(maxsize=1)
def _chsh16_parts() -> tuple[Box, ...]:
    return tuple(canonical(name) for name in canonical_names()[:16])


@lru_cache(maxsize=1)
def _oneway_parts() -> tuple[Box, ...]:
    names = list(canonical_names()[:8]) + ["d0_1", "d1_1", "d2_1", "d3_1"]
    return tuple(canonical(name) for name in names)


def sample(spec: FamilySpec, count: int) -> list[Box]:
    """count boxes drawn from the family; deterministic in (spec, count)."""
    if count < 0:
        raise BadParameter(f"count must be nonnegative, got {count}")
    rng = random.Random(spec.seed)
    out = []
    for _ in range(count):
        if spec.kind == "general":
            out.append(_sample_general(rng))
        elif spec.kind == "chsh16_mixture":
            out.append(_mixture_over(rng, _chsh16_parts()))
        elif spec.kind == "oneway_slice":
            out.append(_mixture_over(rng, _oneway_parts()))
        else:
            out.append(_mixture_over(rng, no_signaling_vertices()))
    return out
