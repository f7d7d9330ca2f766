"""Exact scalar measures on correlation boxes.

All quantities are Fractions computed without tolerances:

* chsh: the four one-minus-sign correlator sums (in absolute value) and their
  maximum; the maximum also covers the sign-reversed functionals.
* signal: how much each party's marginal moves with the other party's input.
* unpredictability: the guessing-residual of the outcomes, in two variants.
* uncertainty: per-party, per-setting guessing residuals and their maxima.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .boxes import Box

_HALF = Fraction(1, 2)

UNPREDICTABILITY_VARIANTS = ("formula", "per_party")


@dataclass(frozen=True)
class ChshReport:
    """values[k]: |sum of the four correlators with a minus on term k|,
    terms ordered E(0,0), E(0,1), E(1,0), E(1,1).  lambda_max = max(values)."""

    values: tuple[Fraction, Fraction, Fraction, Fraction]
    lambda_max: Fraction


@dataclass(frozen=True)
class SignalReport:
    s_a_to_b: Fraction
    s_b_to_a: Fraction
    s: Fraction


@dataclass(frozen=True)
class UncertaintyReport:
    """delta[(party, setting)]: best-case guessing residual of that party's
    outcome at that setting, maximized over the other party's input.  u_a and
    u_b take the worse (larger) of the two settings for each party."""

    delta: dict[tuple[str, int], Fraction]
    u_a: Fraction
    u_b: Fraction


def chsh(box: Box) -> ChshReport:
    e = [box.expectation(a, b) for a in range(2) for b in range(2)]
    total = sum(e)
    values = tuple(abs(total - 2 * e[k]) for k in range(4))
    return ChshReport(values=values, lambda_max=max(values))


def signal(box: Box) -> SignalReport:
    s_a_to_b = max(
        abs(box.marginal_b(0, b) - box.marginal_b(1, b)) for b in range(2)
    )
    s_b_to_a = max(
        abs(box.marginal_a(a, 0) - box.marginal_a(a, 1)) for a in range(2)
    )
    return SignalReport(s_a_to_b=s_a_to_b, s_b_to_a=s_b_to_a, s=max(s_a_to_b, s_b_to_a))


def _residual(p: Fraction) -> Fraction:
    """min(p, 1 - p): the error of the best constant guess for a bit."""
    return min(p, 1 - p)


def unpredictability(box: Box, variant: str = "formula") -> Fraction:
    """Outcome unpredictability of the box.

    formula:   max over settings of the smaller party-residual there.
    per_party: max over parties of that party's worst-setting residual; this
               always dominates the formula variant.
    """
    if variant not in UNPREDICTABILITY_VARIANTS:
        raise ValueError(f"unknown unpredictability variant: {variant!r}")
    residual_a = {
        (a, b): _residual(box.marginal_a(a, b)) for a in range(2) for b in range(2)
    }
    residual_b = {
        (a, b): _residual(box.marginal_b(a, b)) for a in range(2) for b in range(2)
    }
    if variant == "formula":
        return max(
            min(residual_a[a, b], residual_b[a, b]) for a in range(2) for b in range(2)
        )
    return max(max(residual_a.values()), max(residual_b.values()))


def uncertainty(box: Box) -> UncertaintyReport:
    delta: dict[tuple[str, int], Fraction] = {}
    for a in range(2):
        delta[("A", a)] = max(_residual(box.marginal_a(a, b)) for b in range(2))
    for b in range(2):
        delta[("B", b)] = max(_residual(box.marginal_b(a, b)) for a in range(2))
    return UncertaintyReport(
        delta=delta,
        u_a=max(delta[("A", 0)], delta[("A", 1)]),
        u_b=max(delta[("B", 0)], delta[("B", 1)]),
    )


def lhv_admissible(box: Box) -> bool:
    """True iff the box is explainable by shared randomness alone: no
    signaling and no correlator sum beyond 2."""
    if signal(box).s > 0:
        return False
    return all(v <= 2 for v in chsh(box).values)
