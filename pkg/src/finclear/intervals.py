"""Clamped unit-interval arithmetic for bounding gadget recovery rates.

Intervals built by :func:`pm_number` remember the ball they came from
(center and radius).  Addition and scaling branch on that center, so they
require the provenance; set equality ignores it.  Centers are always stored
clamped into [0, 1]: a ball around x > 1 is the ball around 1, and a ball
around x < 0 is the ball around 0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

from .network import NetworkError, to_fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class IntervalError(NetworkError):
    """Bad operand for an interval operation."""


def clamp01(x: Fraction) -> Fraction:
    return min(ONE, max(ZERO, x))


@dataclass(frozen=True)
class UnitInterval:
    """A closed subinterval of [0, 1], or the empty interval."""

    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    empty: bool = False
    center: Optional[Fraction] = field(default=None, compare=False)
    radius: Optional[Fraction] = field(default=None, compare=False)

    def __post_init__(self):
        if self.empty:
            object.__setattr__(self, "lo", None)
            object.__setattr__(self, "hi", None)
            object.__setattr__(self, "center", None)
            object.__setattr__(self, "radius", None)
            return
        lo, hi = to_fraction(self.lo), to_fraction(self.hi)
        if not (0 <= lo <= hi <= 1):
            raise IntervalError(f"[{lo}, {hi}] is not a subinterval of [0, 1]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if (self.center is None) != (self.radius is None):
            raise IntervalError("center and radius must be given together")
        if self.center is not None:
            object.__setattr__(self, "center", clamp01(to_fraction(self.center)))
            object.__setattr__(self, "radius", to_fraction(self.radius))

    @classmethod
    def empty_interval(cls) -> "UnitInterval":
        return cls(empty=True)

    @classmethod
    def point(cls, x) -> "UnitInterval":
        x = to_fraction(x)
        return cls(x, x)

    @property
    def has_form(self) -> bool:
        return self.center is not None

    def contains(self, x) -> bool:
        return not self.empty and self.lo <= x <= self.hi

    def within(self, other: "UnitInterval") -> bool:
        """Set inclusion; the empty interval is inside everything."""
        if self.empty:
            return True
        return not other.empty and other.lo <= self.lo and self.hi <= other.hi

    def __str__(self):
        return "∅" if self.empty else f"[{self.lo}, {self.hi}]"


def _clip(lo: Fraction, hi: Fraction, center=None, radius=None) -> UnitInterval:
    lo, hi = max(ZERO, lo), min(ONE, hi)
    if lo > hi:
        return UnitInterval.empty_interval()
    return UnitInterval(lo, hi, center=center, radius=radius)


def _positive(eps) -> Fraction:
    eps = to_fraction(eps)
    if eps <= 0:
        raise IntervalError(f"radius must be positive, got {eps}")
    return eps


def pm_number(x, eps) -> UnitInterval:
    """Closed eps-ball around the number x, clipped to [0, 1]."""
    x, eps = to_fraction(x), _positive(eps)
    c = clamp01(x)
    return _clip(c - eps, c + eps, center=c, radius=eps)


def pm_interval(X: UnitInterval, eps) -> UnitInterval:
    """Widen X by eps on both sides and clip; a ball stays a ball."""
    eps = _positive(eps)
    if X.empty:
        return X
    if X.has_form:
        return _clip(X.lo - eps, X.hi + eps, center=X.center, radius=X.radius + eps)
    return _clip(X.lo - eps, X.hi + eps)


def one_minus(X: UnitInterval) -> UnitInterval:
    if X.empty:
        return X
    if X.has_form:
        return UnitInterval(ONE - X.hi, ONE - X.lo, center=ONE - X.center, radius=X.radius)
    return UnitInterval(ONE - X.hi, ONE - X.lo)


def _require_form(*xs: UnitInterval) -> None:
    for X in xs:
        if not X.empty and not X.has_form:
            raise IntervalError("operand must be a ball (built with pm_number) to be added or scaled")


def add(X: UnitInterval, Y: UnitInterval) -> UnitInterval:
    """Sum of two balls, branching on the sum of their centers."""
    if X.empty or Y.empty:
        return UnitInterval.empty_interval()
    _require_form(X, Y)
    s = X.center + Y.center
    rho = X.radius + Y.radius
    if s > 1:
        return _clip(ONE - rho, ONE, center=ONE, radius=rho)
    if s < 0:
        return _clip(ZERO, rho, center=ZERO, radius=rho)
    return _clip(X.lo + Y.lo, X.hi + Y.hi, center=s, radius=rho)


def scale(l, X: UnitInterval) -> UnitInterval:
    """Multiply a ball by l >= 1, branching on the scaled center."""
    l = to_fraction(l)
    if l < 1:
        raise IntervalError(f"scale factor must be >= 1, got {l}")
    if X.empty:
        return X
    _require_form(X)
    c = l * X.center
    rho = l * X.radius
    if c > 1:
        return _clip(ONE - rho, ONE, center=ONE, radius=rho)
    if c < 0:
        return _clip(ZERO, rho, center=ZERO, radius=rho)
    return _clip(l * X.lo, l * X.hi, center=c, radius=rho)


def precedes(X: UnitInterval, Y: UnitInterval) -> bool:
    """inf X <= inf Y and sup X <= sup Y."""
    if X.empty or Y.empty:
        warnings.warn("precedes called with an empty interval", RuntimeWarning, stacklevel=2)
        return False
    return X.lo <= Y.lo and X.hi <= Y.hi


def hull(*xs: UnitInterval) -> UnitInterval:
    parts = [X for X in xs if not X.empty]
    if not parts:
        return UnitInterval.empty_interval()
    return UnitInterval(min(X.lo for X in parts), max(X.hi for X in parts))


# -- gadget output ranges -----------------------------------------------------

Rate = Union[Fraction, int, UnitInterval]


def _chain(rate: Fraction, first: Fraction, second: Fraction, eps: Fraction) -> UnitInterval:
    """Range of a bank fed by a CDS whose reference is fed by a CDS on ``rate``.

    The middle bank receives ``first * (1 - rate)`` against a debt of 1; the
    end bank receives ``second * (1 - middle)`` against a debt of 1.
    """
    middle = pm_number(first * (ONE - rate), eps)
    return pm_interval(scale(second, one_minus(middle)), eps)


def _not_range(r, d, eps):
    r6 = _chain(r, 2 / (1 + 2 * d), (1 + 2 * d) / (4 * d), eps)
    return (pm_interval(one_minus(r6), eps),)


def _or_range(ru, rv, d, eps):
    first, second = 2 / (1 + 2 * d), (1 + 2 * d) / (4 * d)
    r6 = _chain(ru, first, second, eps)
    r12 = _chain(rv, first, second, eps)
    # The output bank receives min(1, p6 + p12) for payments ranging over both
    # chain ranges.  Ball addition would add both radii even when the sum is
    # saturated at 1, which is looser than the set of attainable payments.
    if r6.empty or r12.empty:
        return (UnitInterval.empty_interval(),)
    paid = UnitInterval(min(ONE, r6.lo + r12.lo), min(ONE, r6.hi + r12.hi))
    return (pm_interval(paid, eps),)


def _purify_range(r, d, eps):
    left = _chain(r, 2 / (1 + 2 * d), (1 + 2 * d) / (2 * d), eps)
    r6 = pm_number(2 * (ONE - r), eps)
    right = pm_interval(scale(1 / (2 * d), one_minus(r6)), eps)
    return left, right


_ARITY = {"NOT": 1, "OR": 2, "PURIFY": 1}


def gate_output_range(gate_type: str, inputs: Sequence[Rate], delta, eps) -> Tuple[UnitInterval, ...]:
    """Bound the output rates of a gadget in any eps-approximate clearing vector.

    ``inputs`` are the input banks' rates, each a number or an interval.  For
    intervals the result is the hull over the two endpoints, which is exact
    because every output bound is monotone in each input.  PURIFY returns the
    pair (first output, second output).
    """
    gate_type = gate_type.upper()
    if gate_type not in _ARITY:
        raise IntervalError(f"unknown gate type {gate_type!r}")
    d, eps = to_fraction(delta), to_fraction(eps)
    half = Fraction(1, 2)
    if not (0 < d < half and 0 < eps < half):
        raise IntervalError("delta and eps must lie in (0, 1/2)")
    if len(inputs) != _ARITY[gate_type]:
        raise IntervalError(f"{gate_type} takes {_ARITY[gate_type]} input(s)")
    ends = []
    for x in inputs:
        if isinstance(x, UnitInterval):
            if x.empty:
                raise IntervalError("empty input range")
            ends.append((x.lo,) if x.lo == x.hi else (x.lo, x.hi))
        else:
            x = to_fraction(x)
            if not 0 <= x <= 1:
                raise IntervalError(f"input rate {x} outside [0, 1]")
            ends.append((x,))
    if gate_type == "NOT":
        outs = [_not_range(a, d, eps) for a in ends[0]]
    elif gate_type == "OR":
        outs = [_or_range(a, b, d, eps) for a in ends[0] for b in ends[1]]
    else:
        outs = [_purify_range(a, d, eps) for a in ends[0]]
    if len(outs) == 1:
        return outs[0]
    return tuple(hull(*col) for col in zip(*outs))
