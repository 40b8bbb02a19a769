"""Grid verification of the gadget output bands, in exact rational arithmetic.

Each statement says: if the input rates lie in some decode band, the output
range of the gadget lies in a stated band.  We sample the input bands on a
rational grid and evaluate :func:`gate_output_range` at every point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .circuit import params_from_delta
from .intervals import UnitInterval, gate_output_range
from .network import to_fraction

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Band:
    lo: Fraction
    hi: Fraction

    def holds(self, X: UnitInterval) -> bool:
        return X.empty or (self.lo <= X.lo and X.hi <= self.hi)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


@dataclass
class ClaimRow:
    gate: str
    statement: str
    inputs: str
    outputs: str
    points: int = 0
    failures: List[Tuple] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.points > 0 and not self.failures

    def to_json(self) -> dict:
        return {"gate": self.gate, "statement": self.statement, "inputs": self.inputs,
                "outputs": self.outputs, "points": self.points, "passed": self.passed,
                "failures": [[str(v) for v in f] for f in self.failures[:5]]}


def grid(lo: Fraction, hi: Fraction, points: int, closed: bool = True) -> List[Fraction]:
    """``points`` evenly spaced rationals in [lo, hi] (or strictly inside if not closed)."""
    if closed:
        if points == 1:
            return [lo]
        return [lo + (hi - lo) * k / (points - 1) for k in range(points)]
    return [lo + (hi - lo) * k / (points + 1) for k in range(1, points + 1)]


def decode_bands(delta: Fraction, points: int):
    zero = grid(Fraction(0), HALF - delta, points)
    one = grid(HALF + delta, Fraction(1), points)
    bot = grid(HALF - delta, HALF + delta, points, closed=False)
    return zero, one, bot


def _pairs(xs: Sequence[Fraction], ys: Sequence[Fraction], total: int):
    """About ``total`` pairs from xs x ys, on a sub-grid of each."""
    side = max(2, int(round(total ** 0.5)))
    xs_sub = xs[:: max(1, len(xs) // side)][:side] + [xs[-1]]
    ys_sub = ys[:: max(1, len(ys) // side)][:side] + [ys[-1]]
    return [(x, y) for x in xs_sub for y in ys_sub]


def _run(row: ClaimRow, gate: str, samples, delta, eps,
         check: Callable[[Tuple[UnitInterval, ...]], bool]) -> ClaimRow:
    for inputs in samples:
        out = gate_output_range(gate, inputs, delta, eps)
        row.points += 1
        if not check(out):
            row.failures.append(tuple(inputs) + tuple(out))
    return row


def check_claims(delta=Fraction(2, 13), eps: Optional[object] = None, points: int = 1000,
                 simulation: bool = True) -> List[ClaimRow]:
    """Check every gadget statement on ``points`` grid inputs per decode band.

    With ``simulation`` each statement is also checked against the wider
    band of half-width (1+8δ)/(2δ)·ε used to choose δ.
    """
    d = to_fraction(delta)
    e = params_from_delta(d).epsilon if eps is None else to_fraction(eps)
    zero, one, bot = decode_bands(d, points)
    everything = zero + bot + one
    k_not = (1 + 10 * d) / (4 * d) * e
    k_or = (1 + 8 * d) / (2 * d) * e
    k_v = (1 + 4 * d) / (2 * d) * e
    k_w = (1 + 2 * d) / (2 * d) * e

    def low(k):
        return Band(Fraction(0), min(k, Fraction(1)))

    def high(k):
        return Band(max(1 - k, Fraction(0)), Fraction(1))

    def one_out(band):
        return lambda out: band.holds(out[0])

    def both(bv, bw):
        return lambda out: bv.holds(out[0]) and bw.holds(out[1])

    def either(bv, bw):
        return lambda out: bv.holds(out[0]) or bw.holds(out[1])

    singles = lambda xs: [(x,) for x in xs]
    or_one = _pairs(one, everything, points) + _pairs(everything, one, points)
    or_zero = _pairs(zero, zero, points)

    statements = [
        ("NOT", "1", "u in 0-band", high(k_not), singles(zero), "NOT", None),
        ("NOT", "2", "u in 1-band", low(k_not), singles(one), "NOT", None),
        ("OR", "1", "u or v in 1-band", high(k_not), or_one, "OR", None),
        ("OR", "2", "u, v in 0-band", low(k_or), or_zero, "OR", None),
        ("PURIFY", "1", "u in 0-band", (low(k_v), low(k_w)), singles(zero), "PURIFY", both),
        ("PURIFY", "2", "u in 1-band", (high(k_v), high(k_w)), singles(one), "PURIFY", both),
        ("PURIFY", "3", "u in ⊥-band", (high(k_v), low(k_w)), singles(bot), "PURIFY", either),
    ]
    rows = []
    for gate, st, desc, bands, samples, kind, combine in statements:
        if combine is None:
            rows.append(_run(ClaimRow(gate, st, desc, f"w in {bands}"), kind, samples, d, e,
                             one_out(bands)))
        else:
            bv, bw = bands
            word = "and" if combine is both else "or"
            rows.append(_run(ClaimRow(gate, st, desc, f"v in {bv} {word} w in {bw}"), kind,
                             samples, d, e, combine(bv, bw)))
        if simulation:
            sim_low, sim_high = low(k_or), high(k_or)
            if combine is None:
                target = sim_high if bands.lo > 0 else sim_low
                rows.append(_run(ClaimRow(gate, st + "s", desc, f"w in {target}"), kind,
                                 samples, d, e, one_out(target)))
            else:
                bv, bw = bands
                tv = sim_high if bv.lo > 0 else sim_low
                tw = sim_high if bw.lo > 0 else sim_low
                word = "and" if combine is both else "or"
                rows.append(_run(ClaimRow(gate, st + "s", desc, f"v in {tv} {word} w in {tw}"),
                                 kind, samples, d, e, combine(tv, tw)))
    return rows


def format_table(rows: Sequence[ClaimRow]) -> str:
    lines = [f"{'gate':7} {'stmt':5} {'inputs':17} {'points':>6}  result  outputs"]
    for r in rows:
        lines.append(f"{r.gate:7} {r.statement:5} {r.inputs:17} {r.points:>6}  "
                     f"{'ok' if r.passed else 'FAIL':6}  {r.outputs}")
    return "\n".join(lines)
