"""Pure-Circuit instances over {0, 1, ⊥}: parsing, checking, solving, decoding."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from decimal import Decimal, localcontext
from enum import IntEnum
from fractions import Fraction
from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .network import NetworkError, decimal_precision, to_fraction

MAX_BRUTE_FORCE_VARS = 20


class CircuitError(NetworkError):
    """Malformed circuit, assignment or gadget parameters."""


class Trit(IntEnum):
    ZERO = 0
    ONE = 1
    BOT = 2

    def __str__(self):
        return "⊥" if self is Trit.BOT else str(int(self))

    @classmethod
    def parse(cls, text) -> "Trit":
        if isinstance(text, Trit):
            return text
        s = str(text).strip()
        table = {"0": cls.ZERO, "1": cls.ONE, "⊥": cls.BOT, "bot": cls.BOT, "BOT": cls.BOT, "_": cls.BOT}
        if s not in table:
            raise CircuitError(f"not a circuit value: {text!r}")
        return table[s]


Assignment = Mapping[str, Trit]

GATE_SHAPE = {"NOT": (1, 1), "OR": (2, 1), "PURIFY": (1, 2)}


@dataclass(frozen=True)
class Gate:
    kind: str
    inputs: Tuple[str, ...]
    outputs: Tuple[str, ...]

    def __post_init__(self):
        if self.kind not in GATE_SHAPE:
            raise CircuitError(f"unknown gate type {self.kind!r}")
        n_in, n_out = GATE_SHAPE[self.kind]
        if len(self.inputs) != n_in or len(self.outputs) != n_out:
            raise CircuitError(f"{self.kind} takes {n_in} input(s) and {n_out} output(s)")
        if self.kind == "PURIFY" and self.outputs[0] == self.outputs[1]:
            raise CircuitError("PURIFY outputs must be distinct")

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.inputs + self.outputs

    def __str__(self):
        return " ".join((self.kind,) + self.variables)

    def satisfied_by(self, x: Assignment) -> bool:
        B = Trit.BOT
        if self.kind == "NOT":
            u, w = x[self.inputs[0]], x[self.outputs[0]]
            if u == B:
                return True
            return w == 1 - u
        if self.kind == "OR":
            u, v = (x[k] for k in self.inputs)
            w = x[self.outputs[0]]
            if u == 1 or v == 1:
                return w == Trit.ONE
            if u == 0 and v == 0:
                return w == Trit.ZERO
            return True
        u = x[self.inputs[0]]
        v, w = (x[k] for k in self.outputs)
        if u == B:
            return v != B or w != B
        return v == u and w == u


@dataclass(frozen=True)
class PureCircuitInstance:
    variables: Tuple[str, ...]
    gates: Tuple[Gate, ...]

    def __post_init__(self):
        variables = tuple(sorted(set(self.variables)))
        known = set(variables)
        seen = set()
        for g in self.gates:
            for v in g.variables:
                if v not in known:
                    raise CircuitError(f"gate {g} uses undeclared variable {v!r}")
            for w in g.outputs:
                if w in seen:
                    raise CircuitError(f"variable {w!r} is the output of two gates")
                seen.add(w)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "gates", tuple(self.gates))

    @classmethod
    def from_gates(cls, gates: Sequence[Gate]) -> "PureCircuitInstance":
        return cls(tuple({v for g in gates for v in g.variables}), tuple(gates))

    @property
    def outputs(self) -> frozenset:
        return frozenset(w for g in self.gates for w in g.outputs)

    @property
    def sources(self) -> Tuple[str, ...]:
        """Variables that are no gate's output."""
        return tuple(v for v in self.variables if v not in self.outputs)

    def to_text(self) -> str:
        return "".join(f"{g}\n" for g in self.gates)


def parse_circuit(text: str) -> PureCircuitInstance:
    """Parse one gate per line: ``NOT u w``, ``OR u v w`` or ``PURIFY u v w``."""
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, *names = line.split()
        kind = kind.upper()
        if kind not in GATE_SHAPE:
            raise CircuitError(f"line {lineno}: unknown gate type {kind!r}")
        n_in, n_out = GATE_SHAPE[kind]
        if len(names) != n_in + n_out:
            raise CircuitError(f"line {lineno}: {kind} needs {n_in + n_out} variables")
        gates.append(Gate(kind, tuple(names[:n_in]), tuple(names[n_in:])))
    return PureCircuitInstance.from_gates(gates)


def _check_total(inst: PureCircuitInstance, x: Assignment) -> Dict[str, Trit]:
    missing = [v for v in inst.variables if v not in x]
    if missing:
        raise CircuitError(f"assignment misses variables {missing}")
    return {v: Trit.parse(x[v]) for v in inst.variables}


def check_satisfies(inst: PureCircuitInstance, x: Assignment) -> Tuple[bool, Optional[Gate]]:
    """Return (all gates satisfied, first violated gate or None)."""
    x = _check_total(inst, x)
    for g in inst.gates:
        if not g.satisfied_by(x):
            return False, g
    return True, None


def all_solutions(inst: PureCircuitInstance) -> Iterator[Dict[str, Trit]]:
    """Every satisfying assignment, in lexicographic order with 0 < 1 < ⊥."""
    if len(inst.variables) > MAX_BRUTE_FORCE_VARS:
        raise CircuitError(f"brute force limited to {MAX_BRUTE_FORCE_VARS} variables")
    for values in itertools.product(tuple(Trit), repeat=len(inst.variables)):
        x = dict(zip(inst.variables, values))
        if all(g.satisfied_by(x) for g in inst.gates):
            yield x


def brute_force_solve(inst: PureCircuitInstance) -> Dict[str, Trit]:
    """First satisfying assignment in lexicographic order (0 < 1 < ⊥)."""
    for x in all_solutions(inst):
        return x
    raise CircuitError("no satisfying assignment")  # impossible: the problem is total


# -- gadget parameters and decoding ----------------------------------------------

@dataclass(frozen=True)
class GadgetParams:
    """Band half-width delta and slack eps with (1+8δ)/(2δ)·ε = 1/2 − δ.

    Exact params hold Fractions and satisfy the equation exactly.  Numeric
    params (Decimal) satisfy it up to the working precision.
    """

    delta: Union[Fraction, Decimal]
    epsilon: Union[Fraction, Decimal]

    def __post_init__(self):
        numeric = isinstance(self.delta, Decimal)
        d = self.delta if numeric else to_fraction(self.delta)
        e = Decimal(self.epsilon) if numeric else to_fraction(self.epsilon)
        if not 0 < d < Fraction(1, 2):
            raise CircuitError(f"delta must lie in (0, 1/2), got {d}")
        with localcontext() as c:
            c.prec = decimal_precision()
            gap = abs((1 + 8 * d) / (2 * d) * e - (Decimal(1) / 2 if numeric else Fraction(1, 2)) + d)
            tol = Decimal(10) ** (5 - c.prec) if numeric else 0
        if gap > tol:
            raise CircuitError("(delta, epsilon) does not satisfy the encoding equation")
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "epsilon", e)

    @property
    def exact(self) -> bool:
        return isinstance(self.delta, Fraction)

    @property
    def band(self):
        """Width of the outer decode bands, (1+8δ)/(2δ)·ε."""
        return (1 + 8 * self.delta) / (2 * self.delta) * self.epsilon


def epsilon_of(delta):
    """ε(δ) = δ(1−2δ)/(1+8δ); Decimals are evaluated at the working precision."""
    with localcontext() as c:
        c.prec = decimal_precision()
        return delta * (1 - 2 * delta) / (1 + 8 * delta)


def params_from_delta(delta) -> GadgetParams:
    """Params for a given delta: exact for rationals, numeric for Decimal/float."""
    if isinstance(delta, float):
        delta = Decimal(str(delta))
    d = delta if isinstance(delta, Decimal) else to_fraction(delta)
    if not 0 < d < Fraction(1, 2):
        raise CircuitError(f"delta must lie in (0, 1/2), got {d}")
    return GadgetParams(d, epsilon_of(d))


DEFAULT_DELTA = Fraction(2, 13)


def optimal_params() -> GadgetParams:
    """Rational stand-in for the optimum: δ = 2/13, ε = 18/377."""
    return params_from_delta(DEFAULT_DELTA)


def optimal_constants() -> Tuple[Decimal, Decimal]:
    """(δ*, ε*) = ((√5−1)/8, (3−√5)/16) in numeric mode."""
    with localcontext() as c:
        c.prec = decimal_precision()
        root5 = Decimal(5).sqrt()
        return (root5 - 1) / 8, (3 - root5) / 16


def decode_rate(r, delta) -> Trit:
    """0 on [0, 1/2−δ], 1 on [1/2+δ, 1], ⊥ strictly between (compared exactly)."""
    d = to_fraction(delta)
    r = Fraction(r) if isinstance(r, Decimal) else to_fraction(r)
    if r <= Fraction(1, 2) - d:
        return Trit.ZERO
    if r >= Fraction(1, 2) + d:
        return Trit.ONE
    return Trit.BOT


def decode(r: Mapping[str, object], varmap: Mapping[str, str], delta) -> Dict[str, Trit]:
    """Map each variable's bank rate through the decode bands of width 1/2 − δ."""
    out = {}
    for var, bank in varmap.items():
        if bank not in r:
            raise CircuitError(f"no rate for bank {bank!r} of variable {var!r}")
        out[var] = decode_rate(r[bank], delta)
    return out


def decode_for(inst: PureCircuitInstance, r, varmap, delta) -> Dict[str, Trit]:
    missing = [v for v in inst.variables if v not in varmap]
    if missing:
        raise CircuitError(f"variables missing from varmap: {missing}")
    return decode(r, {v: varmap[v] for v in inst.variables}, delta)


def format_assignment(x: Assignment) -> str:
    return " ".join(f"{v}={x[v]}" for v in sorted(x))


def assignment_to_json(x: Assignment) -> Dict[str, str]:
    return {v: str(x[v]) for v in sorted(x)}

