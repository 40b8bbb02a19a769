"""Exact rational linear programming: presolve plus two-phase simplex with Bland's rule.

Presolve substitutes fixed variables, turns single-variable rows into bounds
and eliminates equality rows by exact Gauss-Jordan steps.  What remains is a
system of inequalities solved by a dictionary-free dense tableau simplex.
Every returned point is re-checked against the original program.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, TextIO, Tuple

from .network import to_fraction

LE, GE, EQ = "<=", ">=", "="
RELATIONS = (LE, GE, EQ)

INFEASIBLE = "infeasible"
FEASIBLE = "feasible"
OPTIMAL = "optimal"
UNBOUNDED = "unbounded"

ZERO = Fraction(0)


class LPError(ValueError):
    """Malformed linear program."""


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[str, Fraction]
    relation: str
    rhs: Fraction

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise LPError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "coeffs", {v: to_fraction(c) for v, c in self.coeffs.items() if c != 0})
        object.__setattr__(self, "rhs", to_fraction(self.rhs))

    def holds(self, x: Mapping[str, Fraction]) -> bool:
        lhs = sum((c * x[v] for v, c in self.coeffs.items()), ZERO)
        if self.relation == LE:
            return lhs <= self.rhs
        if self.relation == GE:
            return lhs >= self.rhs
        return lhs == self.rhs

    def __str__(self):
        terms = " + ".join(f"{c}*{v}" for v, c in sorted(self.coeffs.items())) or "0"
        return f"{terms} {self.relation} {self.rhs}"


@dataclass
class LinearProgram:
    """Variables with [lo, hi] bounds (None = unbounded side), rows and an optional objective.

    ``objective`` is ``(coeffs, sense)`` with sense ``"max"`` or ``"min"``.
    """

    variables: Tuple[str, ...]
    constraints: List[Constraint] = field(default_factory=list)
    bounds: Dict[str, Tuple[Optional[Fraction], Optional[Fraction]]] = field(default_factory=dict)
    objective: Optional[Tuple[Mapping[str, Fraction], str]] = None

    def __post_init__(self):
        self.variables = tuple(self.variables)
        if len(set(self.variables)) != len(self.variables):
            raise LPError("duplicate variable names")
        known = set(self.variables)
        for con in self.constraints:
            for v in con.coeffs:
                if v not in known:
                    raise LPError(f"constraint uses undeclared variable {v!r}")
        for v, (lo, hi) in self.bounds.items():
            if v not in known:
                raise LPError(f"bounds given for undeclared variable {v!r}")
            if lo is not None and hi is not None and to_fraction(lo) > to_fraction(hi):
                raise LPError(f"empty bounds for {v!r}")
        if self.objective is not None:
            coeffs, sense = self.objective
            if sense not in ("max", "min"):
                raise LPError(f"objective sense must be max or min, got {sense!r}")
            for v in coeffs:
                if v not in known:
                    raise LPError(f"objective uses undeclared variable {v!r}")

    def add(self, coeffs: Mapping[str, object], relation: str, rhs) -> None:
        con = Constraint(dict(coeffs), relation, rhs)
        for v in con.coeffs:
            if v not in self.variables:
                raise LPError(f"constraint uses undeclared variable {v!r}")
        self.constraints.append(con)

    def bound(self, v: str) -> Tuple[Optional[Fraction], Optional[Fraction]]:
        lo, hi = self.bounds.get(v, (ZERO, None))
        return (None if lo is None else to_fraction(lo), None if hi is None else to_fraction(hi))

    def is_feasible_point(self, x: Mapping[str, Fraction]) -> bool:
        for v in self.variables:
            lo, hi = self.bound(v)
            if (lo is not None and x[v] < lo) or (hi is not None and x[v] > hi):
                return False
        return all(con.holds(x) for con in self.constraints)

    def objective_value(self, x: Mapping[str, Fraction]) -> Optional[Fraction]:
        if self.objective is None:
            return None
        return sum((to_fraction(c) * x[v] for v, c in self.objective[0].items()), ZERO)

    def to_text(self) -> str:
        lines = [f"var {v} in [{lo}, {hi}]" for v in self.variables for lo, hi in [self.bound(v)]]
        lines += [str(c) for c in self.constraints]
        if self.objective is not None:
            coeffs, sense = self.objective
            lines.append(f"{sense} " + (" + ".join(f"{c}*{v}" for v, c in sorted(coeffs.items())) or "0"))
        return "\n".join(lines) + "\n"


@dataclass
class LPResult:
    status: str
    point: Optional[Dict[str, Fraction]] = None
    value: Optional[Fraction] = None

    @property
    def feasible(self) -> bool:
        return self.status in (FEASIBLE, OPTIMAL, UNBOUNDED)


# -- presolve -------------------------------------------------------------

class _Infeasible(Exception):
    pass


def _row_trivial(rel: str, rhs: Fraction) -> None:
    """A row with no variables: check ``0 rel rhs``."""
    ok = (rel == LE and rhs >= 0) or (rel == GE and rhs <= 0) or (rel == EQ and rhs == 0)
    if not ok:
        raise _Infeasible()


class _Presolved:
    def __init__(self, lp: LinearProgram):
        self.order = {v: k for k, v in enumerate(lp.variables)}
        self.lo: Dict[str, Optional[Fraction]] = {}
        self.hi: Dict[str, Optional[Fraction]] = {}
        for v in lp.variables:
            self.lo[v], self.hi[v] = lp.bound(v)
        self.rows: List[Tuple[Dict[str, Fraction], str, Fraction]] = [
            (dict(c.coeffs), c.relation, c.rhs) for c in lp.constraints]
        self.obj: Dict[str, Fraction] = {}
        self.obj_const = ZERO
        if lp.objective is not None:
            sign = 1 if lp.objective[1] == "max" else -1
            self.obj = {v: sign * to_fraction(c) for v, c in lp.objective[0].items() if c != 0}
        self.fixed: Dict[str, Fraction] = {}
        self.eliminated: List[Tuple[str, Dict[str, Fraction], Fraction]] = []

    @property
    def active(self) -> List[str]:
        gone = set(self.fixed) | {p for p, _, _ in self.eliminated}
        return sorted((v for v in self.order if v not in gone), key=self.order.get)

    def _fix(self, v: str, value: Fraction) -> None:
        lo, hi = self.lo[v], self.hi[v]
        if (lo is not None and value < lo) or (hi is not None and value > hi):
            raise _Infeasible()
        self.fixed[v] = value
        rows = []
        for coeffs, rel, rhs in self.rows:
            c = coeffs.pop(v, None)
            if c is not None:
                rhs -= c * value
            rows.append((coeffs, rel, rhs))
        self.rows = rows
        c = self.obj.pop(v, None)
        if c is not None:
            self.obj_const += c * value

    def _tighten(self, v: str, a: Fraction, rel: str, b: Fraction) -> None:
        bound = b / a
        if a < 0 and rel != EQ:
            rel = GE if rel == LE else LE
        if rel == EQ:
            self._fix(v, bound)
            return
        if rel == LE:
            if self.hi[v] is None or bound < self.hi[v]:
                self.hi[v] = bound
        elif self.lo[v] is None or bound > self.lo[v]:
            self.lo[v] = bound
        if self.lo[v] is not None and self.hi[v] is not None:
            if self.lo[v] > self.hi[v]:
                raise _Infeasible()

    def _eliminate(self, idx: int) -> None:
        coeffs, _, rhs = self.rows.pop(idx)
        p = min(coeffs, key=self.order.get)
        a = coeffs[p]
        expr = {v: c for v, c in coeffs.items() if v != p}
        # p = (rhs - sum expr) / a ; substitute everywhere
        rows = []
        for d, rel, b in self.rows:
            beta = d.pop(p, None)
            if beta is not None:
                f = beta / a
                for v, c in expr.items():
                    nc = d.get(v, ZERO) - f * c
                    if nc:
                        d[v] = nc
                    else:
                        d.pop(v, None)
                b = b - f * rhs
            rows.append((d, rel, b))
        beta = self.obj.pop(p, None)
        if beta is not None:
            f = beta / a
            for v, c in expr.items():
                nc = self.obj.get(v, ZERO) - f * c
                if nc:
                    self.obj[v] = nc
                else:
                    self.obj.pop(v, None)
            self.obj_const += f * rhs
        # p's own bounds become rows over the remaining variables
        for bound, rel in ((self.lo[p], GE), (self.hi[p], LE)):
            if bound is None:
                continue
            # (rhs - expr)/a  rel  bound   <=>   expr  rel'  rhs - a*bound
            flipped = (LE if rel == GE else GE) if a > 0 else rel
            rows.append((dict(expr), flipped, rhs - a * bound))
        self.rows = rows
        self.eliminated.append((p, {v: c / a for v, c in expr.items()}, rhs / a))

    def _pair_equalities(self) -> None:
        """Merge a <= row and a >= row with identical data into one equality."""
        seen = {}
        rows = []
        for coeffs, rel, rhs in self.rows:
            if rel == EQ:
                rows.append((coeffs, rel, rhs))
                continue
            sign = 1 if rel == LE else -1
            key = (tuple(sorted((v, sign * c) for v, c in coeffs.items())), sign * rhs)
            neg = (tuple((v, -c) for v, c in key[0]), -key[1])
            if neg in seen:
                k = seen.pop(neg)
                rows[k] = (rows[k][0], EQ, rows[k][2])
                continue
            if key in seen:
                continue  # duplicate row
            seen[key] = len(rows)
            rows.append((coeffs, rel, rhs))
        self.rows = rows

    def run(self) -> None:
        self._pair_equalities()
        for v in list(self.order):
            lo, hi = self.lo[v], self.hi[v]
            if lo is not None and hi is not None and lo == hi:
                self._fix(v, lo)
        changed = True
        while changed:
            changed = False
            keep = []
            for coeffs, rel, rhs in self.rows:
                if not coeffs:
                    _row_trivial(rel, rhs)
                    changed = True
                elif len(coeffs) == 1 and rel != EQ:
                    (v, a), = coeffs.items()
                    self._tighten(v, a, rel, rhs)
                    changed = True
                else:
                    keep.append((coeffs, rel, rhs))
            self.rows = keep
            for v in self.active:
                lo, hi = self.lo[v], self.hi[v]
                if lo is not None and hi is not None and lo == hi:
                    self._fix(v, lo)
                    changed = True
            for k, (coeffs, rel, rhs) in enumerate(self.rows):
                if rel == EQ and coeffs:
                    if len(coeffs) == 1:
                        (v, a), = coeffs.items()
                        self.rows.pop(k)
                        self._fix(v, rhs / a)
                    else:
                        self._eliminate(k)
                    changed = True
                    break

    def recover(self, values: Dict[str, Fraction]) -> Dict[str, Fraction]:
        x = dict(self.fixed)
        x.update(values)
        for p, expr, const in reversed(self.eliminated):
            x[p] = const - sum((c * x[v] for v, c in expr.items()), ZERO)
        return x


# -- simplex ----------------------------------------------------------------

class _Tableau:
    """Dense tableau for max c.x s.t. A x <= b, x >= 0 (Chvátal's dictionary form)."""

    def __init__(self, A: List[List[Fraction]], b: List[Fraction], debug: Optional[TextIO]):
        self.m = len(A)
        self.n = len(A[0]) if A else 0
        # columns: 0..n-1 structural, n..n+m-1 slacks
        self.rows = [row[:] + [Fraction(int(i == k)) for k in range(self.m)] + [b[i]]
                     for i, row in enumerate(A)]
        self.basis = [self.n + i for i in range(self.m)]
        self.debug = debug
        self.pivots = 0

    def dump(self, title: str, cost: List[Fraction]) -> None:
        if self.debug is None:
            return
        out = self.debug
        out.write(f"-- {title} (pivots={self.pivots})\n")
        out.write("basis: " + " ".join(f"x{j}" for j in self.basis) + "\n")
        for i, row in enumerate(self.rows):
            out.write(f"x{self.basis[i]} | " + " ".join(str(v) for v in row[:-1]) + f" | {row[-1]}\n")
        out.write("obj | " + " ".join(str(v) for v in cost[:-1]) + f" | {cost[-1]}\n")

    def pivot(self, r: int, c: int, cost: List[Fraction]) -> None:
        prow = self.rows[r]
        pv = prow[c]
        if pv != 1:
            prow = [v / pv for v in prow]
            self.rows[r] = prow
        for i, row in enumerate(self.rows):
            if i != r and row[c]:
                f = row[c]
                self.rows[i] = [a - f * p for a, p in zip(row, prow)]
        if cost[c]:
            f = cost[c]
            cost[:] = [a - f * p for a, p in zip(cost, prow)]
        self.basis[r] = c
        self.pivots += 1

    def optimize(self, cost: List[Fraction], allowed: int) -> bool:
        """Maximize; ``cost`` holds reduced costs (positive = improving) and -value last.

        Returns False when unbounded.  Only columns < ``allowed`` may enter.
        """
        while True:
            enter = next((j for j in range(allowed) if cost[j] > 0), None)
            if enter is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], enter, cost)
            self.dump("pivot", cost)



def _simplex(A, b, c, debug) -> Tuple[str, Optional[List[Fraction]]]:
    """max c.x s.t. A x <= b, x >= 0.  ``c`` None means feasibility only."""
    m = len(A)
    n = len(A[0]) if A else len(c or [])
    if m == 0:
        if c is not None and any(v > 0 for v in c):
            return UNBOUNDED, [ZERO] * n
        return OPTIMAL, [ZERO] * n
    width = n + m
    tab = _Tableau(A, b, debug)
    if min(b) < 0:
        # phase 1: extra column x0 with coefficient -1 in every row; maximize -x0
        x0 = width
        for row in tab.rows:
            row.insert(x0, Fraction(-1))
        cost = [ZERO] * (width + 2)
        cost[x0] = Fraction(-1)
        tab.dump("phase 1 start", cost)
        r = min(range(m), key=lambda i: (b[i], tab.basis[i]))
        tab.pivot(r, x0, cost)
        tab.dump("phase 1 entry", cost)
        tab.optimize(cost, width + 1)
        if _values(tab, width + 1)[x0] != 0:
            return INFEASIBLE, None
        if x0 in tab.basis:
            # degenerate: x0 sits in the basis at level 0
            r = tab.basis.index(x0)
            col = next((j for j in range(width) if tab.rows[r][j] != 0), None)
            if col is None:
                tab.rows.pop(r)
                tab.basis.pop(r)
            else:
                tab.pivot(r, col, cost)
        for row in tab.rows:
            del row[x0]
    if c is None:
        return FEASIBLE, _values(tab, width)[:n]
    cost = list(c) + [ZERO] * (width - n) + [ZERO]
    for i, j in enumerate(tab.basis):
        if cost[j]:
            f = cost[j]
            cost = [a - f * p for a, p in zip(cost, tab.rows[i])]
    tab.dump("phase 2 start", cost)
    if not tab.optimize(cost, width):
        return UNBOUNDED, _values(tab, width)[:n]
    return OPTIMAL, _values(tab, width)[:n]


def _values(tab: _Tableau, width: int) -> List[Fraction]:
    x = [ZERO] * width
    for i, j in enumerate(tab.basis):
        x[j] = tab.rows[i][-1]
    return x


def lp_solve(lp: LinearProgram, debug: bool = False, stream: Optional[TextIO] = None) -> LPResult:
    """Solve exactly.  Without an objective the status on success is ``feasible``.

    With ``debug`` every tableau is written to ``stream`` (stderr by default).
    For an unbounded program the returned point is feasible but not optimal.
    """
    out = (stream or sys.stderr) if debug else None
    pre = _Presolved(lp)
    try:
        pre.run()
    except _Infeasible:
        return LPResult(INFEASIBLE)
    active = pre.active
    # substitute x = lo + x' (lo finite), x = hi - x' (only hi finite), x = x+ - x- (free)
    cols: List[Tuple[str, int, Fraction]] = []  # (var, sign, offset)
    for v in active:
        lo, hi = pre.lo[v], pre.hi[v]
        if lo is not None:
            cols.append((v, 1, lo))
        elif hi is not None:
            cols.append((v, -1, hi))
        else:
            cols.append((v, 1, ZERO))
            cols.append((v, -1, ZERO))
    index = {}
    for k, (v, s, _) in enumerate(cols):
        index.setdefault(v, []).append(k)
    offset = {v: cols[index[v][0]][2] for v in active}
    A: List[List[Fraction]] = []
    b: List[Fraction] = []

    def emit(coeffs: Mapping[str, Fraction], rhs: Fraction, sign: int) -> None:
        row = [ZERO] * len(cols)
        rhs = rhs - sum((c * offset[v] for v, c in coeffs.items()), ZERO)
        for v, c in coeffs.items():
            for k in index[v]:
                row[k] = sign * c * cols[k][1]
        A.append(row)
        b.append(sign * rhs)

    for coeffs, rel, rhs in pre.rows:
        if rel in (LE, EQ):
            emit(coeffs, rhs, 1)
        if rel in (GE, EQ):
            emit(coeffs, rhs, -1)
    for v in active:
        lo, hi = pre.lo[v], pre.hi[v]
        if lo is not None and hi is not None:
            emit({v: Fraction(1)}, hi, 1)
    c = None
    if lp.objective is not None:
        c = [ZERO] * len(cols)
        for v, coef in pre.obj.items():
            for k in index[v]:
                c[k] = coef * cols[k][1]
    status, xs = _simplex(A, b, c, out)
    if status == INFEASIBLE:
        return LPResult(INFEASIBLE)
    values = {v: offset[v] for v in active}
    for k, (v, s, _) in enumerate(cols):
        values[v] += s * xs[k]
    point = pre.recover(values)
    point = {v: point[v] for v in lp.variables}
    if not lp.is_feasible_point(point):
        raise AssertionError("simplex returned a point that violates the program")
    return LPResult(status, point, lp.objective_value(point))

