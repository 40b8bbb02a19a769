"""Exact clearing for debt-only networks and for covered CDSes with a central debtor.

Debt-only networks are cleared by the fictitious default algorithm, which
returns the greatest clearing vector.  Covered CDSes are first rewritten
into plain debts (one transformation step per CDS), then cleared the same way.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from .lp import LE, LinearProgram, lp_solve
from .network import (
    ClearingReport,
    FinancialNetwork,
    NetworkError,
    PropertyError,
    verify_crrv,
)

ONE = Fraction(1)
ZERO = Fraction(0)


def solve_linear_system(matrix: List[List[Fraction]], rhs: List[Fraction]) -> Optional[List[Fraction]]:
    """Exact Gauss-Jordan elimination; None if the matrix is singular."""
    n = len(matrix)
    rows = [list(r) + [b] for r, b in zip(matrix, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if rows[i][col] != 0), None)
        if piv is None:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        prow = rows[col]
        p = prow[col]
        if p != 1:
            prow = [v / p for v in prow]
            rows[col] = prow
        nz = [k for k in range(col, n + 1) if prow[k]]
        for i in range(n):
            if i != col:
                f = rows[i][col]
                if f:
                    row = rows[i]
                    for k in nz:
                        row[k] -= f * prow[k]
    return [rows[i][n] for i in range(n)]


def _require_debt_only(net: FinancialNetwork) -> None:
    if net.cds:
        raise NetworkError("solve_debt_only needs a network without CDS contracts")


def _greatest_by_lp(net: FinancialNetwork) -> Dict[str, Fraction]:
    """max sum r subject to r_i * l_i <= e_i + sum_j r_j c_ji, 0 <= r <= 1."""
    lp = LinearProgram(net.banks, bounds={b: (ZERO, ONE) for b in net.banks},
                       objective=({b: ONE for b in net.banks}, "max"))
    for i in net.banks:
        coeffs = {i: net.debt_out(i)}
        for (a, b), c in net.debts.items():
            if b == i:
                coeffs[a] = coeffs.get(a, ZERO) - c
        lp.add(coeffs, LE, net.external_assets[i])
    res = lp_solve(lp)
    return dict(res.point)


def fictitious_default(net: FinancialNetwork) -> Tuple[Optional[Dict[str, Fraction]], int]:
    """Return (rates, rounds); rates is None if a round hits a singular system."""
    _require_debt_only(net)
    banks = net.banks
    liab = {b: net.debt_out(b) for b in banks}
    incoming: Dict[str, List[Tuple[str, Fraction]]] = {b: [] for b in banks}
    for (i, j), c in net.debts.items():
        incoming[j].append((i, c))
    r = {b: ONE for b in banks}
    default: Set[str] = set()
    rounds = 0
    while True:
        new = [b for b in banks if b not in default and liab[b] > 0
               and net.external_assets[b] + sum((r[i] * c for i, c in incoming[b]), ZERO) < liab[b]]
        if not new:
            return r, rounds
        rounds += 1
        default.update(new)
        order = sorted(default)
        pos = {b: k for k, b in enumerate(order)}
        # r_i l_i - sum_{j in D} r_j c_ji = e_i + sum_{j not in D} c_ji
        matrix = [[ZERO] * len(order) for _ in order]
        rhs = []
        for b in order:
            row = matrix[pos[b]]
            row[pos[b]] += liab[b]
            total = net.external_assets[b]
            for i, c in incoming[b]:
                if i in pos:
                    row[pos[i]] -= c
                else:
                    total += c
            rhs.append(total)
        sol = solve_linear_system(matrix, rhs)
        if sol is None or any(v < 0 or v > 1 for v in sol):
            return None, rounds
        for b, v in zip(order, sol):
            r[b] = v


def solve_debt_only(net: FinancialNetwork) -> ClearingReport:
    """The greatest clearing vector of a network without CDSes, exactly.

    Falls back to the linear program max sum(r) over the feasible payment
    region if a fictitious-default round produces a singular system.
    """
    _require_debt_only(net)
    rates, rounds = fictitious_default(net)
    method = "fictitious-default"
    if rates is None or not verify_crrv(net, rates, 0).passed:
        rates = _greatest_by_lp(net)
        method = "lp-greatest"
    report = verify_crrv(net, rates, 0)
    report.iterations = rounds
    report.converged = report.passed
    report.method = method
    return report


# -- covered CDS transformation ---------------------------------------------

def _capitalized_debtor(net: FinancialNetwork, i: str) -> None:
    if i in net.debt_debtors:
        raise PropertyError(f"CDS debtor {i} owes debt")
    exposure = sum((c for (a, _, _), c in net.cds.items() if a == i), ZERO)
    if net.external_assets[i] < exposure:
        raise PropertyError(f"CDS debtor {i} cannot cover its CDS notionals")


def dummy_name(net: FinancialNetwork, reference: str, creditor: str) -> str:
    base = f"dummy__{reference}__{creditor}"
    if base not in net.banks:
        return base
    k = 1
    while f"{base}__{k}" in net.banks:
        k += 1
    return f"{base}__{k}"


def transform_step(net: FinancialNetwork, cds: Tuple[str, str, str]) -> FinancialNetwork:
    """Replace the covered CDS (i, j, R) by plain debts.

    With x the CDS notional: j gains x external assets, the debt R -> j
    shrinks by x (dropped at zero), R owes x to a fresh dummy bank and the
    CDS is removed.  The CDS debtor must hold no debts and enough assets to
    pay all its CDSes in full.
    """
    if cds not in net.cds:
        raise NetworkError(f"no CDS {cds}")
    i, j, R = cds
    _capitalized_debtor(net, i)
    x = net.cds[cds]
    y = net.debts.get((R, j), ZERO)
    if x > y:
        raise PropertyError(f"CDS {cds} is not covered: notional {x} > debt {y}")
    dummy = dummy_name(net, R, j)
    assets = dict(net.external_assets)
    assets[j] += x
    assets[dummy] = ZERO
    debts = dict(net.debts)
    if y == x:
        del debts[(R, j)]
    else:
        debts[(R, j)] = y - x
    debts[(R, dummy)] = x
    rest = {k: c for k, c in net.cds.items() if k != cds}
    return FinancialNetwork(net.banks + (dummy,), assets, debts, rest)


def transform_all(net: FinancialNetwork) -> Tuple[FinancialNetwork, List[str]]:
    """Apply transform_step to every CDS in lexicographic order; return the dummies too."""
    dummies = []
    for key in list(net.cds):
        before = set(net.banks)
        net = transform_step(net, key)
        dummies.extend(b for b in net.banks if b not in before)
    return net, dummies


def solve_covered_central(net: FinancialNetwork) -> ClearingReport:
    """Clear a network whose CDSes are all covered and written by fully capitalized debtors.

    A single central CDS debtor is the usual case; several such debtors are
    accepted as well.
    """
    for i in net.cds_debtors:
        _capitalized_debtor(net, i)
    bad = [k for k, c in net.cds.items() if c > net.debts.get((k[2], k[1]), ZERO)]
    if bad:
        raise PropertyError(f"uncovered CDSes: {bad}")
    flat, dummies = transform_all(net)
    inner = solve_debt_only(flat)
    rates = {b: inner.rates[b] for b in net.banks}
    report = verify_crrv(net, rates, 0)
    report.iterations = inner.iterations
    report.converged = report.passed
    report.method = "covered-transform"
    return report


def debt_only_lp_oracle(net: FinancialNetwork) -> Dict[str, Fraction]:
    """Greatest clearing vector via the linear program (independent of the default loop)."""
    _require_debt_only(net)
    return _greatest_by_lp(net)

