"""Mixed-binary programs for clearing vectors.

For a network with a central CDS debtor every liability is constant, so the
clearing condition r_i = min(1, a_i(r)/l_i) becomes linear once a binary y_i
chooses which side of the min is active:

    1. r_i >= a_i(r)/l_i - B_i (1 - y_i)
    2. r_i >= 1 - B_i y_i
    3. r_i <= a_i(r)/l_i
    4. 0 <= r_i <= 1
    5. y_i in {0, 1}

Fixing y leaves a linear program; enumerating every y finds a clearing
vector (and optimizes any linear objective over all of them).

General networks get the same constraints with bilinear assets and
r-dependent liabilities.  :func:`emit_mbnlp` writes that model as text::

    # comment
    param B_<bank> = <p/q>                 big-M constant
    var r_<bank> in [0, 1]
    bin y_<bank>
    fix r_<bank> = 1                       banks that always pay in full
    expr a_<bank> = <sum of terms>         assets
    expr l_<bank> = <sum of terms>         liabilities
    con <bank>.<k>: <lhs> <relation> <rhs>

Terms are products joined by ``*``; rationals are written ``p/q``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from .lp import GE, LE, LinearProgram, LPResult, lp_solve
from .network import (
    ClearingReport,
    FinancialNetwork,
    NetworkError,
    PropertyError,
    assets as assets_at,
    check_central_cds_debtor,
    verify_crrv,
)

ZERO = Fraction(0)
ONE = Fraction(1)

Linear = Tuple[Dict[str, Fraction], Fraction]  # (coefficients over banks, constant)


def big_m(net: FinancialNetwork, i: str) -> Fraction:
    """B_i = (e_i + incoming debt + incoming CDS notionals) / outgoing debt + 1."""
    net.require(i)
    out = net.debt_out(i)
    if out == 0:
        raise PropertyError(f"bank {i} owes no debt; its big-M constant is undefined")
    incoming = sum((c for (_, j), c in net.debts.items() if j == i), ZERO)
    incoming += sum((c for (_, j, _), c in net.cds.items() if j == i), ZERO)
    return (net.external_assets[i] + incoming) / out + 1


@dataclass(frozen=True)
class MBLPModel:
    """Linear mixed-binary model of a central-CDS-debtor network.

    ``variables`` are the banks with a y_i/r_i pair: every bank except the
    central debtor and the sinks, whose rates are fixed to 1.
    """

    network: FinancialNetwork
    ccd: Optional[str]
    variables: Tuple[str, ...]
    fixed: Tuple[str, ...]
    B: Mapping[str, Fraction]
    liabilities: Mapping[str, Fraction]
    asset_exprs: Mapping[str, Linear]
    objective: Optional[Tuple[Mapping[str, Fraction], str]] = None

    def describe(self) -> List[str]:
        """Constraints 1-4 per bank in readable form (y kept symbolic)."""
        lines = []
        for i in self.variables:
            a = _fmt_linear(self.asset_exprs[i])
            l, B = self.liabilities[i], self.B[i]
            lines += [
                f"{i}.1: r_{i} >= ({a})/{l} - {B}*(1 - y_{i})",
                f"{i}.2: r_{i} >= 1 - {B}*y_{i}",
                f"{i}.3: r_{i} <= ({a})/{l}",
                f"{i}.4: 0 <= r_{i} <= 1",
            ]
        return lines


def _fmt_linear(expr: Linear) -> str:
    coeffs, const = expr
    parts = [str(const)] + [f"{c}*r_{v}" for v, c in sorted(coeffs.items())]
    return " + ".join(parts)


def _ccd_assets(net: FinancialNetwork, fixed_one: set) -> Dict[str, Linear]:
    """Linear a_i(r) = e_i + sum r_j c_ji + sum (1 - r_k) c^k_{CCD,i} for every bank."""
    out: Dict[str, Linear] = {}
    for i in net.banks:
        coeffs: Dict[str, Fraction] = {}
        const = net.external_assets[i]
        for (j, t), c in net.debts.items():
            if t != i:
                continue
            if j in fixed_one:
                const += c
            else:
                coeffs[j] = coeffs.get(j, ZERO) + c
        for (_, t, k), c in net.cds.items():
            if t != i:
                continue
            const += c
            if k not in fixed_one:
                coeffs[k] = coeffs.get(k, ZERO) - c
            else:
                const -= c
        out[i] = ({v: c for v, c in coeffs.items() if c}, const)
    return out


def build_mblp(net: FinancialNetwork, objective: Optional[Mapping[str, object]] = None,
               sense: str = "max") -> MBLPModel:
    """Build the model; the network must have a central CDS debtor (or no CDS at all)."""
    ccd = None
    if net.cds:
        ok, ccd = check_central_cds_debtor(net)
        if not ok:
            raise PropertyError("network does not have a central CDS debtor")
    fixed = tuple(b for b in net.banks if b == ccd or net.debt_out(b) == 0)
    variables = tuple(b for b in net.banks if b not in fixed)
    obj = None
    if objective is not None:
        if sense not in ("max", "min"):
            raise NetworkError(f"sense must be max or min, got {sense!r}")
        for b in objective:
            net.require(b)
        obj = ({b: Fraction(c) for b, c in objective.items()}, sense)
    return MBLPModel(
        network=net,
        ccd=ccd,
        variables=variables,
        fixed=fixed,
        B={i: big_m(net, i) for i in variables},
        liabilities={i: net.debt_out(i) for i in variables},
        asset_exprs=_ccd_assets(net, set(fixed)),
        objective=obj,
    )


def lp_restrict(model: MBLPModel, y: Mapping[str, int]) -> LinearProgram:
    """The linear program left after fixing y.

    y_i = 0 keeps constraints 2 and 3 (so r_i = 1 and a_i >= l_i); y_i = 1
    keeps 1 and 3 (so r_i = a_i/l_i).  The remaining big-M rows hold for
    every r in [0, 1] and are dropped.
    """
    missing = [i for i in model.variables if i not in y]
    if missing:
        raise NetworkError(f"y is missing banks {missing}")
    for i in model.variables:
        if y[i] not in (0, 1):
            raise NetworkError(f"y_{i} must be 0 or 1, got {y[i]!r}")
    lp = LinearProgram(model.variables, bounds={i: (ZERO, ONE) for i in model.variables})
    for i in model.variables:
        coeffs, const = model.asset_exprs[i]
        # l_i r_i - (sum coeffs r) compared with const
        row = {v: -c for v, c in coeffs.items()}
        row[i] = row.get(i, ZERO) + model.liabilities[i]
        if y[i] == 0:
            lp.add({i: ONE}, GE, ONE)
        else:
            lp.add(row, GE, const)
        lp.add(row, LE, const)
    if model.objective is not None:
        coeffs, sense = model.objective
        lp.objective = ({v: c for v, c in coeffs.items() if v in model.variables}, sense)
    return lp


def y_configurations(model: MBLPModel):
    """All y in binary-counter order: first bank is the most significant bit, all zeros first."""
    for bits in itertools.product((0, 1), repeat=len(model.variables)):
        yield dict(zip(model.variables, bits))


def full_rates(model: MBLPModel, point: Mapping[str, Fraction]) -> Dict[str, Fraction]:
    rates = {b: ONE for b in model.fixed}
    rates.update(point)
    return {b: rates[b] for b in model.network.banks}


def objective_value(model: MBLPModel, rates: Mapping[str, Fraction]) -> Optional[Fraction]:
    if model.objective is None:
        return None
    return sum((c * rates[b] for b, c in model.objective[0].items()), ZERO)


def solve_exhaustive(net: FinancialNetwork, objective: Optional[Mapping[str, object]] = None,
                     sense: str = "max") -> ClearingReport:
    """Enumerate y and solve each restricted LP.

    Without an objective the first feasible branch wins.  With one, every
    branch is solved and the best value wins; ties keep the earlier branch.
    ``iterations`` in the report counts LP solves.
    """
    model = build_mblp(net, objective, sense)
    best: Optional[Tuple[Fraction, Dict[str, Fraction]]] = None
    solves = 0
    for y in y_configurations(model):
        res: LPResult = lp_solve(lp_restrict(model, y))
        solves += 1
        if not res.feasible:
            continue
        rates = full_rates(model, res.point)
        if model.objective is None:
            best = (None, rates)
            break
        value = objective_value(model, rates)
        if best is None or (value > best[0] if model.objective[1] == "max" else value < best[0]):
            best = (value, rates)
    if best is None:
        raise AssertionError("no feasible y branch; a clearing vector always exists")
    report = verify_crrv(net, best[1], 0)
    report.iterations = solves
    report.converged = report.passed
    report.objective_value = best[0]
    report.method = "mblp-exhaustive"
    return report


def induced_y(model: MBLPModel, r: Mapping[str, Fraction]) -> Dict[str, int]:
    """y_i = 1 when a_i(r) < l_i, else 0 (the tie a_i = l_i is resolved to 0)."""
    return {i: int(assets_at(model.network, r, i) < model.liabilities[i]) for i in model.variables}


# -- general (nonlinear) model -------------------------------------------------

def _always_pays(net: FinancialNetwork, b: str) -> bool:
    """Sinks, and CDS-only debtors whose assets cover every CDS notional."""
    if b in net.debt_debtors:
        return False
    return net.external_assets[b] >= net.worst_case_liability(b)


def _fmt_term(coef: Fraction, factors: List[str]) -> str:
    return "*".join([str(coef)] + factors)


def _sum(terms: List[str]) -> str:
    return " + ".join(terms) if terms else "0"


def mbnlp_text(net: FinancialNetwork) -> str:
    """The mixed-binary nonlinear program of any network, as text."""
    fixed = [b for b in net.banks if _always_pays(net, b)]
    fixed_set = set(fixed)
    free = [b for b in net.banks if b not in fixed_set]

    def rate(b):
        return None if b in fixed_set else f"r_{b}"

    def default(k):
        return None if k in fixed_set else f"(1 - r_{k})"

    lines = ["# mixed-binary nonlinear program for clearing recovery rates"]
    lines.append(f"# banks: {net.n}, binary: {len(free)}, fixed: {len(fixed)}")
    big_ms = {}
    for i in free:
        if net.debt_out(i) > 0:
            big_ms[i] = ("B", big_m(net, i))
        else:
            incoming = sum((c for (_, j), c in net.debts.items() if j == i), ZERO)
            incoming += sum((c for (_, j, _), c in net.cds.items() if j == i), ZERO)
            big_ms[i] = ("M", net.external_assets[i] + incoming + net.worst_case_liability(i))
    for i in free:
        kind, value = big_ms[i]
        lines.append(f"param {kind}_{i} = {value}")
    for i in free:
        lines.append(f"var r_{i} in [0, 1]")
    for i in free:
        lines.append(f"bin y_{i}")
    for i in fixed:
        lines.append(f"fix r_{i} = 1")
    for i in net.banks:
        terms = [str(net.external_assets[i])]
        for (j, t), c in net.debts.items():
            if t == i:
                terms.append(_fmt_term(c, [f for f in (rate(j),) if f]))
        for (j, t, k), c in net.cds.items():
            if t != i or k in fixed_set:
                continue
            terms.append(_fmt_term(c, [f for f in (rate(j), default(k)) if f]))
        lines.append(f"expr a_{i} = {_sum(terms)}")
    for i in net.banks:
        terms = [_fmt_term(c, []) for (j, _), c in net.debts.items() if j == i]
        terms += [_fmt_term(c, [default(k)]) for (j, _, k), c in net.cds.items()
                  if j == i and k not in fixed_set]
        lines.append(f"expr l_{i} = {_sum(terms)}")
    for i in free:
        kind, _ = big_ms[i]
        if kind == "B":
            lines += [
                f"con {i}.1: r_{i} >= a_{i} / l_{i} - B_{i}*(1 - y_{i})",
                f"con {i}.2: r_{i} >= 1 - B_{i}*y_{i}",
                f"con {i}.3: r_{i} <= a_{i} / l_{i}",
            ]
        else:
            # no debts: l_i may vanish, so the division is multiplied through
            lines += [
                f"con {i}.1: r_{i}*l_{i} >= a_{i} - M_{i}*(1 - y_{i})",
                f"con {i}.2: r_{i} >= 1 - y_{i}",
                f"con {i}.3: r_{i}*l_{i} <= a_{i}",
            ]
        lines.append(f"con {i}.4: 0 <= r_{i} <= 1")
    return "\n".join(lines) + "\n"


def emit_mbnlp(net: FinancialNetwork, out) -> str:
    """Write the model to a path or text stream and return the text."""
    text = mbnlp_text(net)
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)
    return text

