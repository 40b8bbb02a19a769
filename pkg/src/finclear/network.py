"""Financial networks with debt contracts and CDSes under proportional payments.

A network is the triplet (banks, external assets, contracts).  Rates are plain
mappings ``bank -> value``; values are :class:`~fractions.Fraction` in exact
mode and :class:`~decimal.Decimal` in numeric mode.  The two modes are never
mixed inside one evaluation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

Number = Union[Fraction, Decimal]
Rates = Mapping[str, Number]

DEFAULT_PRECISION = 50


class NetworkError(ValueError):
    """Malformed network or unknown bank id."""


class DegenerateNetworkError(NetworkError):
    """A 0/0 case of the clearing function that the sink rule does not cover."""


class PropertyError(NetworkError):
    """A structural precondition (central CDS debtor, covered, ...) does not hold."""


def decimal_precision() -> int:
    """Significant digits used in numeric mode (``FINCLEAR_PRECISION`` overrides)."""
    raw = os.environ.get("FINCLEAR_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    try:
        prec = int(raw)
    except ValueError:
        raise NetworkError(f"FINCLEAR_PRECISION must be an integer, got {raw!r}")
    if prec < 2:
        raise NetworkError("FINCLEAR_PRECISION must be >= 2")
    return prec


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


def to_decimal(value) -> Decimal:
    if isinstance(value, Decimal):
        return value
    if isinstance(value, Fraction):
        return Decimal(value.numerator) / Decimal(value.denominator)
    return Decimal(str(value))


@dataclass(frozen=True)
class FinancialNetwork:
    """Immutable network; bank ids are kept in lexicographic order.

    ``debts`` maps ``(debtor, creditor)`` to a positive notional and ``cds``
    maps ``(debtor, creditor, reference)`` to a positive notional.  Missing
    entries mean "no contract".
    """

    banks: Tuple[str, ...]
    external_assets: Mapping[str, Fraction]
    debts: Mapping[Tuple[str, str], Fraction] = field(default_factory=dict)
    cds: Mapping[Tuple[str, str, str], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        banks = tuple(sorted(self.banks))
        if len(set(banks)) != len(banks):
            raise NetworkError("duplicate bank ids")
        known = set(banks)
        assets = {}
        for b in banks:
            e = to_fraction(self.external_assets.get(b, 0))
            if e < 0:
                raise NetworkError(f"negative external assets for {b!r}")
            assets[b] = e
        for b in self.external_assets:
            if b not in known:
                raise NetworkError(f"external assets given for unknown bank {b!r}")
        debts = {}
        for (i, j), c in self.debts.items():
            for b in (i, j):
                if b not in known:
                    raise NetworkError(f"debt ({i}, {j}) references unknown bank {b!r}")
            if i == j:
                raise NetworkError(f"bank {i!r} cannot owe itself")
            c = to_fraction(c)
            if c <= 0:
                raise NetworkError(f"debt ({i}, {j}) must have positive notional")
            debts[(i, j)] = c
        cds = {}
        for (i, j, k), c in self.cds.items():
            for b in (i, j, k):
                if b not in known:
                    raise NetworkError(f"CDS ({i}, {j}, {k}) references unknown bank {b!r}")
            if len({i, j, k}) != 3:
                raise NetworkError(f"CDS ({i}, {j}, {k}) needs three distinct banks")
            c = to_fraction(c)
            if c <= 0:
                raise NetworkError(f"CDS ({i}, {j}, {k}) must have positive notional")
            cds[(i, j, k)] = c
        object.__setattr__(self, "banks", banks)
        object.__setattr__(self, "external_assets", MappingProxyType(assets))
        object.__setattr__(self, "debts", MappingProxyType(dict(sorted(debts.items()))))
        object.__setattr__(self, "cds", MappingProxyType(dict(sorted(cds.items()))))

    def __hash__(self):
        return hash((self.banks, tuple(self.external_assets.items()),
                     tuple(self.debts.items()), tuple(self.cds.items())))

    def __eq__(self, other):
        if not isinstance(other, FinancialNetwork):
            return NotImplemented
        return (self.banks == other.banks
                and dict(self.external_assets) == dict(other.external_assets)
                and dict(self.debts) == dict(other.debts)
                and dict(self.cds) == dict(other.cds))

    @property
    def n(self) -> int:
        return len(self.banks)

    def replace(self, *, banks=None, external_assets=None, debts=None, cds=None) -> "FinancialNetwork":
        return FinancialNetwork(
            banks=self.banks if banks is None else banks,
            external_assets=self.external_assets if external_assets is None else external_assets,
            debts=self.debts if debts is None else debts,
            cds=self.cds if cds is None else cds,
        )

    def require(self, bank: str) -> None:
        if bank not in self._index:
            raise NetworkError(f"unknown bank {bank!r}")

    @cached_property
    def _index(self) -> Dict[str, int]:
        return {b: k for k, b in enumerate(self.banks)}

    @cached_property
    def cds_debtors(self) -> Tuple[str, ...]:
        return tuple(sorted({i for (i, _, _) in self.cds}))

    @cached_property
    def reference_banks(self) -> Tuple[str, ...]:
        return tuple(sorted({k for (_, _, k) in self.cds}))

    @cached_property
    def debt_debtors(self) -> frozenset:
        return frozenset(i for (i, _) in self.debts)

    def debt_out(self, bank: str) -> Fraction:
        """Sum of debt notionals owed by ``bank``."""
        return sum((c for (i, _), c in self.debts.items() if i == bank), Fraction(0))

    def worst_case_liability(self, bank: str) -> Fraction:
        """Total notionals of every contract where ``bank`` is the debtor."""
        return self.debt_out(bank) + sum(
            (c for (i, _, _), c in self.cds.items() if i == bank), Fraction(0))

    def is_sink(self, bank: str) -> bool:
        """True when ``bank`` is the debtor of no contract at all."""
        return self.worst_case_liability(bank) == 0

    @cached_property
    def trivially_solvent(self) -> frozenset:
        """Banks whose external assets strictly exceed every possible liability."""
        return frozenset(b for b in self.banks
                         if self.external_assets[b] > self.worst_case_liability(b))

    @cached_property
    def _plan(self) -> "_EvalPlan":
        return _EvalPlan(self)


class _EvalPlan:
    """Index-based contract lists, converted lazily to each number type."""

    def __init__(self, net: FinancialNetwork):
        idx = net._index
        self.n = net.n
        self.debts = [(idx[i], idx[j], c) for (i, j), c in net.debts.items()]
        self.cds = [(idx[i], idx[j], idx[k], c) for (i, j, k), c in net.cds.items()]
        self.assets = [net.external_assets[b] for b in net.banks]
        has_debt = set(i for i, _, _ in self.debts)
        has_cds = set(i for i, _, _, _ in self.cds)
        # banks whose only contracts are CDSes: l_i(r) can vanish with a_i(r) = 0
        self.cds_only = [k in has_cds and k not in has_debt for k in range(self.n)]
        self._converted = {}

    def numbers(self, kind):
        if kind not in self._converted:
            conv = to_decimal if kind is Decimal else to_fraction
            self._converted[kind] = (
                [conv(e) for e in self.assets],
                [(i, j, conv(c)) for i, j, c in self.debts],
                [(i, j, k, conv(c)) for i, j, k, c in self.cds],
            )
        return self._converted[kind]

    def evaluate(self, r: List[Number], kind):
        """Return (assets, total liabilities) as lists indexed like ``r``."""
        zero = kind(0)
        one = kind(1)
        e, debts, cds = self.numbers(kind)
        liab = [zero] * self.n
        assets = list(e)
        for i, j, c in debts:
            liab[i] += c
            assets[j] += r[i] * c
        for i, j, k, c in cds:
            owed = (one - r[k]) * c
            liab[i] += owed
            assets[j] += r[i] * owed
        return assets, liab


def _mode_of(values: Iterable) -> type:
    return Decimal if any(isinstance(v, (Decimal, float)) for v in values) else Fraction


def rate_list(net: FinancialNetwork, r: Rates, kind: Optional[type] = None) -> Tuple[List[Number], type]:
    """Validate ``r`` against ``net`` and return it as an index-ordered list."""
    missing = [b for b in net.banks if b not in r]
    if missing:
        raise NetworkError(f"rates missing for banks {missing}")
    extra = [b for b in r if b not in net._index]
    if extra:
        raise NetworkError(f"rates given for unknown banks {extra}")
    if kind is None:
        kind = _mode_of(r.values())
    conv = to_decimal if kind is Decimal else to_fraction
    values = [conv(r[b]) for b in net.banks]
    for b, v in zip(net.banks, values):
        if v < 0 or v > 1:
            raise NetworkError(f"rate of {b!r} is outside [0, 1]: {v}")
    return values, kind


def liability(net: FinancialNetwork, r: Rates, i: str, j: str) -> Number:
    """l_{i,j}(r): debt notional plus every CDS payout from i to j."""
    net.require(i)
    net.require(j)
    values, kind = rate_list(net, r)
    idx = net._index
    conv = to_decimal if kind is Decimal else to_fraction
    total = conv(net.debts.get((i, j), 0))
    for (a, b, k), c in net.cds.items():
        if a == i and b == j:
            total += (1 - values[idx[k]]) * conv(c)
    return total


def total_liability(net: FinancialNetwork, r: Rates, i: str) -> Number:
    net.require(i)
    values, kind = rate_list(net, r)
    return net._plan.evaluate(values, kind)[1][net._index[i]]


def assets(net: FinancialNetwork, r: Rates, i: str) -> Number:
    """a_i(r) = e_i plus the proportional payments bank i receives."""
    net.require(i)
    values, kind = rate_list(net, r)
    return net._plan.evaluate(values, kind)[0][net._index[i]]


def _apply_list(net: FinancialNetwork, values: List[Number], kind, strict: bool) -> List[Number]:
    plan = net._plan
    a, l = plan.evaluate(values, kind)
    one = kind(1)
    out = []
    for k in range(net.n):
        if l[k] == 0:
            if strict and a[k] == 0 and plan.cds_only[k]:
                raise DegenerateNetworkError(
                    f"bank {net.banks[k]!r} has no assets and only CDS liabilities")
            out.append(one)
        elif a[k] >= l[k]:
            out.append(one)
        else:
            out.append(a[k] / l[k])
    return out


def apply_f(net: FinancialNetwork, r: Rates, strict: bool = True) -> Dict[str, Number]:
    """One application of the clearing map, (f_I)_i(r) = a_i / max(a_i, l_i).

    The sink rule is applied pointwise: a bank with l_i(r) = 0 maps to 1.
    With ``strict`` a bank that has only CDS liabilities and no assets raises
    :class:`DegenerateNetworkError` when it hits the 0/0 case.
    """
    values, kind = rate_list(net, r)
    with localcontext() as c:
        c.prec = decimal_precision()
        out = _apply_list(net, values, kind, strict)
    return dict(zip(net.banks, out))


@dataclass
class ClearingReport:
    """Outcome of checking (or computing) a recovery rate vector."""

    rates: Dict[str, Number]
    per_bank_residual: Dict[str, Number]
    max_residual: Number
    trivially_solvent: frozenset
    eps: Optional[Number] = None
    passed: Optional[bool] = None
    violations: List[str] = field(default_factory=list)
    iterations: Optional[int] = None
    converged: Optional[bool] = None
    objective_value: Optional[Number] = None
    method: str = ""

    def to_json(self) -> dict:
        def fmt(v):
            return None if v is None else str(v)
        return {
            "method": self.method,
            "passed": self.passed,
            "eps": fmt(self.eps),
            "max_residual": fmt(self.max_residual),
            "rates": {b: fmt(v) for b, v in self.rates.items()},
            "per_bank_residual": {b: fmt(v) for b, v in self.per_bank_residual.items()},
            "trivially_solvent": sorted(self.trivially_solvent),
            "violations": list(self.violations),
            "iterations": self.iterations,
            "converged": self.converged,
            "objective_value": fmt(self.objective_value),
        }


def verify_crrv(net: FinancialNetwork, r: Rates, eps=0) -> ClearingReport:
    """Check the weak eps-approximate clearing conditions for ``r``.

    Condition (i): banks with external assets strictly above all their
    notionals must have rate exactly 1.  Condition (ii): every other bank has
    |r_i - f(r)_i| <= eps.  ``eps = 0`` checks an exact clearing vector when
    the rates are exact.
    """
    values, kind = rate_list(net, r)
    with localcontext() as c:
        c.prec = decimal_precision()
        eps_v = (to_decimal if kind is Decimal else to_fraction)(eps)
        if eps_v < 0:
            raise NetworkError(f"eps must be non-negative, got {eps}")
        fr = _apply_list(net, values, kind, strict=False)
        residual = {b: abs(v - f) for b, v, f in zip(net.banks, values, fr)}
    violations = []
    solvent = net.trivially_solvent
    for b, v in zip(net.banks, values):
        if b in solvent:
            if v != 1:
                violations.append(f"{b}: trivially solvent but rate {v} != 1")
        elif residual[b] > eps_v:
            violations.append(f"{b}: residual {residual[b]} > {eps_v}")
    max_res = max(residual.values(), default=kind(0))
    return ClearingReport(
        rates=dict(zip(net.banks, values)),
        per_bank_residual=residual,
        max_residual=max_res,
        trivially_solvent=solvent,
        eps=eps_v,
        passed=not violations,
        violations=violations,
        method="verify",
    )


# -- structural properties --------------------------------------------------

def check_nondegenerate(net: FinancialNetwork) -> Tuple[bool, List[str]]:
    """Every reference bank owes some debt; every CDS debtor has assets or debt."""
    violations = []
    for k in net.reference_banks:
        if k not in net.debt_debtors:
            violations.append(f"reference bank {k} is not the debtor of any debt contract")
    for i in net.cds_debtors:
        if net.external_assets[i] <= 0 and i not in net.debt_debtors:
            violations.append(f"CDS debtor {i} has no external assets and no debt contract")
    return not violations, violations


def check_central_cds_debtor(net: FinancialNetwork) -> Tuple[bool, Optional[str]]:
    """Return (holds, ccd).  ``ccd`` is None when there are zero or several CDS debtors."""
    debtors = net.cds_debtors
    if len(debtors) != 1:
        return False, None
    ccd = debtors[0]
    if ccd in net.debt_debtors:
        return False, ccd
    exposure = sum((c for (i, _, _), c in net.cds.items() if i == ccd), Fraction(0))
    return net.external_assets[ccd] >= exposure, ccd


def check_covered(net: FinancialNetwork) -> bool:
    return all(c <= net.debts.get((k, j), 0) for (_, j, k), c in net.cds.items())


def check_dedicated(net: FinancialNetwork) -> bool:
    for i in net.cds_debtors:
        if i in net.debt_debtors:
            return False
        if len({k for (d, _, k) in net.cds if d == i}) != 1:
            return False
    return True


def uncovered_cds(net: FinancialNetwork) -> List[Tuple[str, str, str]]:
    return [key for key, c in net.cds.items() if c > net.debts.get((key[2], key[1]), 0)]


def require_nondegenerate(net: FinancialNetwork) -> None:
    ok, violations = check_nondegenerate(net)
    if not ok:
        raise DegenerateNetworkError("; ".join(violations))


def scaled(net: FinancialNetwork, factor) -> FinancialNetwork:
    """Multiply every notional and external asset by ``factor`` > 0."""
    factor = to_fraction(factor)
    if factor <= 0:
        raise NetworkError("scaling factor must be positive")
    return FinancialNetwork(
        banks=net.banks,
        external_assets={b: e * factor for b, e in net.external_assets.items()},
        debts={k: c * factor for k, c in net.debts.items()},
        cds={k: c * factor for k, c in net.cds.items()},
    )
