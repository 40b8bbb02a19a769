"""Compile Pure-Circuit gates into gadget networks of debts and CDSes.

Each gadget reads its input banks' rates only through CDS references and
drives its output banks through CDS payouts.  Every CDS debtor holds external
assets equal to its notional, so it always pays in full.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .circuit import CircuitError, Gate, GadgetParams, PureCircuitInstance
from .network import FinancialNetwork, NetworkError, PropertyError

CCD_NAME = "CCD"


def variable_bank(var: str) -> str:
    return f"b_{var}"


@dataclass(frozen=True)
class GadgetSpec:
    """A gadget in local labels.

    ``roles`` maps a local label to the gate variable it stands for; all other
    labels are internal banks.  CDS entries are (debtor, creditor, reference,
    notional); each CDS debtor gets external assets equal to its notional.
    """

    kind: str
    labels: Tuple[str, ...]
    roles: Dict[str, str]
    debts: Tuple[Tuple[str, str, Fraction], ...]
    cds: Tuple[Tuple[str, str, str, Fraction], ...]


def gadget_spec(gate: Gate, params: GadgetParams) -> GadgetSpec:
    if not params.exact:
        raise CircuitError("gadgets need exact (rational) params")
    d = params.delta
    one = Fraction(1)
    first = 2 / (1 + 2 * d)
    if gate.kind == "NOT":
        u, w = gate.inputs[0], gate.outputs[0]
        return GadgetSpec(
            "NOT",
            ("in", "1", "2", "3", "4", "5", "6", "7", "8", "9", "out"),
            {"in": u, "out": w},
            (("in", "1", one), ("3", "4", one), ("6", "7", one), ("out", "9", one)),
            (("2", "3", "in", first),
             ("5", "6", "3", (1 + 2 * d) / (4 * d)),
             ("8", "out", "6", one)),
        )
    if gate.kind == "OR":
        (u, v), w = gate.inputs, gate.outputs[0]
        second = (1 + 2 * d) / (4 * d)
        return GadgetSpec(
            "OR",
            ("u", "v", "w") + tuple(str(k) for k in range(1, 14)),
            {"u": u, "v": v, "w": w},
            (("u", "1", one), ("3", "4", one), ("v", "7", one), ("9", "10", one),
             ("6", "w", one), ("12", "w", one), ("w", "13", one)),
            (("2", "3", "u", first), ("5", "6", "3", second),
             ("8", "9", "v", first), ("11", "12", "9", second)),
        )
    u = gate.inputs[0]
    v, w = gate.outputs
    return GadgetSpec(
        "PURIFY",
        ("u", "v", "w") + tuple(str(k) for k in range(1, 11)),
        {"u": u, "v": v, "w": w},
        (("u", "1", one), ("3", "4", one), ("6", "7", one), ("v", "10", one), ("w", "10", one)),
        (("2", "3", "u", first), ("5", "6", "u", Fraction(2)),
         ("8", "v", "3", (1 + 2 * d) / (2 * d)), ("9", "w", "6", 1 / (2 * d))),
    )


def _spec_network(spec: GadgetSpec, name) -> Tuple[Dict[str, Fraction], Dict, Dict]:
    assets = {name(lab): Fraction(0) for lab in spec.labels}
    debts = {(name(i), name(j)): c for i, j, c in spec.debts}
    cds = {}
    for i, j, k, c in spec.cds:
        cds[(name(i), name(j), name(k))] = c
        assets[name(i)] = c
    return assets, debts, cds


def compile_gate(gate: Gate, params: GadgetParams) -> FinancialNetwork:
    """The standalone gadget; variable banks are named ``b_<var>``."""
    spec = gadget_spec(gate, params)

    def name(lab):
        return variable_bank(spec.roles[lab]) if lab in spec.roles else lab

    assets, debts, cds = _spec_network(spec, name)
    return FinancialNetwork(tuple(assets), assets, debts, cds)


def compile_instance(inst: PureCircuitInstance, params: GadgetParams,
                     prune_orphans: bool = True) -> Tuple[FinancialNetwork, Dict[str, str]]:
    """One gadget per gate, with all copies of a variable's bank merged.

    The merged bank keeps the outgoing debt of the gadget where the variable
    is an output; the debts of its input copies are dropped.  A variable that
    is no gate's output keeps the input debt of the first gate that reads it.
    With ``prune_orphans`` the sinks left without any contract are removed.
    Internal banks are named ``g<k>.<TYPE>.<label>``.
    """
    if not inst.gates:
        raise CircuitError("circuit has no gates")
    assets: Dict[str, Fraction] = {}
    debts: Dict[Tuple[str, str], Fraction] = {}
    cds: Dict[Tuple[str, str, str], Fraction] = {}
    kept_input = {}
    dropped_sinks = set()
    varmap = {v: variable_bank(v) for v in inst.variables}
    for k, gate in enumerate(inst.gates):
        spec = gadget_spec(gate, params)

        def name(lab, k=k, spec=spec):
            if lab in spec.roles:
                return variable_bank(spec.roles[lab])
            return f"g{k}.{spec.kind}.{lab}"

        g_assets, g_debts, g_cds = _spec_network(spec, name)
        for b, e in g_assets.items():
            assets[b] = assets.get(b, Fraction(0)) + e
        cds.update(g_cds)
        inputs = {variable_bank(v) for v in gate.inputs}
        for (i, j), c in g_debts.items():
            if i in inputs:
                var = next(v for v in gate.inputs if variable_bank(v) == i)
                if var in inst.outputs or var in kept_input:
                    dropped_sinks.add(j)
                    continue
                kept_input[var] = k
            debts[(i, j)] = c
    if prune_orphans:
        touched = {b for key in debts for b in key} | {b for key in cds for b in key}
        for b in dropped_sinks:
            if b not in touched and assets[b] == 0:
                del assets[b]
    net = FinancialNetwork(tuple(assets), assets, debts, cds)
    return net, varmap


def merge_central_debtor(net: FinancialNetwork, name: Optional[str] = None) -> FinancialNetwork:
    """Replace every CDS debtor by a single debtor holding their combined assets.

    Requires each CDS debtor to have no debts and enough external assets to
    pay all its CDSes in full.  Contracts into merged banks are redirected to
    the new bank.
    """
    debtors = net.cds_debtors
    if not debtors:
        return net
    for i in debtors:
        if i in net.debt_debtors:
            raise PropertyError(f"CDS debtor {i} also owes debt")
        exposure = sum((c for (a, _, _), c in net.cds.items() if a == i), Fraction(0))
        if net.external_assets[i] < exposure:
            raise PropertyError(f"CDS debtor {i} cannot cover its CDS notionals")
    merged = set(debtors)
    ccd = name or CCD_NAME
    if ccd in net.banks and ccd not in merged:
        suffix = 1
        while f"{ccd}_{suffix}" in net.banks:
            suffix += 1
        ccd = f"{ccd}_{suffix}"

    def m(b):
        return ccd if b in merged else b

    banks = [b for b in net.banks if b not in merged] + [ccd]
    assets = {b: net.external_assets[b] for b in banks if b != ccd}
    assets[ccd] = sum((net.external_assets[i] for i in merged), Fraction(0))
    debts: Dict = {}
    for (i, j), c in net.debts.items():
        key = (m(i), m(j))
        debts[key] = debts.get(key, Fraction(0)) + c
    cds: Dict = {}
    for (i, j, k), c in net.cds.items():
        key = (m(i), m(j), m(k))
        cds[key] = cds.get(key, Fraction(0)) + c
    try:
        return FinancialNetwork(tuple(banks), assets, debts, cds)
    except NetworkError as exc:
        raise PropertyError(f"merging CDS debtors creates an invalid contract: {exc}")


def outgoing_counts(net: FinancialNetwork) -> Dict[str, int]:
    """Number of contracts each bank is the debtor of."""
    counts = {b: 0 for b in net.banks}
    for i, _ in net.debts:
        counts[i] += 1
    for i, _, _ in net.cds:
        counts[i] += 1
    return counts


def reference_counts(net: FinancialNetwork) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for _, _, k in net.cds:
        counts[k] = counts.get(k, 0) + 1
    return counts

