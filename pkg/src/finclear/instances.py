"""Small reference instances: the two-CDS feedback loop and a three-gate circuit."""

from __future__ import annotations

from fractions import Fraction

from .circuit import PureCircuitInstance, parse_circuit
from .network import FinancialNetwork, NetworkError, to_fraction

THREE_GATE_TEXT = """\
# three gates sharing variable v; a solution is u = v = ⊥, w = y = 1
NOT u v
OR v w y
PURIFY v u w
"""


def cds_feedback_network(c="1/4") -> FinancialNetwork:
    """Banks 2 and 5 insure each other's creditors; all notionals are 1.

    e_2 = e_5 = 1 - c.  Bank 2 owes bank 3 a debt and bank 1 a CDS on bank 5;
    bank 5 owes bank 4 a debt and bank 6 a CDS on bank 2.  For c in (0, 1) the
    symmetric clearing vector has r_2 = r_5 = 1 - sqrt(c).
    """
    c = to_fraction(Fraction(c) if isinstance(c, str) else c)
    if not 0 < c < 1:
        raise NetworkError(f"c must lie in (0, 1), got {c}")
    banks = ("1", "2", "3", "4", "5", "6")
    assets = {b: Fraction(0) for b in banks}
    assets["2"] = assets["5"] = 1 - c
    debts = {("2", "3"): Fraction(1), ("5", "4"): Fraction(1)}
    cds = {("2", "1", "5"): Fraction(1), ("5", "6", "2"): Fraction(1)}
    return FinancialNetwork(banks, assets, debts, cds)


def three_gate_circuit() -> PureCircuitInstance:
    return parse_circuit(THREE_GATE_TEXT)
