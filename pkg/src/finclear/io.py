"""Network JSON and rates CSV serialization."""

from __future__ import annotations

import csv
import io
import json
from decimal import Decimal
from fractions import Fraction
from typing import Dict, Mapping, TextIO

from .network import FinancialNetwork, NetworkError, Number


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or an integer literal (ints are accepted as-is)."""
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise NetworkError(f"expected a rational string, got {text!r}")
    s = text.strip()
    try:
        if "/" in s:
            p, q = s.split("/")
            value = Fraction(int(p), int(q))
        else:
            value = Fraction(int(s))
    except (ValueError, ZeroDivisionError):
        raise NetworkError(f"not a rational string: {text!r}")
    return value


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def network_to_dict(net: FinancialNetwork) -> dict:
    return {
        "banks": [{"id": b, "external_assets": format_rational(net.external_assets[b])}
                  for b in net.banks],
        "debt": [{"debtor": i, "creditor": j, "notional": format_rational(c)}
                 for (i, j), c in net.debts.items()],
        "cds": [{"debtor": i, "creditor": j, "reference": k, "notional": format_rational(c)}
                for (i, j, k), c in net.cds.items()],
    }


def network_from_dict(data: Mapping) -> FinancialNetwork:
    """Build a network; repeated contracts between the same banks are summed."""
    try:
        banks = [entry["id"] for entry in data["banks"]]
        assets = {entry["id"]: parse_rational(entry.get("external_assets", "0"))
                  for entry in data["banks"]}
        debts: Dict = {}
        for entry in data.get("debt", []):
            key = (entry["debtor"], entry["creditor"])
            debts[key] = debts.get(key, Fraction(0)) + parse_rational(entry["notional"])
        cds: Dict = {}
        for entry in data.get("cds", []):
            key = (entry["debtor"], entry["creditor"], entry["reference"])
            cds[key] = cds.get(key, Fraction(0)) + parse_rational(entry["notional"])
    except (KeyError, TypeError) as exc:
        raise NetworkError(f"malformed network JSON: missing or bad field {exc}")
    if not all(isinstance(b, str) for b in banks):
        raise NetworkError("bank ids must be strings")
    return FinancialNetwork(banks=tuple(banks), external_assets=assets, debts=debts, cds=cds)


def dumps_network(net: FinancialNetwork) -> str:
    return json.dumps(network_to_dict(net), indent=2) + "\n"


def loads_network(text: str) -> FinancialNetwork:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkError(f"invalid JSON: {exc}")
    return network_from_dict(data)


def load_network(path) -> FinancialNetwork:
    with open(path) as fh:
        return loads_network(fh.read())


def save_network(net: FinancialNetwork, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_network(net))


# -- rates CSV --------------------------------------------------------------

def format_rate(v: Number) -> str:
    if isinstance(v, Fraction):
        return format_rational(v)
    return format(v, "f") if isinstance(v, Decimal) else str(v)


def dumps_rates(rates: Mapping[str, Number], with_decimal: bool = False, digits: int = 20) -> str:
    """CSV with header ``bank,rate``; exact rates are written as p/q.

    ``with_decimal`` adds a ``rate_decimal`` column for exact rates.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["bank", "rate", "rate_decimal"] if with_decimal else ["bank", "rate"])
    for bank in sorted(rates):
        v = rates[bank]
        row = [bank, format_rate(v)]
        if with_decimal:
            if isinstance(v, Fraction):
                d = Decimal(v.numerator) / Decimal(v.denominator)
                row.append(format(round(d, digits), "f"))
            else:
                row.append(format_rate(v))
        writer.writerow(row)
    return buf.getvalue()


def parse_rate(text: str) -> Number:
    s = text.strip()
    if "/" in s or s.lstrip("-").isdigit():
        return parse_rational(s)
    try:
        return Decimal(s)
    except Exception:
        raise NetworkError(f"not a rate: {text!r}")


def loads_rates(text: str) -> Dict[str, Number]:
    """Read a rates CSV; extra columns are ignored."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header[:2]] != ["bank", "rate"]:
        raise NetworkError("rates CSV must start with header 'bank,rate'")
    rates: Dict[str, Number] = {}
    for row in reader:
        if not row:
            continue
        if len(row) < 2:
            raise NetworkError(f"bad rates row {row!r}")
        rates[row[0].strip()] = parse_rate(row[1])
    if any(isinstance(v, Decimal) for v in rates.values()):
        rates = {b: v if isinstance(v, Decimal) else Decimal(v.numerator) / Decimal(v.denominator)
                 for b, v in rates.items()}
    return rates


def load_rates(path) -> Dict[str, Number]:
    with open(path) as fh:
        return loads_rates(fh.read())


def read_text(stream: TextIO) -> str:
    return stream.read()
