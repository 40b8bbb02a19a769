"""Command-line entry point: ``finclear <subcommand> ...``.

Exit codes: 0 on success, 1 when a verification fails, 2 on bad input.
Networks are read from ``--network`` or standard input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Dict, Optional, Sequence

from . import io as fio
from .circuit import (
    CircuitError,
    assignment_to_json,
    check_satisfies,
    decode,
    format_assignment,
    parse_circuit,
    params_from_delta,
)
from .claims import check_claims, format_table
from .covered import solve_covered_central, transform_all
from .gadgets import compile_instance, merge_central_debtor
from .instances import cds_feedback_network
from .iterate import DEFAULT_MAX_ITER, iterate, multi_start
from .lp import LPError
from .mblp import emit_mbnlp, solve_exhaustive
from .network import (
    ClearingReport,
    FinancialNetwork,
    NetworkError,
    check_central_cds_debtor,
    check_covered,
    check_dedicated,
    check_nondegenerate,
    uncovered_cds,
    verify_crrv,
)

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _read(path: Optional[str]) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(str(exc))


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w") as fh:
        fh.write(text)


def _network_and_extra(path: Optional[str]):
    text = _read(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid network JSON: {exc}")
    if not isinstance(data, dict):
        raise InputError("network JSON must be an object")
    return fio.network_from_dict(data), data


def _network(path: Optional[str]) -> FinancialNetwork:
    return _network_and_extra(path)[0]


def _json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def parse_objective(text: str) -> Dict[str, Fraction]:
    """Parse ``"2*b1 + 1/2*b2 - b3"``; ``·`` also works as the product sign.

    Terms are separated by `` + `` or `` - `` with spaces, so bank names may
    contain hyphens.
    """
    coeffs: Dict[str, Fraction] = {}
    body = text.replace("·", "*").replace(" - ", " + -").strip()
    if body.startswith("+"):
        body = body[1:]
    for term in body.split("+"):
        term = term.strip()
        if not term:
            raise InputError(f"empty term in objective {text!r}")
        sign = 1
        if term.startswith("-"):
            sign, term = -1, term[1:].strip()
        if "*" in term:
            coeff, bank = (s.strip() for s in term.split("*", 1))
            value = fio.parse_rational(coeff)
        else:
            value, bank = Fraction(1), term
        if not bank:
            raise InputError(f"missing bank in objective term {term!r}")
        coeffs[bank] = coeffs.get(bank, Fraction(0)) + sign * value
    return coeffs


def _emit_report(report: ClearingReport, args, with_decimal: bool = False) -> int:
    if args.json:
        sys.stdout.write(_json(report.to_json()))
    else:
        _write(getattr(args, "out", None), fio.dumps_rates(report.rates, with_decimal=with_decimal))
        print(f"method={report.method} max_residual={report.max_residual} "
              f"iterations={report.iterations} passed={report.passed}", file=sys.stderr)
        for v in report.violations:
            print(f"violation: {v}", file=sys.stderr)
    return OK if report.passed else FAILED


# -- subcommands ------------------------------------------------------------

def cmd_check(args) -> int:
    net = _network(args.network)
    nondeg, violations = check_nondegenerate(net)
    ccd_ok, ccd = check_central_cds_debtor(net)
    props = {
        "banks": net.n,
        "debts": len(net.debts),
        "cds": len(net.cds),
        "nondegenerate": nondeg,
        "violations": violations,
        "debt_only": not net.cds,
        "covered": check_covered(net),
        "uncovered_cds": [list(k) for k in uncovered_cds(net)],
        "dedicated": check_dedicated(net),
        "central_cds_debtor": ccd if ccd_ok else None,
    }
    if args.json:
        sys.stdout.write(_json(props))
    else:
        for key, value in props.items():
            print(f"{key}: {value}")
    return OK if nondeg else FAILED


def cmd_solve_iterate(args) -> int:
    net = _network(args.network)
    damping = fio.parse_rate(args.damping)
    eps = fio.parse_rate(args.eps)
    if args.starts > 1:
        report = multi_start(net, args.starts, args.seed, damping, args.max_iter, eps)
    else:
        report = iterate(net, None, damping, args.max_iter, eps)
    return _emit_report(report, args)


def cmd_solve_covered(args) -> int:
    report = solve_covered_central(_network(args.network))
    return _emit_report(report, args, with_decimal=True)


def cmd_solve_mblp(args) -> int:
    net = _network(args.network)
    objective = parse_objective(args.objective) if args.objective else None
    report = solve_exhaustive(net, objective, args.sense)
    return _emit_report(report, args)


def cmd_emit_mbnlp(args) -> int:
    net = _network(args.network)
    emit_mbnlp(net, sys.stdout if args.out in (None, "-") else args.out)
    return OK


def cmd_transform_covered(args) -> int:
    net = _network(args.network)
    flat, dummies = transform_all(net)
    _write(args.out, fio.dumps_network(flat))
    print(f"dummies: {', '.join(dummies) or '(none)'}", file=sys.stderr)
    return OK


def cmd_compile_circuit(args) -> int:
    inst = parse_circuit(_read(args.circuit))
    params = params_from_delta(fio.parse_rational(args.delta))
    net, varmap = compile_instance(inst, params, prune_orphans=not args.keep_orphans)
    if args.merge:
        net = merge_central_debtor(net)
    data = fio.network_to_dict(net)
    data["varmap"] = dict(varmap)
    data["delta"] = fio.format_rational(params.delta)
    data["epsilon"] = fio.format_rational(params.epsilon)
    _write(args.out, _json(data))
    if args.varmap_out:
        _write(args.varmap_out, _json(dict(varmap)))
    return OK


def cmd_decode(args) -> int:
    net, data = _network_and_extra(args.network)
    if args.varmap:
        varmap = json.loads(_read(args.varmap))
    elif "varmap" in data:
        varmap = data["varmap"]
    else:
        raise InputError("no varmap: pass --varmap or a compiled network")
    delta = args.delta or data.get("delta", "2/13")
    rates = fio.loads_rates(_read(args.rates))
    x = decode(rates, varmap, fio.parse_rational(delta))
    result = {"assignment": assignment_to_json(x)}
    status = OK
    if args.circuit:
        ok, gate = check_satisfies(parse_circuit(_read(args.circuit)), x)
        result["satisfies"] = ok
        result["violated_gate"] = None if gate is None else str(gate)
        status = OK if ok else FAILED
    if args.json:
        sys.stdout.write(_json(result))
    else:
        print(format_assignment(x))
        if args.circuit:
            print(f"satisfies: {result['satisfies']}")
    return status


def cmd_verify(args) -> int:
    net = _network(args.network)
    rates = fio.loads_rates(_read(args.rates))
    report = verify_crrv(net, rates, fio.parse_rate(args.eps))
    report.method = "verify"
    if args.json:
        sys.stdout.write(_json(report.to_json()))
    else:
        print(f"passed={report.passed} max_residual={report.max_residual} eps={report.eps}")
        for v in report.violations:
            print(f"violation: {v}")
    return OK if report.passed else FAILED


def cmd_check_claims(args) -> int:
    rows = check_claims(fio.parse_rational(args.delta),
                        None if args.eps is None else fio.parse_rational(args.eps),
                        args.points)
    if args.json:
        sys.stdout.write(_json([r.to_json() for r in rows]))
    else:
        print(format_table(rows))
    return OK if all(r.passed for r in rows) else FAILED


def cmd_example(args) -> int:
    net = cds_feedback_network(fio.parse_rational(args.c))
    _write(args.out, fio.dumps_network(net))
    return OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finclear",
                                     description="Clearing in financial networks with debts and CDSes.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, func, help_text, network=True, json_flag=True):
        p = sub.add_parser(name, help=help_text)
        if network:
            p.add_argument("--network", help="network JSON (default: stdin)")
        if json_flag:
            p.add_argument("--json", action="store_true", help="print a JSON report")
        p.set_defaults(func=func)
        return p

    add("check", cmd_check, "report network properties and non-degeneracy")

    p = add("solve-iterate", cmd_solve_iterate, "damped fixed-point iteration")
    p.add_argument("--eps", default="1e-9")
    p.add_argument("--damping", default="1/2")
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--starts", type=int, default=1,
                   help="random starts; 1 iterates once from all ones")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out")

    p = add("solve-covered", cmd_solve_covered, "exact solver for covered CDSes with a central debtor")
    p.add_argument("--out")

    p = add("solve-mblp", cmd_solve_mblp, "exact solver for central-CDS-debtor networks")
    p.add_argument("--objective", help='linear objective, e.g. "2*b1 + b2"')
    p.add_argument("--sense", choices=("max", "min"), default="max")
    p.add_argument("--out")

    p = add("emit-mbnlp", cmd_emit_mbnlp, "write the mixed-binary nonlinear program", json_flag=False)
    p.add_argument("--out")

    p = add("transform-covered", cmd_transform_covered,
            "rewrite covered CDSes as debts", json_flag=False)
    p.add_argument("--out")

    p = add("compile-circuit", cmd_compile_circuit, "compile a Pure-Circuit instance",
            network=False, json_flag=False)
    p.add_argument("--circuit", help="circuit text (default: stdin)")
    p.add_argument("--delta", default="2/13")
    p.add_argument("--merge", action="store_true", help="merge CDS debtors into one central debtor")
    p.add_argument("--keep-orphans", action="store_true",
                   help="keep output-copy banks that nothing reads")
    p.add_argument("--varmap-out")
    p.add_argument("--out")

    p = add("decode", cmd_decode, "map variable-bank rates to 0/1/⊥")
    p.add_argument("--rates", required=True)
    p.add_argument("--varmap")
    p.add_argument("--delta")
    p.add_argument("--circuit", help="also check the assignment against this circuit")

    p = add("verify", cmd_verify, "check an eps-approximate clearing vector")
    p.add_argument("--rates", required=True)
    p.add_argument("--eps", default="0")

    p = add("check-claims", cmd_check_claims, "verify the gadget output bands", network=False)
    p.add_argument("--delta", default="2/13")
    p.add_argument("--eps")
    p.add_argument("--points", type=int, default=1000)

    p = add("example", cmd_example, "emit the two-CDS feedback network", network=False, json_flag=False)
    p.add_argument("--c", default="1/4")
    p.add_argument("--out")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    try:
        return args.func(args)
    except (InputError, NetworkError, CircuitError, LPError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
