"""Clearing recovery rates in financial networks with debts and credit default swaps."""

from .circuit import (
    GadgetParams,
    PureCircuitInstance,
    Trit,
    brute_force_solve,
    check_satisfies,
    decode,
    optimal_params,
    params_from_delta,
    parse_circuit,
)
from .claims import check_claims
from .covered import solve_covered_central, solve_debt_only, transform_step
from .gadgets import compile_instance, merge_central_debtor
from .instances import three_gate_circuit, cds_feedback_network
from .intervals import UnitInterval, gate_output_range
from .iterate import iterate, multi_start
from .lp import LinearProgram, lp_solve
from .mblp import build_mblp, emit_mbnlp, lp_restrict, solve_exhaustive
from .network import (
    ClearingReport,
    DegenerateNetworkError,
    FinancialNetwork,
    NetworkError,
    PropertyError,
    apply_f,
    check_central_cds_debtor,
    check_covered,
    check_dedicated,
    check_nondegenerate,
    verify_crrv,
)

__version__ = "0.1.0"
