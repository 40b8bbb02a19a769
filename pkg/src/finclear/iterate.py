"""Damped fixed-point iteration of the clearing map, in decimal arithmetic.

This is a heuristic: it reports the residual it actually reached and never
claims convergence it has not verified.
"""

from __future__ import annotations

import random
from decimal import Decimal, localcontext
from typing import Mapping, Optional

from .network import (
    ClearingReport,
    FinancialNetwork,
    NetworkError,
    PropertyError,
    _apply_list,
    check_nondegenerate,
    decimal_precision,
    rate_list,
    to_decimal,
    verify_crrv,
)

DEFAULT_EPS = Decimal("1e-9")
DEFAULT_MAX_ITER = 100_000


def _require_ok(net: FinancialNetwork) -> None:
    ok, violations = check_nondegenerate(net)
    if not ok:
        raise PropertyError("degenerate network: " + "; ".join(violations))


def _damping(value) -> Decimal:
    d = to_decimal(value)
    if not 0 < d <= 1:
        raise NetworkError(f"damping must lie in (0, 1], got {value}")
    return d


def iterate(net: FinancialNetwork, r0: Optional[Mapping[str, object]] = None, damping=1,
            max_iter: int = DEFAULT_MAX_ITER, target_eps=DEFAULT_EPS) -> ClearingReport:
    """Run r <- (1 - damping) r + damping f(r) from r0 (default all ones).

    Banks whose assets exceed every possible liability are pinned to 1.
    Stops as soon as the max residual |r - f(r)| is at most ``target_eps``.
    """
    _require_ok(net)
    alpha = _damping(value=damping)
    if max_iter < 0:
        raise NetworkError("max_iter must be non-negative")
    with localcontext() as ctx:
        ctx.prec = decimal_precision()
        eps = to_decimal(target_eps)
        if r0 is None:
            r = [Decimal(1)] * net.n
        else:
            r, _ = rate_list(net, r0, Decimal)
        pinned = [b in net.trivially_solvent for b in net.banks]
        r = [Decimal(1) if p else v for v, p in zip(r, pinned)]
        one_minus = 1 - alpha
        converged = False
        steps = 0
        while True:
            f = _apply_list(net, r, Decimal, strict=False)
            residual = max((abs(a - b) for a, b in zip(r, f)), default=Decimal(0))
            if residual <= eps:
                converged = True
                break
            if steps >= max_iter:
                break
            if alpha == 1:
                r = [Decimal(1) if p else b for b, p in zip(f, pinned)]
            else:
                r = [Decimal(1) if p else one_minus * a + alpha * b
                     for a, b, p in zip(r, f, pinned)]
            steps += 1
        rates = dict(zip(net.banks, r))
    report = verify_crrv(net, rates, eps)
    report.iterations = steps
    report.converged = converged and report.passed
    report.method = "iterate"
    return report


def random_start(net: FinancialNetwork, rng: random.Random) -> dict:
    return {b: Decimal(repr(rng.random())) for b in net.banks}


def multi_start(net: FinancialNetwork, starts: int = 8, seed: int = 0, damping=Decimal("0.5"),
                max_iter: int = DEFAULT_MAX_ITER, target_eps=DEFAULT_EPS,
                stop_early: bool = False) -> ClearingReport:
    """Iterate from ``starts`` seeded random points; keep the smallest residual.

    Ties go to the earlier start.  With ``stop_early`` the search ends at the
    first start that reaches ``target_eps``, which gives the same answer when
    residual ties are impossible to beat (a converged run is kept unless a
    later one is strictly better, so this trades exhaustiveness for speed).
    """
    if starts < 1:
        raise NetworkError("need at least one start")
    rng = random.Random(seed)
    best = None
    for k in range(starts):
        report = iterate(net, random_start(net, rng), damping, max_iter, target_eps)
        report.method = f"multi-start[{k}]"
        if best is None or report.max_residual < best.max_residual:
            best = report
        if stop_early and best.converged:
            break
    return best
