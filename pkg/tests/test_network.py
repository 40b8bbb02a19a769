from decimal import Decimal
from fractions import Fraction as F
import random

import pytest
from hypothesis import given, strategies as st

from finclear.instances import cds_feedback_network
from finclear.network import (
    DegenerateNetworkError,
    FinancialNetwork,
    NetworkError,
    apply_f,
    assets,
    check_central_cds_debtor,
    check_covered,
    check_dedicated,
    check_nondegenerate,
    liability,
    total_liability,
    verify_crrv,
)
from netgen import random_ccd, random_debt_only

HALF = F(1, 2)
APP_A_FIXED = {"1": 1, "2": HALF, "3": 1, "4": 1, "5": HALF, "6": 1}


def two_banks(e_a=HALF, e_b=0):
    return FinancialNetwork(("A", "B"), {"A": e_a, "B": e_b}, {("A", "B"): 1})


# -- construction ------------------------------------------------------------

def test_banks_are_sorted_and_maps_frozen():
    net = FinancialNetwork(("z", "a"), {"z": 1}, {("z", "a"): 2})
    assert net.banks == ("a", "z")
    assert net.external_assets["a"] == 0
    with pytest.raises(TypeError):
        net.debts[("a", "z")] = 1


@pytest.mark.parametrize("kwargs", [
    dict(banks=("a", "a"), external_assets={}),
    dict(banks=("a",), external_assets={"a": -1}),
    dict(banks=("a",), external_assets={"b": 1}),
    dict(banks=("a", "b"), external_assets={}, debts={("a", "c"): 1}),
    dict(banks=("a", "b"), external_assets={}, debts={("a", "a"): 1}),
    dict(banks=("a", "b"), external_assets={}, debts={("a", "b"): 0}),
    dict(banks=("a", "b", "c"), external_assets={}, cds={("a", "b", "b"): 1}),
    dict(banks=("a", "b", "c"), external_assets={}, cds={("a", "b", "c"): -1}),
])
def test_malformed_networks_rejected(kwargs):
    with pytest.raises(NetworkError):
        FinancialNetwork(**kwargs)


# -- liabilities and assets --------------------------------------------------

def test_feedback_network_liability_of_bank_2():
    net = cds_feedback_network("1/4")
    r = dict(APP_A_FIXED)
    assert total_liability(net, r, "2") == F(3, 2)
    assert liability(net, r, "2", "1") == HALF
    assert liability(net, r, "2", "3") == 1


def test_no_contracts_means_no_liability():
    net = FinancialNetwork(("a", "b"), {"a": 3})
    assert total_liability(net, {"a": F(1, 3), "b": 0}, "a") == 0


def test_single_cds_liability():
    net = FinancialNetwork(("i", "j", "R", "s"), {"i": 4}, {("R", "s"): 1}, {("i", "j", "R"): 4})
    r = {"i": 1, "j": 1, "R": F(3, 4), "s": 1}
    assert liability(net, r, "i", "j") == 1


def test_assets():
    net = cds_feedback_network("1/4")
    for r2 in (0, F(1, 3), 1):
        assert assets(net, {**APP_A_FIXED, "2": r2}, "2") == F(3, 4)
    lone = FinancialNetwork(("x",), {"x": 5})
    assert assets(lone, {"x": 1}, "x") == 5
    assert assets(two_banks(e_b=F(1, 3)), {"A": HALF, "B": 1}, "B") == F(1, 3) + HALF


# -- clearing map ------------------------------------------------------------

def test_feedback_network_fixed_point():
    net = cds_feedback_network("1/4")
    assert apply_f(net, APP_A_FIXED) == {b: F(v) for b, v in APP_A_FIXED.items()}


def test_sink_maps_to_one():
    net = two_banks()
    for rb in (0, F(1, 7), 1):
        assert apply_f(net, {"A": 0, "B": rb})["B"] == 1


def test_two_bank_step():
    assert apply_f(two_banks(), {"A": 1, "B": 1}) == {"A": HALF, "B": 1}


def test_cds_only_debtor_without_assets_is_degenerate_at_zero_zero():
    net = FinancialNetwork(("i", "j", "R", "s"), {}, {("R", "s"): 1}, {("i", "j", "R"): 1})
    with pytest.raises(DegenerateNetworkError):
        apply_f(net, {"i": 1, "j": 1, "R": 1, "s": 1})
    assert apply_f(net, {"i": 1, "j": 1, "R": 1, "s": 1}, strict=False)["i"] == 1


def test_decimal_and_exact_agree():
    net = cds_feedback_network("1/4")
    r = {b: Decimal("0.3") for b in net.banks}
    exact = apply_f(net, {b: F(3, 10) for b in net.banks})
    approx = apply_f(net, r)
    for b in net.banks:
        assert abs(F(approx[b]) - exact[b]) < F(1, 10**40)


# -- verification ------------------------------------------------------------

def test_verify_feedback_network():
    rep = verify_crrv(cds_feedback_network("1/4"), APP_A_FIXED, 0)
    assert rep.passed and rep.max_residual == 0


def test_verify_perturbed_point():
    net = cds_feedback_network("1/4")
    r = {**APP_A_FIXED, "2": F(3, 5)}
    rep = verify_crrv(net, r, F(1, 100))
    assert not rep.passed
    # l_2 = 1 + (1 - r_5) = 3/2 with r_5 = 1/2, so f_2 = (3/4)/(3/2) = 1/2
    assert rep.per_bank_residual["2"] == F(3, 5) - F(1, 2)


def test_condition_one_requires_rate_one():
    lone = FinancialNetwork(("x",), {"x": 10})
    assert verify_crrv(lone, {"x": 1}, 0).passed
    rich = FinancialNetwork(("x", "y"), {"x": 10}, {("x", "y"): 1})
    rep = verify_crrv(rich, {"x": F(99, 100), "y": 1}, F(1, 2))
    assert not rep.passed and "x" in rep.trivially_solvent


def test_verify_rejects_bad_vectors():
    net = two_banks()
    with pytest.raises(NetworkError):
        verify_crrv(net, {"A": 1}, 0)
    with pytest.raises(NetworkError):
        verify_crrv(net, {"A": F(3, 2), "B": 1}, 0)
    with pytest.raises(NetworkError):
        verify_crrv(net, {"A": 1, "B": 1}, -1)


def test_report_json_roundtrip_fields():
    rep = verify_crrv(cds_feedback_network("1/4"), APP_A_FIXED, 0)
    data = rep.to_json()
    assert data["passed"] is True and data["rates"]["2"] == "1/2"
    assert set(data) >= {"max_residual", "per_bank_residual", "violations", "iterations"}


# -- properties --------------------------------------------------------------

def test_nondegeneracy():
    assert check_nondegenerate(cds_feedback_network("1/4"))[0]
    bad = FinancialNetwork(("i", "j", "R"), {"i": 1}, {}, {("i", "j", "R"): 1})
    ok, violations = check_nondegenerate(bad)
    assert not ok and any("R" in v for v in violations)
    poor = FinancialNetwork(("i", "j", "R", "s"), {}, {("R", "s"): 1}, {("i", "j", "R"): 1})
    assert not check_nondegenerate(poor)[0]


def test_central_cds_debtor():
    net = FinancialNetwork(("d", "a", "b", "x", "y", "s"), {"d": 5},
                           {("x", "s"): 1, ("y", "s"): 1},
                           {("d", "a", "x"): 2, ("d", "b", "y"): 3})
    assert check_central_cds_debtor(net) == (True, "d")
    assert check_central_cds_debtor(net.replace(external_assets={"d": 4}))[0] is False
    assert check_central_cds_debtor(cds_feedback_network("1/4")) == (False, None)


def test_covered_and_dedicated():
    base = dict(banks=("i", "j", "R"), external_assets={"i": 3})
    covered = FinancialNetwork(**base, debts={("R", "j"): 5}, cds={("i", "j", "R"): 3})
    uncovered = FinancialNetwork(**base, debts={("R", "i"): 5}, cds={("i", "j", "R"): 3})
    assert check_covered(covered) and not check_covered(uncovered)
    assert check_dedicated(covered)
    two_refs = FinancialNetwork(("i", "j", "R", "Q"), {"i": 3}, {("R", "j"): 1, ("Q", "j"): 1},
                                {("i", "j", "R"): 1, ("i", "j", "Q"): 1})
    assert not check_dedicated(two_refs)
    assert not check_dedicated(cds_feedback_network("1/4"))


# -- invariants --------------------------------------------------------------

@given(seed=st.integers(0, 10**6))
def test_clearing_map_stays_in_unit_box(seed):
    rng = random.Random(seed)
    net = random_ccd(rng)
    r = {b: F(rng.randint(0, 8), 8) for b in net.banks}
    out = apply_f(net, r)
    assert all(0 <= v <= 1 for v in out.values())


@given(seed=st.integers(0, 10**6))
def test_scaling_preserves_clearing_vectors(seed):
    from finclear.covered import solve_debt_only
    from finclear.network import scaled

    net = random_debt_only(random.Random(seed), n_max=8)
    r = solve_debt_only(net).rates
    assert verify_crrv(scaled(net, F(7, 3)), r, 0).passed
