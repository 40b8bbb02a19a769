from decimal import Decimal, localcontext
from fractions import Fraction as F
import itertools

import pytest
from hypothesis import given, strategies as st

from finclear.circuit import (
    CircuitError,
    Gate,
    GadgetParams,
    PureCircuitInstance,
    Trit,
    all_solutions,
    brute_force_solve,
    check_satisfies,
    decode,
    decode_rate,
    epsilon_of,
    format_assignment,
    optimal_constants,
    optimal_params,
    params_from_delta,
    parse_circuit,
)
from finclear.instances import three_gate_circuit

Z, O, B = Trit.ZERO, Trit.ONE, Trit.BOT
D = F(2, 13)


def x_of(**kw):
    return {k: Trit.parse(v) for k, v in kw.items()}


# -- parsing ---------------------------------------------------------------------

def test_parse_three_gate_circuit():
    inst = three_gate_circuit()
    assert inst.variables == ("u", "v", "w", "y")
    assert [str(g) for g in inst.gates] == ["NOT u v", "OR v w y", "PURIFY v u w"]
    assert parse_circuit(inst.to_text()) == inst


@pytest.mark.parametrize("text", [
    "XOR a b", "NOT a", "OR a b", "PURIFY a b b", "NOT a b\nNOT c b",
])
def test_malformed_circuits(text):
    with pytest.raises(CircuitError):
        parse_circuit(text)


def test_trit_parse():
    assert [Trit.parse(s) for s in ("0", "1", "⊥", "bot")] == [Z, O, B, B]
    assert str(B) == "⊥"
    with pytest.raises(CircuitError):
        Trit.parse("2")


# -- satisfaction ----------------------------------------------------------------

def test_gate_truth_tables():
    not_gate, or_gate, pur = Gate("NOT", ("u",), ("w",)), Gate("OR", ("u", "v"), ("w",)), \
        Gate("PURIFY", ("u",), ("v", "w"))
    assert not not_gate.satisfied_by(x_of(u=0, w=0))
    assert not_gate.satisfied_by(x_of(u=0, w=1))
    assert all(not_gate.satisfied_by({"u": B, "w": t}) for t in Trit)
    assert or_gate.satisfied_by(x_of(u=B, v=1, w=1))
    assert not or_gate.satisfied_by(x_of(u=B, v=1, w="⊥"))
    assert not or_gate.satisfied_by(x_of(u=0, v=0, w=1))
    assert all(or_gate.satisfied_by({"u": Z, "v": B, "w": t}) for t in Trit)
    assert not pur.satisfied_by(x_of(u=B, v=B, w=B))
    assert pur.satisfied_by(x_of(u=B, v=B, w=0))
    assert pur.satisfied_by(x_of(u=1, v=1, w=1))
    assert not pur.satisfied_by(x_of(u=1, v=1, w=0))


def test_three_gate_reference_assignment_satisfies():
    ok, bad = check_satisfies(three_gate_circuit(), x_of(u="⊥", v="⊥", w=1, y=1))
    assert ok and bad is None


def test_check_satisfies_reports_first_violated_gate():
    inst = parse_circuit("NOT u w\nNOT w z\n")
    ok, bad = check_satisfies(inst, x_of(u=0, w=1, z=1))
    assert not ok and str(bad) == "NOT w z"
    with pytest.raises(CircuitError):
        check_satisfies(inst, x_of(u=0, w=1))


# -- brute force -----------------------------------------------------------------

def test_brute_force_single_not():
    assert brute_force_solve(parse_circuit("NOT u w")) == x_of(u=0, w=1)


def test_three_gate_solutions():
    sols = list(all_solutions(three_gate_circuit()))
    assert x_of(u="⊥", v="⊥", w=1, y=1) in sols
    assert brute_force_solve(three_gate_circuit()) == sols[0] == x_of(u="⊥", v="⊥", w=0, y=0)
    assert len(sols) == 4


def test_not_cycle_has_pure_solutions():
    sols = list(all_solutions(parse_circuit("NOT u v\nNOT v u")))
    assert x_of(u=0, v=1) in sols and x_of(u=1, v=0) in sols and x_of(u="⊥", v="⊥") in sols


@given(st.lists(st.sampled_from(["NOT", "OR", "PURIFY"]), min_size=1, max_size=4), st.data())
def test_brute_force_is_sound_and_complete(kinds, data):
    gates, used_outputs, names = [], set(), ["a", "b", "c", "d", "e", "f"]
    for kind in kinds:
        n_in, n_out = {"NOT": (1, 1), "OR": (2, 1), "PURIFY": (1, 2)}[kind]
        free = [v for v in names if v not in used_outputs]
        if len(free) < n_out:
            break
        outs = data.draw(st.lists(st.sampled_from(free), min_size=n_out, max_size=n_out, unique=True))
        ins = data.draw(st.lists(st.sampled_from(names), min_size=n_in, max_size=n_in))
        used_outputs.update(outs)
        gates.append(Gate(kind, tuple(ins), tuple(outs)))
    inst = PureCircuitInstance.from_gates(gates)
    found = list(all_solutions(inst))
    every = [dict(zip(inst.variables, vals))
             for vals in itertools.product(tuple(Trit), repeat=len(inst.variables))]
    assert found == [x for x in every if check_satisfies(inst, x)[0]]
    assert found  # the problem is total


# -- parameters ------------------------------------------------------------------

def test_default_params():
    p = optimal_params()
    assert p.delta == D and p.epsilon == F(18, 377) and p.exact
    assert (1 + 8 * p.delta) / (2 * p.delta) * p.epsilon == F(1, 2) - p.delta
    assert p.band == F(1, 2) - D


def test_epsilon_unimodal_spot_check():
    assert epsilon_of(F(1, 10)) < epsilon_of(D)
    assert epsilon_of(F(1, 5)) < epsilon_of(D)


def test_numeric_optimum():
    d_star, e_star = optimal_constants()
    p = params_from_delta(d_star)
    assert not p.exact
    assert abs(p.epsilon - e_star) < Decimal("1e-12")
    with localcontext() as c:
        c.prec = 60
        gap = abs(D - F(d_star)) < F(1, 1000)
    assert gap


def test_params_validation():
    with pytest.raises(CircuitError):
        params_from_delta(F(1, 2))
    with pytest.raises(CircuitError):
        GadgetParams(D, F(1, 20))


# -- decoding --------------------------------------------------------------------

def test_decode_bands():
    assert decode_rate(F(3, 10), D) == Z
    assert decode_rate(F(1, 2), D) == B
    assert decode_rate(F(1, 2) - D, D) == Z
    assert decode_rate(F(1, 2) + D, D) == O
    assert decode_rate(Decimal("0.6538461538461538461538461538"), D) == B


def test_decode_uses_varmap():
    x = decode({"b_u": F(1), "b_v": 0, "other": F(1, 2)}, {"u": "b_u", "v": "b_v"}, D)
    assert x == x_of(u=1, v=0)
    assert format_assignment(x) == "u=1 v=0"
    with pytest.raises(CircuitError):
        decode({}, {"u": "b_u"}, D)
