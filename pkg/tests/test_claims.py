from fractions import Fraction as F

from hypothesis import given, settings, strategies as st

from finclear.claims import check_claims, decode_bands, format_table, grid

D = F(2, 13)


def test_grid_endpoints():
    assert grid(F(0), F(1), 3) == [0, F(1, 2), 1]
    assert grid(F(0), F(1), 3, closed=False) == [F(1, 4), F(1, 2), F(3, 4)]
    zero, one, bot = decode_bands(D, 5)
    assert zero[-1] == F(1, 2) - D and one[0] == F(1, 2) + D
    assert all(F(1, 2) - D < x < F(1, 2) + D for x in bot)


def test_all_statements_hold_at_default_params():
    rows = check_claims(D, points=50)
    assert len(rows) == 14
    assert all(r.passed for r in rows), format_table(rows)


def test_statement_bands_are_tight_at_default_params():
    rows = {(r.gate, r.statement): r for r in check_claims(D, points=5)}
    assert rows[("NOT", "1")].outputs == "w in [1211/1508, 1]"
    assert rows[("OR", "2")].outputs == "w in [0, 9/26]"


def test_larger_eps_leaves_the_decode_bands():
    # the statements scale with eps, but off the encoding curve an encoded 0
    # can come out of the OR gadget above 1/2 - delta
    from finclear.intervals import gate_output_range

    assert all(r.passed for r in check_claims(D, F(1, 10), points=10))
    (w,) = gate_output_range("OR", [0, 0], D, F(1, 10))
    assert w.hi > F(1, 2) - D


@settings(max_examples=15)
@given(d=st.fractions(min_value=F(1, 40), max_value=F(19, 40), max_denominator=40))
def test_claims_hold_on_the_encoding_curve(d):
    rows = check_claims(d, points=12)
    assert all(r.passed for r in rows), format_table(rows)
