from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fresco.exact_series import (
    NotAUnit,
    Obstructed,
    SeriesSyntaxError,
    TruncSeries,
    invert_unit,
    ode_solve,
    parse_rational,
    parse_series,
    render_rational,
    render_series,
)

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def series_strategy(N=12, unit=False):
    return st.lists(small, min_size=1, max_size=N + 1).map(
        lambda cs: TruncSeries(([Fraction(1)] + cs[1:]) if unit else cs, N)
    )


@given(series_strategy(unit=True))
def test_inverse_of_unit(S):
    assert (S * invert_unit(S)).eq_within(TruncSeries.one(S.truncation))


def test_inverse_rejects_nonunit():
    with pytest.raises(NotAUnit):
        invert_unit(TruncSeries([0, 1], 8))


@given(series_strategy(), small)
def test_ode_solve_residual(R, delta):
    if delta.denominator == 1 and 0 <= delta <= R.truncation and R[int(delta)] != 0:
        return
    T = ode_solve(delta, R)
    assert T.b_derivative().eq_within(T.scale(delta) + R)


def test_ode_solve_resonance_free_constant():
    R = TruncSeries([1, 0, 0, 5], 8)
    T = ode_solve(2, R, rho=7)
    assert T[2] == 7
    assert T[0] == Fraction(-1, 2)
    assert T[3] == 5


def test_ode_solve_obstruction():
    with pytest.raises(Obstructed) as info:
        ode_solve(2, TruncSeries([0, 0, 3], 8))
    assert info.value.index == 2


def test_derivative_loses_one_order():
    S = TruncSeries([1, 2, 3], 10)
    assert S.derivative().truncation == 9
    assert S.derivative()[1] == 6


def test_multiplication_truncates():
    S = TruncSeries.monomial(1, 3, 4)
    assert (S * S).is_zero()


@given(series_strategy())
@settings(max_examples=60)
def test_render_parse_round_trip(S):
    assert parse_series(render_series(S), S.truncation) == S


@pytest.mark.parametrize("text,value", [("3", 3), ("-7/4", Fraction(-7, 4)), (" 2 / 6 ", Fraction(1, 3))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


def test_render_rational_is_exact():
    assert render_rational(Fraction(-25, 14)) == "-25/14"
    assert render_rational(Fraction(4, 2)) == "2"


@pytest.mark.parametrize("text", ["1 + ", "b^", "1 // 2", "1 + x", "2/0"])
def test_series_syntax_errors(text):
    with pytest.raises(SeriesSyntaxError):
        parse_series(text, 8)


def test_series_grammar_forms():
    S = parse_series("1 - 3/2*b + b^3 - 2b^4", 8)
    assert S.coeffs[:5] == (1, Fraction(-3, 2), 0, 1, -2)
