from fractions import Fraction

import pytest

from fresco.exact_series import TruncSeries
from fresco.worked_examples import (
    DOUBLE_EXCHANGE_PARAMS,
    ERRATUM,
    FOUR_FACTOR_PARAMS,
    double_exchange,
    first_nci_instance,
    four_factor_example,
    no_subtheme_through_first,
    run_all,
    subtheme_check,
    subtheme_instances,
)


def test_four_factor_T():
    r = four_factor_example(1, 1, 1, 1, 2, 3)
    expect = TruncSeries([1, 0, -1, 1, 0, 0, 0, -1], r.T.truncation)
    assert r.T.eq_within(expect)
    assert r.swaps_verified


def test_four_factor_V_is_forced_by_its_equation():
    # b V' = (p2 + p3)(V - T) fixes every coefficient of V from T
    r = four_factor_example(1, 1, 1, 1, 2, 3)
    q = 5
    for n in range(r.T.truncation + 1):
        assert n * r.V[n] == q * (r.V[n] - r.T[n])
    assert r.V[7] == Fraction(5, 2)
    assert r.V_closed[7] == 2  # printed closed form differs at b^7 only
    assert r.V.eq_within(r.V_forced)


def test_four_factor_V_matches_printed_form_below_b7():
    r = four_factor_example(1, 1, 1, 1, 2, 3)
    for n in range(7):
        assert r.V[n] == r.V_closed[n]


@pytest.mark.parametrize("params", FOUR_FACTOR_PARAMS)
def test_four_factor_suite_coefficients(params):
    r = four_factor_example(*params)
    assert r.suite_coefficients == r.suite_expected


def test_suite_coefficients_named_instance():
    r = four_factor_example(1, 2, 3, 1, 2, 3)
    assert r.suite_coefficients == (Fraction(-3, 2), Fraction(5))


@pytest.mark.parametrize(
    "params,value", list(zip(DOUBLE_EXCHANGE_PARAMS, [Fraction(3), Fraction(25, 14), Fraction(-8, 3)]))
)
def test_double_exchange(params, value):
    r = double_exchange(*params)
    assert r.coefficient == value == r.expected
    assert r.verified and r.subtheme_is_theme


def test_subtheme_pair_at_first_index():
    for P in subtheme_instances():
        c = subtheme_check(P)
        assert c.is_theme
        assert c.pair == c.constructed_formula
        if c.h == 1:
            assert c.pair == c.claimed


def test_no_subtheme_through_first_line_when_h_is_2():
    for seed in range(4):
        P = first_nci_instance(2, 3, seed=seed)
        assert no_subtheme_through_first(P)


def test_run_all_statuses():
    claims = run_all()
    erratum = [c for c in claims if c.status == ERRATUM]
    assert len(erratum) == len(FOUR_FACTOR_PARAMS)
    assert all("V closed form" in c.name for c in erratum)
