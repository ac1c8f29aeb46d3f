from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fresco.ab_algebra import (
    AbElement,
    FrescoPresentation,
    NonCommutingIndex,
    bernstein_polynomial,
    bernstein_roots,
    delta,
    from_presentation,
    fundamental_invariants,
    nci_list,
    principal_form,
    swap_adjacent,
    validate,
    verify_swap,
)
from fresco.exact_series import TruncSeries

N = 10
coef = st.integers(-3, 3)
element = st.lists(st.lists(coef, max_size=3), min_size=1, max_size=N + 1).map(
    lambda parts: AbElement(parts + [[]] * (N + 1 - len(parts)))
)


def test_commutation_relation():
    a, b = AbElement.a(N), AbElement.b(N)
    assert a * b - b * a == b * b


def test_b_power_kills_past_truncation():
    b = AbElement.b(4)
    assert b * b * b * b * b == AbElement.zero(4)


@given(element, element, element)
@settings(max_examples=40, deadline=None)
def test_associativity(x, y, z):
    assert (x * y) * z == x * (y * z)


@given(element, element, element)
@settings(max_examples=40, deadline=None)
def test_distributivity(x, y, z):
    assert x * (y + z) == x * y + x * z


def test_series_times_a():
    # a S = S a + b^2 S'
    S = TruncSeries([1, 2, 0, 1], N)
    a = AbElement.a(N)
    lhs = a * AbElement.series(S)
    rhs = AbElement.series(S) * a + AbElement.series(S.b2_derivative())
    assert lhs == rhs


def test_validate_flags():
    assert validate(FrescoPresentation.build(["5/2", "5/2"], ["1 + b"], 16)).ok
    assert not validate(FrescoPresentation.build(["1/2", "1/3"], ["1"], 16)).primitive
    assert not validate(FrescoPresentation.build(["1/2", "1/2"], ["1"], 16)).geometric


def test_swap_of_semisimple_pair():
    P = FrescoPresentation.build(["7/2", "3/2"], ["1"], 16)
    P2, cert = swap_adjacent(P, 1)
    assert P2.lambdas == (Fraction(5, 2), Fraction(5, 2))
    assert cert.delta == -1
    assert verify_swap(P, P2, cert)


def test_swap_resonant_uses_rho():
    P = FrescoPresentation.build(["5/2", "9/2"], ["1 + b"], 16)
    assert delta(P, 1) == 3
    P2, cert = swap_adjacent(P, 1, rho=Fraction(2, 3))
    assert cert.U[3] == Fraction(2, 3)
    assert verify_swap(P, P2, cert)


def test_swap_refuses_non_commuting():
    P = FrescoPresentation.build(["5/2", "5/2"], ["1 + b"], 16)
    with pytest.raises(NonCommutingIndex):
        swap_adjacent(P, 1)
    assert nci_list(P) == [1]


def test_verify_swap_detects_tampering():
    P = FrescoPresentation.build(["7/2", "3/2", "3/2"], ["1", "1 + b"], 16)
    P2, cert = swap_adjacent(P, 1)
    bad = FrescoPresentation(P2.lambdas, (P2.series[0] + TruncSeries.monomial(1, 2, 16), P2.series[1]), 16)
    assert not verify_swap(P, bad, cert)


def test_principal_form_orders_keys():
    P = FrescoPresentation.build(["13/2", "7/2", "5/2"], ["1 - b", "1 + b^2"], 24)
    Q, certs = principal_form(P)
    keys = Q.keys()
    assert keys == sorted(keys)
    assert Counter(fundamental_invariants(P)) == Counter(fundamental_invariants(Q))
    assert certs


def test_fundamental_invariants_of_theme():
    P = FrescoPresentation.build(["5/2", "5/2"], ["1 + b"], 16)
    assert fundamental_invariants(P) == [Fraction(7, 2), Fraction(9, 2)]
    assert sorted(bernstein_roots(P)) == [Fraction(-5, 2), Fraction(-3, 2)]


def test_bernstein_polynomial_is_monic_with_those_roots():
    P = FrescoPresentation.build(["5/2", "5/2"], ["1 + b"], 16)
    B = bernstein_polynomial(P)
    assert B[-1] == 1
    for r in bernstein_roots(P):
        assert sum(c * r**i for i, c in enumerate(B)) == 0


def test_from_presentation_rank1():
    P = FrescoPresentation.build(["3/2"], [], 8)
    assert from_presentation(P) == AbElement.a(8) - AbElement.b(8).scale(Fraction(3, 2))
