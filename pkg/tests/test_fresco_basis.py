from fractions import Fraction

import pytest

from fresco.ab_algebra import FrescoPresentation
from fresco.exact_series import TruncSeries
from fresco.fresco_basis import (
    BasisElement,
    act_a,
    act_b,
    act_linear,
    act_polynomial,
    is_theme,
    kernel,
    rank1_normal_submodules,
    submodule_presentation,
)

N = 24


def pres(lams, sers, n=N):
    return FrescoPresentation.build(lams, sers, n)


def test_b_raises_valuation():
    P = pres(["5/2", "5/2"], ["1 + b"])
    e1 = BasisElement.basis_vector(P, 1)
    assert act_b(e1).coords[0].valuation() == 1
    assert act_b(BasisElement.zero(P)).is_zero()


def test_a_on_basis_vectors():
    P = pres(["5/2", "3/2"], ["1 + b"])
    e1, e2 = BasisElement.basis_vector(P, 1), BasisElement.basis_vector(P, 2)
    assert act_linear(e1, Fraction(5, 2)).is_zero()
    # (a - l2 b) e2 = S_1 e1
    assert act_linear(e2, Fraction(3, 2)).coords[0].eq_within(TruncSeries([1, 1], N))


def test_ab_minus_ba_is_b_squared():
    P = pres(["7/2", "5/2", "1/2"], ["1 + b", "1 - 2*b^2"])
    x = BasisElement((TruncSeries([1, 2], N), TruncSeries([0, 1, 3], N), TruncSeries([2], N)), P)
    lhs = act_a(act_b(x)) - act_b(act_a(x))
    assert lhs.eq_within(act_b(act_b(x)))


def test_presentation_kills_top_generator():
    P = pres(["7/2", "5/2", "1/2"], ["1 + b", "1 - 2*b^2"])
    e3 = BasisElement.basis_vector(P, 3)
    assert act_polynomial(e3, P.lambdas, P.series).is_zero()


def test_kernel_rank1():
    P = pres(["3/2"], [])
    K = kernel(P, Fraction(3, 2))
    assert len(K) == 1 and K[0].coords[0].eq_within(TruncSeries.one(N))


def test_kernel_semisimple_rank2_only_e1():
    P = pres(["3/2", "5/2"], ["1"])  # p1 = 2
    K = kernel(P, Fraction(3, 2))
    assert len(K) == 1
    assert K[0].coords[1].is_zero()


def test_kernel_two_dimensional_when_coefficient_vanishes():
    # S_1 has no b^(p1) term, p1 = l2 + 1 - l1 = 2
    P = pres(["5/2", "7/2"], ["1 + b^3"])
    K = kernel(P, Fraction(9, 2))
    assert len(K) == 2
    assert any(v.coords[1].is_zero() and v.coords[0].valuation() == 2 for v in K)
    assert any(v.coords[1].valuation() == 1 and v.coords[0][0] == 1 for v in K)
    for v in K:
        assert act_linear(v, Fraction(9, 2)).is_zero()


def test_kernel_one_dimensional_when_coefficient_present():
    P = pres(["5/2", "7/2"], ["1 + b^2"])
    assert len(kernel(P, Fraction(9, 2))) == 1


def test_theme_has_unique_normal_line():
    P = pres(["5/2", "5/2"], ["1 + b"])
    lines = [f for f in rank1_normal_submodules(P) if f.primitive_rank]
    assert len(lines) == 1 and lines[0].mu == Fraction(5, 2)
    assert is_theme(P)


def test_semisimple_rank2_has_two_lines():
    P = pres(["3/2", "5/2"], ["1"])
    mus = sorted(f.mu for f in rank1_normal_submodules(P) if f.primitive_rank)
    assert mus == [Fraction(3, 2), Fraction(7, 2)]
    assert not is_theme(P)


def test_submodule_presentation_of_prefix():
    P = pres(["7/2", "7/2", "9/2"], ["1 + b", "1 + b^2"])
    gens = [BasisElement.basis_vector(P, 1), BasisElement.basis_vector(P, 2)]
    sp = submodule_presentation(gens)
    assert sp.verified
    assert sp.pres.rank == 2


def test_basis_element_rank_check():
    P = pres(["5/2", "5/2"], ["1 + b"])
    with pytest.raises(ValueError):
        BasisElement((TruncSeries.one(N),), P)
