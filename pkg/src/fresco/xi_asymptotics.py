"""Formal multivalued expansions and the homomorphisms ``E -> Xi``.

An element of ``Xi`` is ``sum_j Phi_j(b) xi_j`` with
``xi_j = s^(mu0-1) (Log s)^j / j!``.  The operators act by ``a = x s`` and
``b = integration from 0``, so

    a.(Phi xi_j) = (mu0 b Phi + b^2 Phi') xi_j + b Phi xi_{j-1}.

Homomorphisms from the fresco ``E = A/A.P`` to ``Xi`` are solutions of
``P.x = 0``; this module computes a basis of them exactly and derives the
semi-simple depth, the filtrations ``S_j`` and ``Sigma^j``, the rank-1
quotients, the quotient themes and the embeddings into ``Xi^l``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .ab_algebra import (
    FrescoPresentation,
    NonCommutingIndex,
    SwapCertificate,
    delta,
    fundamental_invariants,
    nci_list,
    principal_form,
    swap_adjacent,
    swap_precondition,
    validate,
)
from .exact_series import (
    Obstructed,
    Scalar,
    TruncSeries,
    _frac,
    invert_unit,
    natural_value,
    ode_solve,
    render_rational,
    render_series,
)
from .fresco_basis import BasisElement, act_a, act_linear, is_theme
from .linalg import (
    PrecisionInsufficient,
    nullspace,
    rank as scalar_rank,
    reduce_series_matrix,
    rref,
    saturate,
)


class LogCapExceeded(ArithmeticError):
    """A solution would need a logarithm power beyond the cap."""


class NotGeometric(ValueError):
    pass


class RankMismatch(ArithmeticError):
    pass


class CountMismatch(ArithmeticError):
    pass


class NotNormalizable(ArithmeticError):
    pass


class NotSemisimpleOrder(ValueError):
    pass


class HypothesisViolated(ValueError):
    pass


@dataclass(frozen=True)
class XiElement:
    """``sum_j parts[j] * xi_j`` with ``xi_j = s^(mu0-1) (Log s)^j / j!``."""

    mu0: Fraction
    parts: Tuple[TruncSeries, ...]

    def __post_init__(self):
        n = min(p.truncation for p in self.parts)
        object.__setattr__(self, "parts", tuple(p.truncate(n) for p in self.parts))
        object.__setattr__(self, "mu0", _frac(self.mu0))

    @classmethod
    def zero(cls, mu0: Scalar, log_cap: int, N: int) -> "XiElement":
        return cls(_frac(mu0), tuple(TruncSeries.zero(N) for _ in range(log_cap + 1)))

    @classmethod
    def monomial(cls, mu0, coeff, n: int, j: int, log_cap: int, N: int) -> "XiElement":
        """``coeff * b^n * xi_j``."""
        parts = [TruncSeries.zero(N) for _ in range(log_cap + 1)]
        parts[j] = TruncSeries.monomial(coeff, n, N)
        return cls(_frac(mu0), tuple(parts))

    @property
    def log_cap(self) -> int:
        return len(self.parts) - 1

    @property
    def truncation(self) -> int:
        return self.parts[0].truncation

    @property
    def log_degree(self) -> Optional[int]:
        for j in range(self.log_cap, -1, -1):
            if not self.parts[j].is_zero():
                return j
        return None

    def __add__(self, other: "XiElement") -> "XiElement":
        return XiElement(self.mu0, tuple(x + y for x, y in zip(self.parts, other.parts)))

    def __sub__(self, other: "XiElement") -> "XiElement":
        return XiElement(self.mu0, tuple(x - y for x, y in zip(self.parts, other.parts)))

    def scale(self, c) -> "XiElement":
        if isinstance(c, TruncSeries):
            return XiElement(self.mu0, tuple(c * x for x in self.parts))
        return XiElement(self.mu0, tuple(x.scale(c) for x in self.parts))

    def truncate(self, N: int) -> "XiElement":
        return XiElement(self.mu0, tuple(x.truncate(N) for x in self.parts))

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.parts)

    def eq_within(self, other: "XiElement") -> bool:
        return all(x.eq_within(y) for x, y in zip(self.parts, other.parts))

    def coefficient_vector(self, N: Optional[int] = None) -> List[Fraction]:
        """Coefficients ordered by log level (descending) then ``b``-power."""
        N = self.truncation if N is None else N
        return [self.parts[j][n] for j in range(self.log_cap, -1, -1) for n in range(N + 1)]

    @classmethod
    def from_coefficient_vector(cls, mu0, vec, log_cap: int, N: int) -> "XiElement":
        parts = [None] * (log_cap + 1)
        for t, j in enumerate(range(log_cap, -1, -1)):
            parts[j] = TruncSeries(vec[t * (N + 1) : (t + 1) * (N + 1)], N)
        return cls(_frac(mu0), tuple(parts))

    def render(self) -> str:
        terms = []
        e = render_rational(self.mu0 - 1)
        for j, p in enumerate(self.parts):
            if p.is_zero():
                continue
            t = f"({render_series(p)}) * s^{e}"
            if j:
                t += " * Log(s)" if j == 1 else f" * Log(s)^{j} / {j}!"
            terms.append(t)
        return " + ".join(terms) if terms else "0"


def xi_act_a(x: XiElement) -> XiElement:
    """``a.sum Phi_j xi_j = sum [mu0 b Phi_j + b^2 Phi_j' + b Phi_{j+1}] xi_j``."""
    J = x.log_cap
    out = []
    for j, p in enumerate(x.parts):
        y = p.shift(1).scale(x.mu0) + p.b2_derivative()
        if j < J:
            y = y + x.parts[j + 1].shift(1)
        out.append(y.truncate(x.truncation))
    return XiElement(x.mu0, tuple(out))


def xi_act_b(x: XiElement) -> XiElement:
    return XiElement(x.mu0, tuple(p.shift(1).truncate(p.truncation) for p in x.parts))


def xi_linear(x: XiElement, mu: Scalar) -> XiElement:
    """``(a - mu b) x``."""
    mu = _frac(mu)
    J = x.log_cap
    out = []
    for j, p in enumerate(x.parts):
        y = p.shift(1).scale(x.mu0 - mu) + p.b2_derivative()
        if j < J:
            y = y + x.parts[j + 1].shift(1)
        out.append(y.truncate(x.truncation))
    return XiElement(x.mu0, tuple(out))


def xi_apply(P: FrescoPresentation, x: XiElement) -> XiElement:
    """``P.x`` applied factor by factor from the right."""
    y = xi_linear(x, P.lambdas[-1])
    for j in range(P.rank - 1, 0, -1):
        y = y.scale(invert_unit(P.S(j).truncate(min(P.truncation, y.truncation))))
        y = xi_linear(y, P.lam(j))
    return y


def rising(x: Fraction, n: int) -> Fraction:
    out = Fraction(1)
    for i in range(n):
        out *= x + i
    return out


def s_power(e: Scalar, mu0: Scalar, log_cap: int, N: int) -> XiElement:
    """``s^e`` as an element of ``Xi`` (``e - mu0 + 1`` must be a natural number).

    From ``s^c = c b(s^(c-1))`` one gets ``s^(mu0-1+m) = rising(mu0, m) b^m xi_0``.
    """
    mu0 = _frac(mu0)
    m = natural_value(_frac(e) - mu0 + 1)
    if m is None:
        raise ValueError(f"s^{e} does not lie in the lattice of s^{mu0 - 1}")
    return XiElement.monomial(mu0, rising(mu0, m), m, 0, log_cap, N)


# homomorphisms


@dataclass(frozen=True)
class HomBasis:
    """A basis of ``Hom(E, Xi)``.

    ``images[i][m]`` is the image of ``e_{m+1}`` under the ``i``-th
    homomorphism; its image of the generator ``e_k`` is ``solutions[i]``.
    """

    pres: FrescoPresentation
    mu0: Fraction
    log_cap: int
    images: Tuple[Tuple[XiElement, ...], ...]

    @property
    def solutions(self) -> List[XiElement]:
        return [img[-1] for img in self.images]

    @property
    def dimension(self) -> int:
        return len(self.images)

    @property
    def truncation(self) -> int:
        return self.images[0][0].truncation

    def combine(self, c: Sequence[Fraction]) -> Tuple[XiElement, ...]:
        """Images of the basis under ``sum_i c_i phi_i``."""
        k = self.pres.rank
        out = []
        for m in range(k):
            acc = None
            for ci, img in zip(c, self.images):
                if ci:
                    t = img[m].scale(ci)
                    acc = t if acc is None else acc + t
            out.append(acc if acc is not None else XiElement.zero(self.mu0, self.log_cap, self.truncation))
        return tuple(out)


def apply_hom(images: Sequence[XiElement], y: BasisElement) -> XiElement:
    """``phi(y)`` for ``y = sum Y_m e_m`` given the images of the basis."""
    acc = None
    for Y, z in zip(y.coords, images):
        if Y.is_zero():
            continue
        t = z.scale(Y.truncate(min(Y.truncation, z.truncation)))
        acc = t if acc is None else acc + t
    if acc is None:
        z = images[0]
        return XiElement.zero(z.mu0, z.log_cap, min(z.truncation, y.truncation))
    return acc


def default_mu0(P: FrescoPresentation) -> Fraction:
    return validate(P).class_rep


def _extend(z: XiElement, lam: Fraction, S: TruncSeries) -> XiElement:
    """Solve ``(a - lam b) w = S z`` for ``w`` (one particular solution)."""
    mu0 = z.mu0
    J = z.log_cap
    W = [S.truncate(min(S.truncation, p.truncation)) * p for p in z.parts]
    for p in W:
        if p[0]:
            raise NotGeometric("right-hand side is not divisible by b")
    Wb = [p.unshift(1) for p in W]
    N = Wb[0].truncation
    d = lam - mu0
    n0 = natural_value(d)
    if n0 is not None and n0 > N:
        n0 = None
    Phi: List[Optional[TruncSeries]] = [None] * (J + 1)
    above = TruncSeries.zero(N)
    for i in range(J, -1, -1):
        R = Wb[i] - above
        if n0 is not None and R[n0]:
            if i == J:
                raise LogCapExceeded(f"a log power beyond {J} is needed")
            Phi[i + 1] = Phi[i + 1] + TruncSeries.monomial(R[n0], n0, N)
            R = Wb[i] - Phi[i + 1]
        Phi[i] = ode_solve(d, R)
        above = Phi[i]
    return XiElement(mu0, tuple(Phi))


def solve_annihilator(
    P: FrescoPresentation, mu0: Optional[Scalar] = None, log_cap: Optional[int] = None
) -> HomBasis:
    """A basis of the solutions of ``P.x = 0`` in ``Xi`` (with ``k`` elements).

    The ``i``-th homomorphism sends ``e_1..e_{i-1}`` to 0 and ``e_i`` to
    ``b^(l_i - mu0) xi_0``; its values on ``e_{i+1}, ...`` come from
    ``(a - l_{j+1} b) z_{j+1} = S_j z_j``.  At the resonant ``b``-power the
    obstruction of one log level is absorbed by the free constant of the
    level above it.
    """
    rep = validate(P)
    if not rep.primitive:
        raise ValueError("presentation is not primitive")
    if not rep.geometric:
        raise NotGeometric("presentation is not geometric")
    mu0 = rep.class_rep if mu0 is None else _frac(mu0)
    k = P.rank
    J = k - 1 if log_cap is None else log_cap
    N = P.truncation
    images: List[List[XiElement]] = []
    for i in range(1, k + 1):
        m = natural_value(P.lam(i) - mu0)
        if m is None:
            raise ValueError("base exponent is not below every lambda in its class")
        z = XiElement.monomial(mu0, 1, m, 0, J, N)
        img = [XiElement.zero(mu0, J, N) for _ in range(i - 1)] + [z]
        for j in range(i, k):
            z = _extend(z, P.lam(j + 1), P.S(j))
            img.append(z)
        images.append(img)
    n = min(z.truncation for img in images for z in img)
    if n < 1:
        raise PrecisionInsufficient("truncation too small for the rank")
    images_t = tuple(tuple(z.truncate(n) for z in img) for img in images)
    return HomBasis(P, mu0, J, images_t)


def hom_images(P: FrescoPresentation, x: XiElement) -> List[XiElement]:
    """Images of ``e_1..e_k`` under the homomorphism sending ``e_k`` to ``x``.

    Uses ``e_{j-1} = S_{j-1}^{-1} (a - l_j b) e_j``.
    """
    k = P.rank
    out = [x]
    z = x
    for j in range(k, 1, -1):
        z = xi_linear(z, P.lam(j)).scale(invert_unit(P.S(j - 1)))
        out.append(z)
    return list(reversed(out))


def solutions_independent(hb: HomBasis) -> bool:
    N = hb.truncation
    rows = [x.coefficient_vector(N) for x in hb.solutions]
    return scalar_rank(rows) == len(rows)


def depth(P: FrescoPresentation, hb: Optional[HomBasis] = None) -> int:
    """1 + the largest log degree of a homomorphism ``E -> Xi``."""
    hb = solve_annihilator(P) if hb is None else hb
    return 1 + max(x.log_degree for x in hb.solutions)


# filtrations


def _log_rows(images_list, levels, cols) -> List[List[TruncSeries]]:
    rows = []
    for imgs in images_list:
        for l in levels:
            rows.append([imgs[m].parts[l] for m in cols])
    return rows


def _elements_from_columns(P, vectors) -> List[BasisElement]:
    return [BasisElement(tuple(v), P) for v in vectors]


@dataclass(frozen=True)
class Submodule:
    """A saturated submodule of ``E`` given by a ``Q[[b]]``-basis."""

    rank: int
    basis: Tuple[BasisElement, ...]


def _memo(hb: HomBasis, key: str, compute):
    """Per-basis cache; ``HomBasis`` is frozen, so the cache lives in its ``__dict__``."""
    cache = hb.__dict__.setdefault("_memo", {})
    if key not in cache:
        cache[key] = compute()
    return cache[key]


def ss_filtration(P: FrescoPresentation, hb: Optional[HomBasis] = None) -> List[Submodule]:
    """``S_j(E)`` for ``j = 1..d``: elements whose images have log degree ``< j``."""
    hb = solve_annihilator(P) if hb is None else hb
    return list(_memo(hb, "ss", lambda: _ss_filtration(P, hb)))


def _ss_filtration(P: FrescoPresentation, hb: HomBasis) -> List[Submodule]:
    d = depth(P, hb)
    k = P.rank
    N = hb.truncation
    out = []
    for j in range(1, d + 1):
        rows = _log_rows(hb.images, range(j, hb.log_cap + 1), range(k))
        if rows:
            red = reduce_series_matrix(rows, k, N)
            ker = red.kernel()
        else:
            ker = [[TruncSeries.one(N) if i == m else TruncSeries.zero(N) for i in range(k)] for m in range(k)]
        out.append(Submodule(len(ker), tuple(_elements_from_columns(P, ker))))
    return out


def trace_rank(P: FrescoPresentation, j: int, m: int, hb: Optional[HomBasis] = None) -> int:
    """Rank of ``S_j(E)`` intersected with the span of ``e_1..e_m``."""
    hb = solve_annihilator(P) if hb is None else hb
    rows = _log_rows(hb.images, range(j, hb.log_cap + 1), range(m))
    if not rows:
        return m
    return m - reduce_series_matrix(rows, m, hb.truncation).rank


def _restricted_images(hb: HomBasis, gens: Sequence[BasisElement]) -> List[List[XiElement]]:
    """``out[i][l] = phi_i(gens[l])``."""
    return [[apply_hom(img, g) for g in gens] for img in hb.images]


def _log_zero_homs(restricted: List[List[XiElement]]) -> List[List[Fraction]]:
    """Coefficient vectors ``c`` with ``sum c_i phi_i`` of log degree 0 on the generators."""
    n_homs = len(restricted)
    if not restricted or not restricted[0]:
        return nullspace([], n_homs)
    N = min(x.truncation for row in restricted for x in row)
    J = restricted[0][0].log_cap
    eqs = []
    for l in range(len(restricted[0])):
        for lev in range(1, J + 1):
            for n in range(N + 1):
                eqs.append([restricted[i][l].parts[lev][n] for i in range(n_homs)])
    eqs = [e for e in eqs if any(e)]
    return nullspace(eqs, n_homs)


def _sigma_step(P: FrescoPresentation, hb: HomBasis, gens: Sequence[BasisElement]):
    """``Sigma^1`` of the submodule spanned by ``gens``.

    Returns ``(generators, depth_of_submodule, log0_hom_dim)``.
    """
    r = len(gens)
    if r == 0:
        return [], 0, 0
    restricted = _restricted_images(hb, gens)
    sub_depth = 1 + max(
        (x.log_degree for row in restricted for x in row if x.log_degree is not None),
        default=-1,
    )
    H0 = _log_zero_homs(restricted)
    N = min(x.truncation for row in restricted for x in row)
    rows = []
    for c in H0:
        row = []
        for l in range(r):
            acc = TruncSeries.zero(N)
            for ci, rr in zip(c, restricted):
                if ci:
                    acc = acc + rr[l].parts[0].scale(ci)
            row.append(acc)
        rows.append(row)
    N_g = min(g.truncation for g in gens)
    Nred = min(N, N_g)
    if rows:
        ker = reduce_series_matrix(rows, r, Nred).kernel()
    else:
        ker = [[TruncSeries.one(Nred) if i == m else TruncSeries.zero(Nred) for i in range(r)] for m in range(r)]
    out = []
    for t in ker:
        acc = None
        for tl, g in zip(t, gens):
            if tl.is_zero():
                continue
            term = g.scale(tl)
            acc = term if acc is None else acc + term
        if acc is None:
            acc = BasisElement.zero(P, Nred)
        out.append(acc)
    return out, sub_depth, len(H0)


def sigma1(P: FrescoPresentation, hb: Optional[HomBasis] = None) -> Submodule:
    """Joint kernel of the log-degree-0 homomorphisms, checked to have rank ``d - 1``."""
    hb = solve_annihilator(P) if hb is None else hb
    gens = [BasisElement.basis_vector(P, j, hb.truncation) for j in range(1, P.rank + 1)]
    out, d, h0 = _sigma_step(P, hb, gens)
    if len(out) != d - 1:
        raise RankMismatch(f"rank of Sigma^1 is {len(out)}, expected d - 1 = {d - 1}")
    if h0 != P.rank - d + 1:
        raise RankMismatch(f"{h0} homomorphisms of log degree 0, expected {P.rank - d + 1}")
    return Submodule(len(out), tuple(out))


@dataclass(frozen=True)
class CoSSStep:
    rank: int
    depth: int
    basis: Tuple[BasisElement, ...]


def co_ss_filtration(P: FrescoPresentation, hb: Optional[HomBasis] = None) -> List[CoSSStep]:
    """``Sigma^0 = E, Sigma^{j+1} = Sigma^1(Sigma^j)`` down to 0."""
    hb = solve_annihilator(P) if hb is None else hb
    return list(_memo(hb, "co_ss", lambda: _co_ss_filtration(P, hb)))


def _co_ss_filtration(P: FrescoPresentation, hb: HomBasis) -> List[CoSSStep]:
    gens = [BasisElement.basis_vector(P, j, hb.truncation) for j in range(1, P.rank + 1)]
    steps = []
    while True:
        nxt, d, _ = _sigma_step(P, hb, gens)
        steps.append(CoSSStep(len(gens), d, tuple(gens)))
        if not gens:
            break
        if len(nxt) >= len(gens):
            # a nonzero fresco always has a rank-1 quotient, so this is lost precision
            raise PrecisionInsufficient("co-semi-simple filtration does not decrease at this truncation")
        gens = nxt
    return steps


def submodule_contained(sub: Sequence[BasisElement], big: Sequence[BasisElement]) -> bool:
    """Containment of saturated ``Q[[b]]``-spans."""
    from .linalg import in_span, unit_pivot_basis

    if not sub:
        return True
    if not big:
        return all(v.is_zero() for v in sub)
    k = sub[0].pres.rank
    N = min(v.truncation for v in list(sub) + list(big))
    basis, piv = unit_pivot_basis([[c.truncate(N) for c in v.coords] for v in big], k)
    return all(in_span([c.truncate(N) for c in v.coords], basis, piv) for v in sub)


# themes inside Xi


@dataclass(frozen=True)
class ThemeData:
    """The unique Jordan-Hoelder data ``(mu_1, S_1, ..., mu_r)`` of ``A.x``."""

    lambdas: Tuple[Fraction, ...]
    series: Tuple[TruncSeries, ...]
    generator: XiElement

    @property
    def rank(self) -> int:
        return len(self.lambdas)

    def presentation(self) -> FrescoPresentation:
        N = min([s.truncation for s in self.series], default=self.generator.truncation)
        return FrescoPresentation(self.lambdas, tuple(s.truncate(N) for s in self.series), N)

    def fundamental_invariants(self) -> List[Fraction]:
        return sorted(l + j for j, l in enumerate(self.lambdas, start=1))


def _monic_unit(p: TruncSeries) -> Tuple[int, Fraction, TruncSeries]:
    m = p.valuation()
    if m is None:
        raise PrecisionInsufficient("top coefficient vanishes within the window")
    c = p[m]
    if p.truncation - m < 1:
        raise PrecisionInsufficient("no precision left after normalisation")
    return m, c, p.unshift(m).scale(1 / c)


def theme_data(x: XiElement) -> ThemeData:
    """Read off the theme ``A.x`` by peeling one log level at a time.

    The top coefficient is ``c b^m u`` with ``u(0) = 1``; dividing by ``u``
    makes it a monomial, the top quotient is ``E_(mu0+m)``, and
    ``(a - (mu0+m) b)`` lowers the log degree by one.
    """
    if x.is_zero():
        raise NotNormalizable("zero element")
    mus, units = [], []
    cur = x
    gen = None
    level = x.log_degree
    while True:
        lev = cur.log_degree
        if lev != level:
            # exactly, the next level starts with c b^(m+1); losing it means the window ran out
            raise PrecisionInsufficient("log degree dropped by more than one within the window")
        m, c, u = _monic_unit(cur.parts[lev])
        cur = cur.scale(invert_unit(u))
        if gen is None:
            gen = cur
        mu = cur.mu0 + m
        mus.append(mu)
        units.append(u)
        if lev == 0:
            break
        cur = xi_linear(cur, mu)
        level -= 1
    lambdas = tuple(reversed(mus))
    series = tuple(reversed(units[1:]))
    return ThemeData(lambdas, series, gen)


@dataclass(frozen=True)
class Stratum:
    rank: int
    witnesses: Tuple[XiElement, ...]
    themes: Tuple[ThemeData, ...]


def echelon_solutions(hb: HomBasis) -> List[Tuple[int, int, XiElement]]:
    """Echelon basis of the solutions, sorted by (log degree desc, valuation asc).

    Returns ``(log_degree, valuation, element)`` triples.
    """
    N = hb.truncation
    J = hb.log_cap
    rows = [x.coefficient_vector(N) for x in hb.solutions]
    m, piv = rref(rows)
    out = []
    for row, p in zip(m, piv):
        lev = J - p // (N + 1)
        n = p % (N + 1)
        out.append((lev, n, XiElement.from_coefficient_vector(hb.mu0, row, J, N)))
    return out


def quotient_theme_survey(P: FrescoPresentation, hb: Optional[HomBasis] = None) -> List[Stratum]:
    """For each rank ``r``, witnesses of quotient themes of rank ``r`` and their data."""
    hb = solve_annihilator(P) if hb is None else hb
    ech = echelon_solutions(hb)
    d = 1 + max(e[0] for e in ech)
    out = []
    for r in range(1, d + 1):
        ws = tuple(x for lev, _, x in ech if lev == r - 1)
        out.append(Stratum(r, ws, tuple(theme_data(x) for x in ws)))
    return out


def rank1_quotient_classes(P: FrescoPresentation, hb: Optional[HomBasis] = None) -> List[Fraction]:
    """Classes ``mu`` of the rank-1 quotients ``E_mu`` of ``E``, without the count check.

    They are ``mu0 + v`` for the valuations ``v`` reached by images of the
    generator under homomorphisms of log degree 0.
    """
    hb = solve_annihilator(P) if hb is None else hb
    H0 = _log_zero_homs([[x] for x in hb.solutions])
    N = hb.truncation
    vecs = []
    for c in H0:
        acc = TruncSeries.zero(N)
        for ci, x in zip(c, hb.solutions):
            if ci:
                acc = acc + x.parts[0].scale(ci)
        vecs.append(list(acc.coeffs))
    _, piv = rref(vecs)
    return sorted(hb.mu0 + p for p in piv)


def rank1_quotients(P: FrescoPresentation, hb: Optional[HomBasis] = None) -> List[Fraction]:
    """Rank-1 quotient classes, checked to number ``k - d + 1``."""
    hb = solve_annihilator(P) if hb is None else hb
    d = depth(P, hb)
    classes = rank1_quotient_classes(P, hb)
    if len(classes) != P.rank - d + 1:
        raise CountMismatch(f"{len(classes)} rank-1 quotient classes, expected {P.rank - d + 1}")
    return classes


def is_semisimple(P: FrescoPresentation, hb: Optional[HomBasis] = None) -> bool:
    return depth(P, hb) == 1


# exploring Jordan-Hoelder sequences reachable by swaps


def _rho_candidates(P: FrescoPresentation, j: int) -> List[Fraction]:
    """``rho`` values worth trying for a swap at ``j`` with ``delta >= 1``.

    Besides 0, each neighbour series gets the value of ``rho`` that kills
    its coefficient at the index where the next swap would need a zero.
    """
    d = delta(P, j).numerator
    out = [Fraction(0)]
    if d < 1:
        return out
    U0 = ode_solve(d, P.S(j).scale(-d), 0)
    N = P.truncation
    k = P.rank
    # after the swap, position j+1 holds l_j - 1 next to l_{j+2}
    if j + 2 <= k:
        dn = P.lam(j + 2) + 1 - (P.lam(j) - 1)
        q = natural_value(dn)
        if q is not None and 1 <= q <= N:
            S = P.S(j + 1)
            beta0 = (S * U0)[q]
            alpha = S[q - d] if q - d >= 0 else Fraction(0)
            if alpha:
                out.append(-beta0 / alpha)
    # position j holds l_{j+1} + 1 next to l_{j-1}
    if j - 1 >= 1:
        dn = P.lam(j + 1) + 1 + 1 - P.lam(j - 1)
        q = natural_value(dn)
        if q is not None and 1 <= q <= N:
            S = P.S(j - 1)
            beta0 = (S * U0)[q]
            alpha = S[q - d] if q - d >= 0 else Fraction(0)
            if alpha:
                out.append(-beta0 / alpha)
    return sorted(set(out))


def _state_key(P: FrescoPresentation):
    return (P.lambdas, tuple(s.coeffs for s in P.series))


@dataclass
class Exploration:
    presentations: List[FrescoPresentation]
    complete: bool


def explore_jh_sequences(P: FrescoPresentation, max_nodes: int = 60) -> Exploration:
    """Breadth-first search over presentations reachable by adjacent swaps."""
    seen = {_state_key(P): P}
    queue = [P]
    complete = True
    while queue:
        cur = queue.pop(0)
        for j in range(1, cur.rank):
            try:
                reason = swap_precondition(cur, j)
            except PrecisionInsufficient:
                continue
            if reason is not None:
                continue
            for rho in _rho_candidates(cur, j):
                nxt, _ = swap_adjacent(cur, j, rho)
                key = _state_key(nxt)
                if key in seen:
                    continue
                if len(seen) >= max_nodes:
                    complete = False
                    continue
                seen[key] = nxt
                queue.append(nxt)
    return Exploration(list(seen.values()), complete)


def semisimple_certificate(P: FrescoPresentation, max_nodes: int = 200):
    """A presentation with ``l_j + j`` strictly decreasing, reached by swaps, or ``None``."""
    exp = explore_jh_sequences(P, max_nodes)
    for Q in exp.presentations:
        keys = Q.keys()
        if all(keys[i] > keys[i + 1] for i in range(len(keys) - 1)):
            return Q
    return None


# sub-themes and the L-chain


def bring_pair_to_front(P: FrescoPresentation, h: int):
    """Move the factors ``h, h+1`` to the front by passing each earlier factor across them.

    Each passage is two swaps; the ``rho`` of the first one is chosen so
    the second one is unobstructed.  Returns ``(presentation, certificates)``.
    """
    cur = P
    certs = []
    for t in range(h - 1, 0, -1):
        d = delta(cur, t).numerator
        rho = Fraction(0)
        if d >= 1 and t + 2 <= cur.rank:
            U0 = ode_solve(d, cur.S(t).scale(-d), 0)
            q = d + delta(cur, t + 1).numerator
            S = cur.S(t + 1)
            beta0 = (S * U0)[q]
            alpha = S[q - d]
            if not alpha:
                raise NonCommutingIndex(t + 1, "pair parameter vanishes")
            rho = -beta0 / alpha
        cur, c1 = swap_adjacent(cur, t, rho)
        cur, c2 = swap_adjacent(cur, t + 1)
        certs += [c1, c2]
    return cur, certs


def construct_first_subtheme(P: FrescoPresentation):
    """The rank-2 normal sub-theme at the first non-commuting index.

    Returns ``(h, sub_presentation)`` where ``sub_presentation`` is the
    rank-2 prefix after bringing the pair ``h, h+1`` to the front.
    """
    ncis = nci_list(P)
    if not ncis:
        return None
    h = ncis[0]
    Q, _ = bring_pair_to_front(P, h)
    return h, Q.prefix(2)


@dataclass(frozen=True)
class LSeries:
    sigma1_presentation: Optional[FrescoPresentation]
    lambdas: Tuple[Fraction, ...]
    sigma1_is_theme: bool


def L_series(P: FrescoPresentation, hb: Optional[HomBasis] = None) -> LSeries:
    """Invariants of the theme ``Sigma^1(E)``; its J-H terms are ``L_1 .. L_{d-1}``."""
    from .fresco_basis import submodule_presentation

    hb = solve_annihilator(P) if hb is None else hb
    s1 = sigma1(P, hb)
    if s1.rank == 0:
        return LSeries(None, (), False)
    sp = submodule_presentation(list(s1.basis), hb)
    Q = principal_form(sp.pres)[0]
    return LSeries(Q, Q.lambdas, is_theme(Q))


# embeddings


def solve_embedding_series(lambdas: Sequence[Fraction], series: Sequence[TruncSeries], N: int) -> TruncSeries:
    """The unique ``T`` with ``Q.T.s^(l1-k) = S_1.s^(l1-1)``.

    ``Q = (a - l2 b) S2^{-1} ... (a - lk b)``.  Writing
    ``(a - l b)(U s^(c-1)) = R s^c`` as ``b U' + (c - l) U = c R`` the
    equation is solved one factor at a time.
    """
    k = len(lambdas)
    if k < 2:
        raise ValueError("needs rank at least 2")
    l1 = _frac(lambdas[0])
    R = series[0].truncate(N)
    c = l1 - 1
    for j in range(1, k):
        lam = _frac(lambdas[j])
        U = ode_solve(lam - c, R.scale(c))
        if j == k - 1:
            return U
        R = series[j].truncate(N) * U
        c -= 1
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class Embedding:
    images: Tuple[XiElement, ...]
    T_values: Tuple[TruncSeries, ...]
    checks: Tuple[bool, ...]
    injective: bool


def embed_semisimple(P: FrescoPresentation, mu0: Optional[Scalar] = None) -> Embedding:
    """``k`` homomorphisms ``E -> Xi`` of log degree 0 with zero joint kernel.

    Follows the induction: the quotient by ``E_(l1)`` embeds by the
    previous step and one more component is ``e -> T s^(l1 - k)``.
    """
    keys = P.keys()
    if any(keys[i] <= keys[i + 1] for i in range(len(keys) - 1)):
        raise NotSemisimpleOrder("lambda_j + j must be strictly decreasing")
    k = P.rank
    if P.lambdas[0] <= k - 1:
        raise HypothesisViolated("lambda_1 must exceed k - 1")
    mu0 = default_mu0(P) if mu0 is None else _frac(mu0)
    N = P.truncation
    J = 0
    images: List[XiElement] = []
    Ts: List[TruncSeries] = []
    checks: List[bool] = []

    def build(start: int) -> List[XiElement]:
        lams = P.lambdas[start:]
        sers = P.series[start:]
        r = len(lams)
        if r == 1:
            x = s_power(lams[0] - 1, mu0, J, N)
            return [x.scale(1 / rising(mu0, natural_value(lams[0] - mu0)))]
        tail = build(start + 1)
        T = solve_embedding_series(lams, sers, N)
        psi = s_power(lams[0] - r, mu0, J, N).scale(T)
        Q = FrescoPresentation(tuple(lams[1:]), tuple(sers[1:]), N)
        lhs = xi_apply(Q, psi)
        rhs = s_power(lams[0] - 1, mu0, J, N).scale(sers[0])
        Ts.append(T)
        checks.append(lhs.eq_within(rhs) and T.is_unit())
        return tail + [psi]

    images = build(0)
    injective = joint_kernel_rank(P, [hom_images(P, x) for x in images]) == 0
    return Embedding(tuple(images), tuple(reversed(Ts)), tuple(reversed(checks)), injective)


def joint_kernel_rank(P: FrescoPresentation, image_lists: Sequence[Sequence[XiElement]]) -> int:
    """Rank of the kernel of ``y -> (phi_i(y))_i``."""
    k = P.rank
    N = min(z.truncation for imgs in image_lists for z in imgs)
    J = image_lists[0][0].log_cap
    rows = _log_rows(image_lists, range(J + 1), range(k))
    return k - reduce_series_matrix(rows, k, N).rank


@dataclass(frozen=True)
class EmbeddingDimension:
    dimension: int
    hom_indices: Tuple[int, ...]
    injective: bool
    lower_bound_certified: bool


def embedding_dimension(P: FrescoPresentation, hb: Optional[HomBasis] = None) -> EmbeddingDimension:
    """The least ``l`` with an injective ``E -> Xi^l``, which is ``rk S_1(E)``.

    The witness extends an embedding of ``S_1(E)``: homomorphisms of ``E``
    whose restrictions to ``S_1(E)`` are independent.  The lower bound holds
    because every restriction to ``S_1(E)`` has log degree 0.
    """
    hb = solve_annihilator(P) if hb is None else hb
    filt = ss_filtration(P, hb)
    S1 = list(filt[0].basis)
    l = len(S1)
    restricted = _restricted_images(hb, S1)
    lower_ok = all(x.log_degree in (None, 0) for row in restricted for x in row)
    N = min(x.truncation for row in restricted for x in row)
    chosen: List[int] = []
    rows: List[List[Fraction]] = []
    for i, row in enumerate(restricted):
        vec = [c for x in row for c in x.coefficient_vector(N)]
        if scalar_rank(rows + [vec]) > len(rows):
            rows.append(vec)
            chosen.append(i)
        if len(chosen) == l:
            break
    imgs = [hb.images[i] for i in chosen]
    injective = bool(imgs) and joint_kernel_rank(P, imgs) == 0
    return EmbeddingDimension(len(chosen), tuple(chosen), injective, lower_ok)


# summary


@dataclass
class FiltrationReport:
    depth: int
    ss_ranks: List[int]
    sigma_ranks: List[int]
    sigma_depths: List[int]
    nci_principal: List[int]
    L_invariants: Tuple[Fraction, ...]
    rank1_quotient_classes: List[Fraction]
    checks: Dict[str, bool] = field(default_factory=dict)


def filtration_report(P: FrescoPresentation, hb: Optional[HomBasis] = None) -> FiltrationReport:
    hb = solve_annihilator(P) if hb is None else hb
    k = P.rank
    d = depth(P, hb)
    ss = ss_filtration(P, hb)
    co = co_ss_filtration(P, hb)
    ss_ranks = [s.rank for s in ss]
    sig = [c.rank for c in co]
    sig_d = [c.depth for c in co]
    checks = {
        "rk S1 + d = k + 1": ss_ranks[0] + d == k + 1,
        "S_j/S_(j-1) rank 1": all(ss_ranks[j] - ss_ranks[j - 1] == 1 for j in range(1, len(ss_ranks))),
        "S_d = E": ss_ranks[-1] == k,
        "rk Sigma^1 = d - 1": len(sig) > 1 and sig[1] == d - 1 or (d == 1 and sig[1] == 0),
        "Sigma ranks strictly decrease to 0": sig[-1] == 0
        and all(sig[i] > sig[i + 1] for i in range(len(sig) - 1)),
        "d(Sigma^j) = d - j": all(sig_d[j] == d - j for j in range(len(sig_d))),
        "Sigma^j in S_(d-j)": all(
            submodule_contained(co[j].basis, ss[d - j - 1].basis)
            for j in range(1, len(co))
            if d - j - 1 >= 0 and co[j].rank
        ),
    }
    principal = principal_form(P)[0]
    rq = rank1_quotient_classes(P, hb)
    checks["k - d + 1 rank-1 quotients"] = len(rq) == k - d + 1
    try:
        Lq = L_series(P, hb).lambdas
    except Exception:  # reported through the check below
        Lq = ()
        checks["L-chain computed"] = False
    return FiltrationReport(d, ss_ranks, sig, sig_d, nci_list(principal), Lq, rq, checks)
