"""A fresco as a free ``Q[[b]]``-module with its ``a``-action.

The basis ``e_1..e_k`` of ``E = A/A.P`` satisfies
``(a - l_j b) e_j = S_{j-1} e_{j-1}`` with ``e_0 = 0``; ``e_k`` is the
class of 1.  Elements are coordinate vectors of truncated series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .ab_algebra import (
    FrescoPresentation,
    fundamental_invariants,
    validate,
)
from .exact_series import (
    Scalar,
    TruncSeries,
    _frac,
    invert_unit,
    natural_value,
    ode_solve,
    render_series,
)
from .linalg import nullspace, rank as scalar_rank, rref


@dataclass(frozen=True)
class BasisElement:
    """The element ``sum_j coords[j-1] e_j`` of the fresco presented by ``pres``."""

    coords: Tuple[TruncSeries, ...]
    pres: FrescoPresentation

    def __post_init__(self):
        if len(self.coords) != self.pres.rank:
            raise ValueError("coordinate count differs from the rank")
        n = min(c.truncation for c in self.coords)
        object.__setattr__(self, "coords", tuple(c.truncate(n) for c in self.coords))

    @classmethod
    def basis_vector(cls, pres: FrescoPresentation, j: int, N: Optional[int] = None):
        N = pres.truncation if N is None else N
        return cls(
            tuple(
                TruncSeries.one(N) if i == j else TruncSeries.zero(N)
                for i in range(1, pres.rank + 1)
            ),
            pres,
        )

    @classmethod
    def zero(cls, pres: FrescoPresentation, N: Optional[int] = None):
        N = pres.truncation if N is None else N
        return cls(tuple(TruncSeries.zero(N) for _ in range(pres.rank)), pres)

    @property
    def truncation(self) -> int:
        return self.coords[0].truncation

    def __add__(self, other: "BasisElement") -> "BasisElement":
        return BasisElement(tuple(x + y for x, y in zip(self.coords, other.coords)), self.pres)

    def __sub__(self, other: "BasisElement") -> "BasisElement":
        return BasisElement(tuple(x - y for x, y in zip(self.coords, other.coords)), self.pres)

    def scale(self, c) -> "BasisElement":
        """Multiply by a scalar or by a series."""
        if isinstance(c, TruncSeries):
            return BasisElement(tuple(c * x for x in self.coords), self.pres)
        return BasisElement(tuple(x.scale(c) for x in self.coords), self.pres)

    def truncate(self, N: int) -> "BasisElement":
        return BasisElement(tuple(x.truncate(N) for x in self.coords), self.pres)

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.coords)

    def is_primitive(self) -> bool:
        """True when the element does not lie in ``bE``."""
        return any(x[0] for x in self.coords)

    def eq_within(self, other: "BasisElement") -> bool:
        return all(x.eq_within(y) for x, y in zip(self.coords, other.coords))

    def render(self) -> str:
        parts = []
        for j, x in enumerate(self.coords, start=1):
            if not x.is_zero():
                parts.append(f"({render_series(x)})*e{j}")
        return " + ".join(parts) if parts else "0"


def act_a(x: BasisElement) -> BasisElement:
    """``a.(sum X_j e_j) = sum [l_j b X_j + b^2 X_j' + S_j X_{j+1}] e_j``."""
    P = x.pres
    k = P.rank
    X = x.coords
    out = []
    for j in range(1, k + 1):
        y = X[j - 1].shift(1).scale(P.lam(j)) + X[j - 1].b2_derivative()
        if j < k:
            y = y + P.S(j) * X[j]
        out.append(y.truncate(min(y.truncation, x.truncation)))
    return BasisElement(tuple(out), P)


def act_b(x: BasisElement) -> BasisElement:
    return BasisElement(tuple(c.shift(1).truncate(c.truncation) for c in x.coords), x.pres)


def act_linear(x: BasisElement, mu: Scalar) -> BasisElement:
    """``(a - mu b) x``."""
    return act_a(x) - act_b(x).scale(_frac(mu))


def act_polynomial(x: BasisElement, lams: Sequence[Scalar], series: Sequence[TruncSeries]):
    """Apply a factor chain ``(a - m1 b) T1^{-1} ... (a - mr b)`` to ``x``."""
    y = act_linear(x, lams[-1])
    for j in range(len(lams) - 2, -1, -1):
        y = y.scale(invert_unit(series[j]))
        y = act_linear(y, lams[j])
    return y


# kernels of a - mu b


def kernel(P: FrescoPresentation, mu: Scalar) -> List[BasisElement]:
    """A basis over the scalars of ``{x in E : (a - mu b) x = 0}``.

    Coordinates are solved from the top down.  Coordinate ``j`` satisfies
    ``b X_j' = (mu - l_j) X_j - S_j X_{j+1} / b``, which requires
    ``X_{j+1}(0) = 0`` and is an instance of :func:`ode_solve`; its
    resonance either imposes a linear condition on the partial solutions
    or creates a new one.
    """
    mu = _frac(mu)
    k = P.rank
    N = P.truncation
    # partial solutions: lists of coordinates (X_j, ..., X_k)
    partial: List[List[TruncSeries]] = []
    d = natural_value(mu - P.lam(k))
    if d is not None and d <= N:
        partial.append([TruncSeries.monomial(1, d, N)])
    for j in range(k - 1, 0, -1):
        dj = mu - P.lam(j)
        p = natural_value(dj)
        S = P.S(j)
        Ws = [S * v[0] for v in partial]
        rows = []
        if Ws:
            rows.append([W[0] for W in Ws])
            if p is not None:
                if p + 1 > min(W.truncation for W in Ws):
                    raise ValueError("truncation too small for the kernel computation")
                rows.append([-W[p + 1] for W in Ws])
        combos = nullspace(rows, len(partial)) if partial else []
        new_partial = []
        for c in combos:
            vec = None
            for ci, v in zip(c, partial):
                if ci:
                    term = [x.scale(ci) for x in v]
                    vec = term if vec is None else [x + y for x, y in zip(vec, term)]
            if vec is None:
                continue
            W = S * vec[0]
            R = -W.unshift(1)
            Xj = ode_solve(dj, R)
            new_partial.append([Xj] + [x.truncate(Xj.truncation) for x in vec])
        if p is not None and p <= N:
            n_here = new_partial[0][0].truncation if new_partial else N
            fresh = [TruncSeries.monomial(1, p, n_here)] + [
                TruncSeries.zero(n_here) for _ in range(k - j)
            ]
            new_partial.append(fresh)
        partial = new_partial
    out = [BasisElement(tuple(v), P) for v in partial]
    return _echelon_by_valuation(out)


def _echelon_by_valuation(vectors: List[BasisElement]) -> List[BasisElement]:
    """Scalar echelon form of a list of elements (deterministic output)."""
    if not vectors:
        return []
    N = min(v.truncation for v in vectors)
    k = vectors[0].pres.rank
    flat = [
        [v.coords[j][n] for n in range(N + 1) for j in range(k)] for v in vectors
    ]
    m, piv = rref(flat)
    out = []
    P = vectors[0].pres
    for row in m[: len(piv)]:
        coords = tuple(
            TruncSeries([row[n * k + j] for n in range(N + 1)], N) for j in range(k)
        )
        out.append(BasisElement(coords, P))
    return out


@dataclass(frozen=True)
class Rank1Family:
    """The kernel of ``a - mu b`` and how many of its directions are primitive."""

    mu: Fraction
    basis: Tuple[BasisElement, ...]
    primitive_rank: int

    @property
    def kernel_dim(self) -> int:
        return len(self.basis)

    @property
    def unique_line(self) -> bool:
        return self.kernel_dim == 1 and self.primitive_rank == 1

    def generators(self) -> List[BasisElement]:
        """Primitive elements spanning normal rank-1 submodules."""
        return [v for v in self.basis if v.is_primitive()]


def candidate_mus(P: FrescoPresentation) -> List[Fraction]:
    """``mu`` congruent to the class in ``(0, max_j(l_j + j)]``."""
    rep = validate(P).class_rep
    top = max(P.keys())
    out = []
    mu = rep
    while mu <= top:
        out.append(mu)
        mu += 1
    return out


def rank1_normal_submodules(P: FrescoPresentation) -> List[Rank1Family]:
    """Every ``mu`` for which ``E`` has a normal submodule isomorphic to ``E_mu``."""
    fams = []
    for mu in candidate_mus(P):
        K = kernel(P, mu)
        if not K:
            continue
        prank = scalar_rank([[x[0] for x in v.coords] for v in K])
        if prank:
            fams.append(Rank1Family(mu, tuple(K), prank))
    return fams


def is_theme(P: FrescoPresentation) -> bool:
    """True when ``E`` has exactly one normal rank-1 submodule."""
    fams = rank1_normal_submodules(P)
    return len(fams) == 1 and fams[0].unique_line


# presentations of submodules


class NotAStable(ValueError):
    """The span could not be closed under ``a`` within the window."""


class NoCyclicGeneratorFound(ArithmeticError):
    pass


@dataclass(frozen=True)
class SubmodulePresentation:
    pres: FrescoPresentation
    generator: BasisElement
    basis: Tuple[BasisElement, ...]
    verified: bool


def _vec(x: BasisElement, N: int) -> List[TruncSeries]:
    return [c.truncate(N) for c in x.coords]


def a_stable_saturation(gens: Sequence[BasisElement]):
    """Unit-pivot basis of the saturated ``A``-submodule spanned by ``gens``."""
    from .linalg import in_span, saturate

    P = gens[0].pres
    k = P.rank
    N = min(g.truncation for g in gens)
    current = [_vec(g, N) for g in gens]
    for _ in range(k + 1):
        basis, piv = saturate(current, k, N)
        N = min([N] + [c.truncation for r in basis for c in r])
        imgs = [act_a(BasisElement(tuple(r), P)) for r in basis]
        N = min([N] + [y.truncation for y in imgs])
        basis = [[c.truncate(N) for c in r] for r in basis]
        missing = [_vec(y, N) for y in imgs if not in_span(_vec(y, N), basis, piv)]
        if not missing:
            return basis, piv, N
        current = basis + missing
    raise NotAStable("span is not closed under a")


def submodule_presentation(gens: Sequence[BasisElement], hb=None) -> SubmodulePresentation:
    """A presentation ``(m1, T1, ..., mr)`` of the normal submodule spanned by ``gens``.

    A cyclic generator is searched among small constant combinations of
    the saturated basis.  The Jordan-Hoelder factors are then peeled off the
    top: a homomorphism to ``Xi`` of log degree 0 that does not kill the
    current generator ``g`` gives ``mu`` and the unit ``T`` through
    ``psi(g) = c b^m T xi_0``, and ``(a - mu b)`` of the normalised
    generator spans the kernel.
    """
    from itertools import product

    from . import xi_asymptotics as xa

    if not gens:
        raise ValueError("no generators")
    P = gens[0].pres
    hb = xa.solve_annihilator(P) if hb is None else hb
    basis, piv, N = a_stable_saturation(gens)
    r = len(basis)
    elems = [BasisElement(tuple(b_), P) for b_ in basis]

    def krylov_rank(x: BasisElement) -> int:
        rows, y = [], x
        for _ in range(r):
            rows.append([y.coords[p][0] for p in piv])
            y = act_a(y)
        return scalar_rank(rows)

    gen = None
    for weight in range(1, 4):
        for c in product(range(-weight, weight + 1), repeat=r):
            if max(abs(t) for t in c) != weight and weight > 1:
                continue
            if not any(c):
                continue
            x = None
            for ci, e in zip(c, elems):
                if ci:
                    t = e.scale(ci)
                    x = t if x is None else x + t
            if krylov_rank(x) == r:
                gen = x
                break
        if gen is not None:
            break
    if gen is None:
        raise NoCyclicGeneratorFound("no constant combination generates the submodule")

    mus: List[Fraction] = []
    units: List[TruncSeries] = []
    g = gen
    top = None
    for level in range(r, 0, -1):
        images = [xa.apply_hom(img, g) for img in hb.images]
        H0 = xa._log_zero_homs([[z] for z in images])
        psi_g = None
        for c in H0:
            acc = None
            for ci, z in zip(c, images):
                if ci:
                    t = z.parts[0].scale(ci)
                    acc = t if acc is None else acc + t
            if acc is not None and not acc.is_zero():
                if psi_g is None or acc.valuation() < psi_g.valuation():
                    psi_g = acc
        if psi_g is None:
            raise NoCyclicGeneratorFound("no log-0 homomorphism detects the generator")
        m = psi_g.valuation()
        u = psi_g.unshift(m).scale(1 / psi_g[m])
        g = g.scale(invert_unit(u))
        if top is None:
            top = g
        mus.append(hb.mu0 + m)
        units.append(u)
        g = act_linear(g, hb.mu0 + m)
    lambdas = tuple(reversed(mus))
    series = tuple(reversed(units[1:]))
    Nout = min([s.truncation for s in series] + [top.truncation])
    Q = FrescoPresentation(lambdas, tuple(s.truncate(Nout) for s in series), Nout)
    from collections import Counter

    annihilated = act_polynomial(top, lambdas, list(series)).is_zero()
    inv_sub, inv_all = Counter(fundamental_invariants(Q)), Counter(fundamental_invariants(P))
    verified = annihilated and not (inv_sub - inv_all) and g.is_zero()
    return SubmodulePresentation(Q, top, tuple(elems), verified)
