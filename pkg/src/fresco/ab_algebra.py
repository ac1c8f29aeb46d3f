"""The algebra of operators ``sum_n b^n P_n(a)`` with ``a b - b a = b^2``.

Elements are stored in b-left normal form: ``parts[n]`` is the polynomial
``P_n`` (coefficients by increasing degree in ``a``) multiplying ``b^n``
on the left.  The two-sided ideal generated by ``b^(N+1)`` is killed, so
all identities here are exact modulo ``b^(N+1)``.

The second half of the module handles factor chains

    (a - l1 b) S1^{-1} (a - l2 b) ... S_{k-1}^{-1} (a - lk b)

that present frescos, together with the commutation of adjacent factors.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exact_series import (
    Scalar,
    TruncSeries,
    _frac,
    invert_unit,
    natural_value,
    ode_solve,
    render_rational,
    render_series,
)
from .linalg import PrecisionInsufficient

Poly = Tuple[Fraction, ...]


def _ptrim(p: List[Fraction]) -> Poly:
    n = len(p)
    while n and not p[n - 1]:
        n -= 1
    return tuple(p[:n])


def _padd(p: Sequence[Fraction], q: Sequence[Fraction], c: Fraction = Fraction(1)) -> Poly:
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i, x in enumerate(p):
        out[i] += x
    for i, x in enumerate(q):
        out[i] += c * x
    return _ptrim(out)


class AbElement:
    """An element of the algebra truncated modulo ``b^(N+1)``."""

    __slots__ = ("parts",)

    def __init__(self, parts: Sequence[Sequence[Scalar]]):
        self.parts: Tuple[Poly, ...] = tuple(_ptrim([_frac(x) for x in p]) for p in parts)

    @property
    def truncation(self) -> int:
        return len(self.parts) - 1

    @classmethod
    def zero(cls, N: int) -> "AbElement":
        return cls([()] * (N + 1))

    @classmethod
    def one(cls, N: int) -> "AbElement":
        return cls.series(TruncSeries.one(N))

    @classmethod
    def a(cls, N: int) -> "AbElement":
        parts = [()] * (N + 1)
        parts[0] = (Fraction(0), Fraction(1))
        return cls(parts)

    @classmethod
    def b(cls, N: int) -> "AbElement":
        return cls.series(TruncSeries.monomial(1, 1, N))

    @classmethod
    def series(cls, S: TruncSeries) -> "AbElement":
        return cls([(c,) for c in S.coeffs])

    @classmethod
    def linear(cls, lam: Scalar, N: int) -> "AbElement":
        """The factor ``a - lam*b``."""
        parts = [()] * (N + 1)
        parts[0] = (Fraction(0), Fraction(1))
        if N >= 1:
            parts[1] = (-_frac(lam),)
        return cls(parts)

    def degree(self) -> int:
        return max((len(p) - 1 for p in self.parts), default=-1)

    def coefficient(self, nu: int, i: int) -> Fraction:
        p = self.parts[nu]
        return p[i] if i < len(p) else Fraction(0)

    def truncate(self, N: int) -> "AbElement":
        if N > self.truncation:
            raise ValueError("cannot raise truncation")
        return AbElement(self.parts[: N + 1])

    def __add__(self, other: "AbElement") -> "AbElement":
        n = min(self.truncation, other.truncation)
        return AbElement([_padd(self.parts[i], other.parts[i]) for i in range(n + 1)])

    def __sub__(self, other: "AbElement") -> "AbElement":
        n = min(self.truncation, other.truncation)
        return AbElement(
            [_padd(self.parts[i], other.parts[i], Fraction(-1)) for i in range(n + 1)]
        )

    def __neg__(self):
        return AbElement([tuple(-x for x in p) for p in self.parts])

    def scale(self, c: Scalar) -> "AbElement":
        c = _frac(c)
        return AbElement([tuple(c * x for x in p) for p in self.parts])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, AbElement):
            return normal_order_mul(self, other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, AbElement):
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def eq_within(self, other: "AbElement", order: Optional[int] = None) -> bool:
        n = min(self.truncation, other.truncation)
        if order is not None:
            n = min(n, order)
        return self.parts[: n + 1] == other.parts[: n + 1]

    def left_mul_a(self) -> "AbElement":
        """``a * X`` using ``a b^n = b^n a + n b^(n+1)``."""
        N = self.truncation
        out: List[List[Fraction]] = [[] for _ in range(N + 1)]
        for nu, p in enumerate(self.parts):
            if not p:
                continue
            shifted = [Fraction(0)] + list(p)
            out[nu] = list(_padd(out[nu], shifted))
            if nu and nu + 1 <= N:
                out[nu + 1] = list(_padd(out[nu + 1], p, Fraction(nu)))
        return AbElement(out)

    def left_mul_series(self, S: TruncSeries) -> "AbElement":
        N = min(self.truncation, S.truncation)
        out: List[List[Fraction]] = [[] for _ in range(N + 1)]
        sup = [(m, s) for m, s in enumerate(S.coeffs[: N + 1]) if s]
        for nu, p in enumerate(self.parts[: N + 1]):
            if not p:
                continue
            for m, s in sup:
                if nu + m > N:
                    break
                _accumulate(out[nu + m], p, s)
        return AbElement(out)

    def left_mul_linear(self, lam: Scalar) -> "AbElement":
        """``(a - lam*b) * X``."""
        lam = _frac(lam)
        ax = self.left_mul_a()
        bx = AbElement([()] + list(self.parts[:-1]))
        return ax - bx.scale(lam)

    def render(self) -> str:
        terms = []
        for nu, p in enumerate(self.parts):
            for i, c in enumerate(p):
                if not c:
                    continue
                mono = []
                if nu:
                    mono.append("b" if nu == 1 else f"b^{nu}")
                if i:
                    mono.append("a" if i == 1 else f"a^{i}")
                body = "*".join(mono)
                mag = abs(c)
                if not body:
                    s = render_rational(mag)
                elif mag == 1:
                    s = body
                else:
                    s = f"{render_rational(mag)}*{body}"
                if not terms:
                    terms.append(("-" if c < 0 else "") + s)
                else:
                    terms.append(("- " if c < 0 else "+ ") + s)
        return " ".join(terms) if terms else "0"

    def __repr__(self):
        return f"AbElement({self.render()!r}, N={self.truncation})"


def normal_order_mul(X: AbElement, Y: AbElement) -> AbElement:
    """The normal form of ``X * Y``."""
    N = min(X.truncation, Y.truncation)
    Y = Y.truncate(N)
    deg = X.degree()
    powers = [Y]
    for _ in range(deg):
        powers.append(powers[-1].left_mul_a())
    out: List[List[Fraction]] = [[] for _ in range(N + 1)]
    for nu in range(N + 1):
        p = X.parts[nu]
        for i, c in enumerate(p):
            if not c:
                continue
            Z = powers[i]
            for mu in range(N + 1 - nu):
                q = Z.parts[mu]
                if q:
                    _accumulate(out[nu + mu], q, c)
    return AbElement(out)


def _accumulate(target: List[Fraction], q: Sequence[Fraction], c: Fraction) -> None:
    """``target += c * q`` in place."""
    if len(target) < len(q):
        target.extend([Fraction(0)] * (len(q) - len(target)))
    for i, x in enumerate(q):
        if x:
            target[i] += c * x


# presentations


class IndexOutOfRange(IndexError):
    pass


class NonCommutingIndex(ValueError):
    """Adjacent factors at ``index`` cannot be exchanged."""

    def __init__(self, index: int, reason: str):
        super().__init__(f"index {index} is non-commuting: {reason}")
        self.index = index


class InvalidPresentation(ValueError):
    pass


def class_representative(x: Fraction) -> Fraction:
    """The representative of ``x`` modulo 1 lying in ``(0, 1]``."""
    return x - (math.ceil(x) - 1)


@dataclass(frozen=True)
class FrescoPresentation:
    """The chain ``(a - l1 b) S1^{-1} ... S_{k-1}^{-1} (a - lk b)``.

    ``series[j-1]`` holds ``S_j``; every ``S_j`` has constant term 1.  All
    series are stored at the common ``truncation``.
    """

    lambdas: Tuple[Fraction, ...]
    series: Tuple[TruncSeries, ...]
    truncation: int

    def __post_init__(self):
        lams = tuple(_frac(x) for x in self.lambdas)
        object.__setattr__(self, "lambdas", lams)
        if not lams:
            raise InvalidPresentation("a presentation needs at least one factor")
        if len(self.series) != len(lams) - 1:
            raise InvalidPresentation(
                f"rank {len(lams)} needs {len(lams) - 1} series, got {len(self.series)}"
            )
        ser = []
        for j, s in enumerate(self.series, start=1):
            if s.truncation < self.truncation:
                raise InvalidPresentation(
                    f"S_{j} is known to order {s.truncation} < {self.truncation}"
                )
            s = s.truncate(self.truncation)
            if s[0] != 1:
                raise InvalidPresentation(f"S_{j}(0) = {s[0]}, expected 1")
            ser.append(s)
        object.__setattr__(self, "series", tuple(ser))

    @classmethod
    def build(cls, lambdas: Sequence[Scalar], series: Sequence, truncation: int):
        """Convenience constructor accepting series as text or TruncSeries."""
        from .exact_series import parse_rational, parse_series

        lambdas = [parse_rational(x) if isinstance(x, str) else x for x in lambdas]
        ser = []
        for s in series:
            if isinstance(s, str):
                s = parse_series(s, truncation)
            elif isinstance(s, (int, Fraction)):
                s = TruncSeries.constant(s, truncation)
            ser.append(s)
        return cls(tuple(_frac(x) for x in lambdas), tuple(ser), truncation)

    @property
    def rank(self) -> int:
        return len(self.lambdas)

    def S(self, j: int) -> TruncSeries:
        """``S_j`` for ``1 <= j <= k-1``."""
        if not 1 <= j <= self.rank - 1:
            raise IndexOutOfRange(f"no series S_{j} in rank {self.rank}")
        return self.series[j - 1]

    def lam(self, j: int) -> Fraction:
        return self.lambdas[j - 1]

    def keys(self) -> List[Fraction]:
        """The sequence ``lambda_j + j``."""
        return [l + j for j, l in enumerate(self.lambdas, start=1)]

    def with_truncation(self, N: int) -> "FrescoPresentation":
        if N > self.truncation:
            raise ValueError("cannot raise truncation of a presentation")
        return FrescoPresentation(self.lambdas, tuple(s.truncate(N) for s in self.series), N)

    def prefix(self, m: int) -> "FrescoPresentation":
        """The sub-fresco spanned by ``e_1..e_m``."""
        return FrescoPresentation(self.lambdas[:m], self.series[: m - 1], self.truncation)

    def quotient(self, m: int) -> "FrescoPresentation":
        """The quotient by the sub-fresco spanned by ``e_1..e_m``."""
        return FrescoPresentation(self.lambdas[m:], self.series[m:], self.truncation)

    def render(self) -> str:
        parts = []
        for j, l in enumerate(self.lambdas, start=1):
            parts.append(f"(a - {render_rational(l)}*b)")
            if j < self.rank:
                s = self.series[j - 1]
                if s != 1:
                    parts.append(f"({render_series(s)})^-1")
        return ".".join(parts)

    def __repr__(self):
        return f"FrescoPresentation({self.render()}, N={self.truncation})"


@dataclass(frozen=True)
class ValidationReport:
    primitive: bool
    geometric: bool
    class_rep: Fraction

    @property
    def ok(self) -> bool:
        return self.primitive and self.geometric


def validate(P: FrescoPresentation) -> ValidationReport:
    l0 = P.lambdas[0]
    primitive = all((l - l0).denominator == 1 for l in P.lambdas)
    k = P.rank
    geometric = all(key > k for key in P.keys())
    return ValidationReport(primitive, geometric, class_representative(l0))


def from_presentation(P: FrescoPresentation) -> AbElement:
    """Expand the factor chain into normal form."""
    N = P.truncation
    X = AbElement.linear(P.lambdas[-1], N)
    for j in range(P.rank - 1, 0, -1):
        X = X.left_mul_series(invert_unit(P.S(j)))
        X = X.left_mul_linear(P.lam(j))
    return X


def homogeneous_part(P: FrescoPresentation) -> AbElement:
    """The product of the bare factors ``(a - l_j b)``."""
    N = P.truncation
    X = AbElement.linear(P.lambdas[-1], N)
    for j in range(P.rank - 1, 0, -1):
        X = X.left_mul_linear(P.lam(j))
    return X


def fundamental_invariants(P: FrescoPresentation) -> List[Fraction]:
    """The multiset ``{lambda_j + j}``, sorted."""
    return sorted(P.keys())


def delta(P: FrescoPresentation, j: int) -> Fraction:
    """``lambda_{j+1} + 1 - lambda_j``."""
    if not 1 <= j <= P.rank - 1:
        raise IndexOutOfRange(f"index {j} not in [1, {P.rank - 1}]")
    return P.lam(j + 1) + 1 - P.lam(j)


# Bernstein polynomial helpers (coefficients by increasing degree in x)


def poly_from_roots(roots: Sequence[Fraction]) -> List[Fraction]:
    p = [Fraction(1)]
    for r in roots:
        q = [Fraction(0)] * (len(p) + 1)
        for i, c in enumerate(p):
            q[i + 1] += c
            q[i] -= r * c
        p = q
    return p


def poly_eval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> List[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return out


def poly_shift(p: Sequence[Fraction], c: Fraction) -> List[Fraction]:
    """Coefficients of ``p(x - c)``."""
    out = [Fraction(0)]
    for coef in reversed(p):
        # out = out * (x - c) + coef
        nxt = [Fraction(0)] * (len(out) + 1)
        for i, y in enumerate(out):
            nxt[i + 1] += y
            nxt[i] -= c * y
        nxt[0] += coef
        out = nxt
    while len(out) > 1 and not out[-1]:
        out.pop()
    return out


def bernstein_roots(P: FrescoPresentation) -> List[Fraction]:
    """Roots of the Bernstein polynomial, built one factor at a time.

    A one-factor chain ``(a - l b)`` has the root ``-l``.  Appending a
    factor ``(a - l b)`` on the right of a chain of rank ``m`` shifts the
    old roots by ``+1`` and adds ``-l``.
    """
    roots = [-P.lambdas[0]]
    for l in P.lambdas[1:]:
        roots = [r + 1 for r in roots] + [-l]
    return sorted(roots)


def bernstein_polynomial(P: FrescoPresentation) -> List[Fraction]:
    """``B(x)`` read off the homogeneous part in normal form.

    With ``theta = b^{-1} a`` one has ``b^{k-i} a^i = b^k theta(theta+1)..(theta+i-1)``,
    so ``(-b)^{-k} P_E = B(-theta)`` gives
    ``B(x) = sum_i c_i (-1)^(k+i) x(x-1)..(x-i+1)`` where ``c_i`` is the
    coefficient of ``b^{k-i} a^i``.
    """
    k = P.rank
    if P.truncation < k:
        raise PrecisionInsufficient("truncation must be at least the rank")
    H = homogeneous_part(P)
    out = [Fraction(0)] * (k + 1)
    for i in range(k + 1):
        c = H.coefficient(k - i, i)
        if not c:
            continue
        falling = [Fraction(1)]
        for t in range(i):
            falling = poly_mul(falling, [Fraction(-t), Fraction(1)])
        sign = -1 if (k + i) % 2 else 1
        for d, f in enumerate(falling):
            out[d] += sign * c * f
    return out


# commutation of adjacent factors


@dataclass(frozen=True)
class SwapCertificate:
    """Data of one exchange of adjacent factors at ``index``.

    ``U`` solves ``b U' = delta (U - S_j)``.  ``left_unit`` and
    ``right_unit`` are the units ``U^{-1}`` absorbed at the ends of the
    chain (``None`` when nothing was absorbed on that side).
    """

    index: int
    delta: Fraction
    U: TruncSeries
    rho_used: Fraction
    left_unit: Optional[TruncSeries] = None
    right_unit: Optional[TruncSeries] = None


def swap_precondition(P: FrescoPresentation, j: int) -> Optional[str]:
    """``None`` when the factors at ``j, j+1`` commute, else the reason."""
    d = delta(P, j)
    if d.denominator != 1:
        raise InvalidPresentation("presentation is not primitive")
    p = d.numerator
    if p <= -1:
        return None
    if p == 0:
        return "delta is 0"
    if p > P.truncation:
        raise PrecisionInsufficient(f"coefficient of b^{p} is beyond the truncation")
    c = P.S(j)[p]
    if c:
        return f"coefficient of b^{p} in S_{j} is {render_rational(c)}"
    return None


def swap_adjacent(
    P: FrescoPresentation, j: int, rho: Optional[Scalar] = None
) -> Tuple[FrescoPresentation, SwapCertificate]:
    """Exchange the factors at positions ``j`` and ``j+1``.

    A solution ``U`` of ``b U' = delta (U - S_j)`` gives
    ``(a - l_j b) S_j^{-1} (a - l_{j+1} b) =
    U^{-1} (a - (l_{j+1}+1) b) (S_j U^{-2})^{-1} (a - (l_j - 1) b) U^{-1}``.
    The outer ``U^{-1}`` factors are absorbed into neighbouring series or,
    at the ends of the chain, recorded in the certificate.
    """
    reason = swap_precondition(P, j)
    if reason is not None:
        raise NonCommutingIndex(j, reason)
    k = P.rank
    d = delta(P, j)
    S = P.S(j)
    r = _frac(rho) if rho is not None else Fraction(0)
    U = ode_solve(d, S.scale(-d), r if d >= 1 else None)
    Uinv = invert_unit(U)
    lams = list(P.lambdas)
    lams[j - 1], lams[j] = P.lam(j + 1) + 1, P.lam(j) - 1
    ser = list(P.series)
    ser[j - 1] = S * Uinv * Uinv
    left = right = None
    if j > 1:
        ser[j - 2] = U * ser[j - 2]
    else:
        left = Uinv
    if j + 1 < k:
        ser[j] = ser[j] * U
    else:
        right = Uinv
    newP = FrescoPresentation(tuple(lams), tuple(ser), P.truncation)
    cert = SwapCertificate(j, d, U, r if d >= 1 else Fraction(0), left, right)
    return newP, cert


def verify_swap(P: FrescoPresentation, P2: FrescoPresentation, cert: SwapCertificate) -> bool:
    """Check ``P = L * P2 * R`` in normal form, with ``L, R`` the absorbed units."""
    N = min(P.truncation, P2.truncation)
    rhs = from_presentation(P2.with_truncation(N))
    if cert.left_unit is not None:
        rhs = normal_order_mul(AbElement.series(cert.left_unit.truncate(N)), rhs)
    if cert.right_unit is not None:
        rhs = normal_order_mul(rhs, AbElement.series(cert.right_unit.truncate(N)))
    lhs = from_presentation(P.with_truncation(N))
    return lhs.eq_within(rhs)


def principal_form(P: FrescoPresentation) -> Tuple[FrescoPresentation, List[SwapCertificate]]:
    """Stable bubble sort of the keys ``lambda_j + j`` into nondecreasing order.

    Every exchange needed has ``delta_j <= -1`` so it never fails.
    """
    certs = []
    cur = P
    changed = True
    while changed:
        changed = False
        keys = cur.keys()
        for j in range(1, cur.rank):
            if keys[j - 1] > keys[j]:
                cur, cert = swap_adjacent(cur, j)
                certs.append(cert)
                keys = cur.keys()
                changed = True
    return cur, certs


def is_non_commuting(P: FrescoPresentation, j: int) -> bool:
    d = delta(P, j)
    if d.denominator != 1 or d < 0:
        return False
    p = d.numerator
    if p == 0:
        return True
    if p > P.truncation:
        raise PrecisionInsufficient(f"coefficient of b^{p} is beyond the truncation")
    return P.S(j)[p] != 0


def nci_list(P: FrescoPresentation) -> List[int]:
    """Indices ``j`` whose rank-2 subquotient is a theme."""
    return [j for j in range(1, P.rank) if is_non_commuting(P, j)]


def invariant_twists(inv: Sequence[Fraction], k: int, N: Scalar) -> Dict[str, List[Fraction]]:
    """Invariants after tensoring with ``E_N`` and of the twisted dual."""
    N = _frac(N)
    return {
        "tensor": sorted(v + N for v in inv),
        "dual_twist": sorted(-v + k + N for v in inv),
    }


def multiset_equal(a: Sequence[Fraction], b: Sequence[Fraction]) -> bool:
    return Counter(a) == Counter(b)
