"""Truncated formal power series in ``b`` with exact rational coefficients.

A :class:`TruncSeries` with truncation ``N`` stores the coefficients of
``b^0 .. b^N`` and stands for the class of a power series modulo
``b^(N+1)``.  Arithmetic between series of different truncations is
carried out modulo the smaller one, so the truncation of a result is
always an honest statement about how many coefficients are known.

>>> s = parse_series("1 + b", 4)
>>> render_series(invert_unit(s))
'1 - b + b^2 - b^3 + b^4'
>>> render_series(ode_solve(2, parse_series("b", 5)))
'-b'
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

Rational = Fraction
Scalar = Union[int, Fraction]

__all__ = [
    "Rational",
    "TruncSeries",
    "NotAUnit",
    "Obstructed",
    "SeriesSyntaxError",
    "add",
    "mul",
    "invert_unit",
    "derivative",
    "ode_solve",
    "parse_rational",
    "render_rational",
    "parse_series",
    "render_series",
    "natural_value",
]


class NotAUnit(ArithmeticError):
    """Raised when inverting a series whose constant term vanishes."""


class Obstructed(ArithmeticError):
    """Raised by :func:`ode_solve` when a resonant equation has no solution.

    ``index`` is the resonant exponent ``p`` at which ``r_p != 0``.
    """

    def __init__(self, index: int, residue: Fraction):
        super().__init__(f"resonant coefficient at b^{index} is {residue}, not 0")
        self.index = index
        self.residue = residue


class SeriesSyntaxError(ValueError):
    """Malformed series or rational text.  ``column`` is 1-based."""

    def __init__(self, message: str, text: str, column: int):
        super().__init__(f"{message} at column {column} in {text!r}")
        self.reason = message
        self.text = text
        self.column = column


def _frac(value: Scalar) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def natural_value(value: Fraction) -> Optional[int]:
    """Return ``value`` as an ``int`` if it is a natural number, else ``None``."""
    if value.denominator == 1 and value.numerator >= 0:
        return value.numerator
    return None


def _integral_support(coeffs) -> Tuple[int, List[Tuple[int, int]]]:
    """``(D, [(i, D*c_i)])`` over the nonzero ``c_i``, ``D`` the lcm of denominators."""
    D = 1
    for c in coeffs:
        if c and c.denominator != 1:
            D = math.lcm(D, c.denominator)
    return D, [(i, c.numerator * (D // c.denominator)) for i, c in enumerate(coeffs) if c]


class TruncSeries:
    """A power series in ``b`` known modulo ``b^(N+1)``.

    Instances are immutable.  ``coeffs[n]`` is the coefficient of ``b^n``
    and ``len(coeffs) == N + 1``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[Scalar], truncation: Optional[int] = None):
        c = [_frac(x) for x in coeffs]
        if truncation is not None:
            if truncation < 0:
                raise ValueError("truncation must be non-negative")
            if len(c) > truncation + 1:
                c = c[: truncation + 1]
            else:
                c.extend([Fraction(0)] * (truncation + 1 - len(c)))
        if not c:
            raise ValueError("a series needs at least one coefficient")
        self._c = tuple(c)

    @classmethod
    def _raw(cls, coeffs: tuple) -> "TruncSeries":
        obj = cls.__new__(cls)
        obj._c = coeffs
        return obj

    # construction helpers

    @classmethod
    def zero(cls, truncation: int) -> "TruncSeries":
        return cls._raw((Fraction(0),) * (truncation + 1))

    @classmethod
    def one(cls, truncation: int) -> "TruncSeries":
        return cls.constant(1, truncation)

    @classmethod
    def constant(cls, value: Scalar, truncation: int) -> "TruncSeries":
        return cls.monomial(value, 0, truncation)

    @classmethod
    def monomial(cls, value: Scalar, power: int, truncation: int) -> "TruncSeries":
        c = [Fraction(0)] * (truncation + 1)
        if power < 0:
            raise ValueError("negative power")
        if power <= truncation:
            c[power] = _frac(value)
        return cls._raw(tuple(c))

    # basic accessors

    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def truncation(self) -> int:
        return len(self._c) - 1

    def __getitem__(self, n: int) -> Fraction:
        if n < 0:
            raise IndexError(n)
        if n > self.truncation:
            raise IndexError(f"coefficient b^{n} is beyond truncation {self.truncation}")
        return self._c[n]

    def coeff(self, n: int) -> Fraction:
        """Coefficient of ``b^n`` (``IndexError`` beyond the truncation)."""
        return self[n]

    def valuation(self) -> Optional[int]:
        """Index of the first nonzero coefficient, ``None`` for zero."""
        for n, x in enumerate(self._c):
            if x:
                return n
        return None

    def is_zero(self) -> bool:
        return not any(self._c)

    def is_unit(self) -> bool:
        return self._c[0] != 0

    def truncate(self, truncation: int) -> "TruncSeries":
        if truncation > self.truncation:
            raise ValueError(
                f"cannot raise truncation from {self.truncation} to {truncation}"
            )
        return TruncSeries._raw(self._c[: truncation + 1])

    def degree(self) -> Optional[int]:
        for n in range(self.truncation, -1, -1):
            if self._c[n]:
                return n
        return None

    # arithmetic

    def _coerce(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return TruncSeries.constant(other, self.truncation)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = min(self.truncation, other.truncation)
        a, b = self._c, other._c
        return TruncSeries._raw(tuple(a[i] + b[i] for i in range(n + 1)))

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw(tuple(-x for x in self._c))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = min(self.truncation, other.truncation)
        a, b = self._c, other._c
        return TruncSeries._raw(tuple(a[i] - b[i] for i in range(n + 1)))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, value: Scalar) -> "TruncSeries":
        v = _frac(value)
        return TruncSeries._raw(tuple(v * x for x in self._c))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, TruncSeries):
            return NotImplemented
        n = min(self.truncation, other.truncation)
        # convolve integer numerators over a common denominator
        da, sa = _integral_support(self._c[: n + 1])
        db, sb = _integral_support(other._c[: n + 1])
        out = [0] * (n + 1)
        for i, x in sa:
            lim = n - i
            for j, y in sb:
                if j > lim:
                    break
                out[i + j] += x * y
        den = da * db
        return TruncSeries._raw(tuple(Fraction(v, den) if v else Fraction(0) for v in out))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, exponent: int) -> "TruncSeries":
        if exponent < 0:
            return invert_unit(self) ** (-exponent)
        result = TruncSeries.one(self.truncation)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def shift(self, m: int) -> "TruncSeries":
        """Multiply by ``b^m``.  The product is known to order ``N + m``."""
        if m < 0:
            return self.unshift(-m)
        return TruncSeries._raw((Fraction(0),) * m + self._c)

    def unshift(self, m: int) -> "TruncSeries":
        """Divide by ``b^m``; the first ``m`` coefficients must vanish."""
        if m > self.truncation + 1:
            raise ValueError(f"cannot divide by b^{m} at truncation {self.truncation}")
        if any(self._c[:m]):
            raise ValueError(f"series is not divisible by b^{m}")
        if m == self.truncation + 1:
            raise ValueError("division leaves no known coefficients")
        return TruncSeries._raw(self._c[m:])

    def derivative(self) -> "TruncSeries":
        """``dS/db``; one coefficient of precision is consumed."""
        if self.truncation == 0:
            raise ValueError("derivative of a series truncated at order 0")
        return TruncSeries._raw(tuple(n * self._c[n] for n in range(1, len(self._c))))

    def b2_derivative(self) -> "TruncSeries":
        """``b^2 * dS/db`` at the same truncation (no precision is lost)."""
        c = self._c
        out = [Fraction(0)] * len(c)
        for n in range(2, len(c)):
            out[n] = (n - 1) * c[n - 1]
        return TruncSeries._raw(tuple(out))

    def b_derivative(self) -> "TruncSeries":
        """``b * dS/db`` (the Euler operator) at the same truncation."""
        return TruncSeries._raw(tuple(n * x for n, x in enumerate(self._c)))

    def inverse(self) -> "TruncSeries":
        return invert_unit(self)

    def eq_within(self, other: "TruncSeries", order: Optional[int] = None) -> bool:
        """Equality of coefficients up to ``order`` (default: common truncation)."""
        n = min(self.truncation, other.truncation)
        if order is not None:
            n = min(n, order)
        return self._c[: n + 1] == other._c[: n + 1]

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self._c[0] == other and not any(self._c[1:])
        return NotImplemented

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        return f"TruncSeries({render_series(self)!r}, N={self.truncation})"

    def __str__(self):
        return render_series(self)


def add(A: TruncSeries, B: TruncSeries) -> TruncSeries:
    return A + B


def mul(A: TruncSeries, B: TruncSeries) -> TruncSeries:
    return A * B


def invert_unit(S: TruncSeries) -> TruncSeries:
    """Inverse of a unit series, to the same truncation."""
    c = S.coeffs
    if c[0] == 0:
        raise NotAUnit("constant term is zero")
    n = len(c) - 1
    inv0 = 1 / c[0]
    support = [(j, x) for j, x in enumerate(c) if j and x]
    out = [Fraction(0)] * (n + 1)
    out[0] = inv0
    for m in range(1, n + 1):
        acc = Fraction(0)
        for j, x in support:
            if j > m:
                break
            acc += x * out[m - j]
        out[m] = -acc * inv0
    return TruncSeries._raw(tuple(out))


def derivative(S: TruncSeries) -> TruncSeries:
    return S.derivative()


def ode_solve(delta: Scalar, R: TruncSeries, rho: Optional[Scalar] = None) -> TruncSeries:
    """Solve ``b*T' = delta*T + R`` coefficientwise.

    At ``n == delta`` (only possible for a natural ``delta``) the equation
    reads ``0 = r_n``; the coefficient ``t_n`` is then free and set to
    ``rho`` (default 0).  A nonzero ``r_n`` raises :class:`Obstructed`.
    """
    d = _frac(delta)
    p = natural_value(d)
    r = R.coeffs
    out = []
    for n, rn in enumerate(r):
        if n == p:
            if rn:
                raise Obstructed(n, rn)
            out.append(_frac(rho) if rho is not None else Fraction(0))
        else:
            out.append(rn / (n - d))
    return TruncSeries._raw(tuple(out))


# text formats

_RATIONAL_RE = re.compile(r"\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` with ``q > 0``."""
    m = _RATIONAL_RE.match(text)
    if not m:
        raise SeriesSyntaxError("expected a rational 'p' or 'p/q'", text, 1)
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise SeriesSyntaxError("zero denominator", text, m.start(2) + 1)
    return Fraction(num, den)


def render_rational(x: Scalar) -> str:
    x = _frac(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([+\-*/^])|(b))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise SeriesSyntaxError("unexpected character", text, col)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), m.start(1) + 1))
        elif m.group(2) is not None:
            tokens.append((m.group(2), None, m.start(2) + 1))
        else:
            tokens.append(("b", None, m.start(3) + 1))
        pos = m.end()
    tokens.append(("end", None, len(text) + 1))
    return tokens


def parse_series(text: str, truncation: int) -> TruncSeries:
    """Parse ``term (('+'|'-') term)*`` where a term is ``[coeff] ['*'] [b['^'n]]``.

    A leading sign is accepted.  Terms beyond the truncation are dropped.
    """
    toks = _tokenize(text)
    i = 0
    coeffs: dict = {}

    def peek():
        return toks[i]

    def take(kind):
        nonlocal i
        tok = toks[i]
        if tok[0] != kind:
            want = "a number" if kind == "int" else repr(kind)
            raise SeriesSyntaxError(f"expected {want}", text, tok[2])
        i += 1
        return tok

    sign = 1
    if peek()[0] in ("+", "-"):
        sign = -1 if take(peek()[0])[0] == "-" else 1
    while True:
        start = peek()
        coeff = None
        if start[0] == "int":
            num = take("int")[1]
            den = 1
            if peek()[0] == "/":
                take("/")
                d_tok = take("int")
                den = d_tok[1]
                if den == 0:
                    raise SeriesSyntaxError("zero denominator", text, d_tok[2])
            coeff = Fraction(num, den)
        power = 0
        if peek()[0] == "*":
            take("*")
            if peek()[0] != "b":
                raise SeriesSyntaxError("expected 'b' after '*'", text, peek()[2])
        if peek()[0] == "b":
            take("b")
            power = 1
            if peek()[0] == "^":
                take("^")
                power = take("int")[1]
            if coeff is None:
                coeff = Fraction(1)
        if coeff is None:
            raise SeriesSyntaxError("expected a term", text, start[2])
        coeffs[power] = coeffs.get(power, Fraction(0)) + sign * coeff
        nxt = peek()
        if nxt[0] == "end":
            break
        if nxt[0] not in ("+", "-"):
            raise SeriesSyntaxError("expected '+' or '-'", text, nxt[2])
        sign = -1 if take(nxt[0])[0] == "-" else 1
    out = [Fraction(0)] * (truncation + 1)
    for p, c in coeffs.items():
        if p <= truncation:
            out[p] += c
    return TruncSeries._raw(tuple(out))


def _render_terms(pairs: Sequence) -> str:
    parts = []
    for n, c in pairs:
        mag = abs(c)
        if n == 0:
            body = render_rational(mag)
        else:
            mono = "b" if n == 1 else f"b^{n}"
            body = mono if mag == 1 else f"{render_rational(mag)}*{mono}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts) if parts else "0"


def render_series(S: TruncSeries) -> str:
    """Ascending terms such as ``1 - 5/3*b^2 + b^3``; ``"0"`` for zero."""
    return _render_terms([(n, c) for n, c in enumerate(S.coeffs) if c])
