"""Exact linear algebra over the rationals and over truncated series.

The scalar routines work on lists of lists of ``Fraction``.  The series
routines treat a matrix of :class:`TruncSeries` as a matrix over the
discrete valuation ring ``Q[[b]]`` and reduce it by pivoting on entries
of least ``b``-order, which is the usual Smith-form strategy over a DVR.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .exact_series import TruncSeries, invert_unit

Matrix = List[List[Fraction]]


class PrecisionInsufficient(ArithmeticError):
    """A computation ran out of known ``b``-coefficients."""


def rref(rows: Sequence[Sequence[Fraction]]):
    """Reduced row echelon form.  Returns ``(matrix, pivot_columns)``."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: Optional[int] = None) -> Matrix:
    """Basis of ``{v : A v = 0}`` as a list of vectors."""
    if ncols is None:
        if not rows:
            raise ValueError("ncols is required for an empty matrix")
        ncols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -m[i][f]
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """One solution of ``A x = rhs`` or ``None`` if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [y] for r, y in zip(rows, rhs)]
    m, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = m[i][ncols]
    return x


# series matrices


def _val(s: TruncSeries) -> Optional[int]:
    return s.valuation()


def _divide(num: TruncSeries, den_unit_inv: TruncSeries, v: int) -> TruncSeries:
    """``num / (b^v * u)`` given ``u^{-1}``; ``num`` must have valuation ``>= v``."""
    return num.unshift(v) * den_unit_inv


@dataclass
class SeriesReduction:
    """Outcome of :func:`reduce_series_matrix`.

    ``rank`` pivots were found with ``b``-valuations ``pivot_valuations``.
    ``column_transform`` (``C``) and its inverse satisfy ``A C = D`` where
    ``D`` vanishes outside its leading ``rank x rank`` diagonal block.
    The last ``ncols - rank`` columns of ``C`` form a basis of the kernel,
    and that basis spans a saturated submodule.
    """

    rank: int
    pivot_valuations: List[int]
    column_transform: List[List[TruncSeries]]
    column_transform_inv: List[List[TruncSeries]]

    def kernel(self) -> List[List[TruncSeries]]:
        n = len(self.column_transform)
        return [[self.column_transform[i][j] for i in range(n)] for j in range(self.rank, n)]

    def row_space_basis(self) -> List[List[TruncSeries]]:
        """Rows of ``C^{-1}`` spanning the saturation of the row space."""
        return [list(r) for r in self.column_transform_inv[: self.rank]]


def reduce_series_matrix(
    A: Sequence[Sequence[TruncSeries]], ncols: int, truncation: int, min_precision: int = 2
) -> SeriesReduction:
    """Valuation-pivot elimination of a matrix over ``Q[[b]]``.

    ``truncation`` is the precision of the transforms; entries are
    re-truncated to it.  Entries whose known coefficients all vanish are
    treated as zero.  :class:`PrecisionInsufficient` is raised when the
    remaining precision of an entry drops below ``min_precision``.
    """
    N = truncation
    M = [[x.truncate(min(N, x.truncation)) for x in row] for row in A]
    one, zero = TruncSeries.one(N), TruncSeries.zero(N)
    C = [[one if i == j else zero for j in range(ncols)] for i in range(ncols)]
    Ci = [[one if i == j else zero for j in range(ncols)] for i in range(ncols)]
    nrows = len(M)
    t = 0
    vals = []
    while t < min(nrows, ncols):
        best = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                v = _val(M[i][j])
                if v is not None and (best is None or v < best[0]):
                    best = (v, i, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        M[t], M[i] = M[i], M[t]
        for row in M:
            row[t], row[j] = row[j], row[t]
        for row in C:
            row[t], row[j] = row[j], row[t]
        Ci[t], Ci[j] = Ci[j], Ci[t]
        p = M[t][t]
        if p.truncation - v < min_precision:
            raise PrecisionInsufficient(
                f"pivot of valuation {v} leaves {p.truncation - v} known coefficients"
            )
        pinv = invert_unit(p.unshift(v))
        for r in range(t + 1, nrows):
            if M[r][t].is_zero():
                continue
            f = _divide(M[r][t], pinv, v)
            M[r] = [M[r][c] - f * M[t][c] if c > t else M[r][c] for c in range(ncols)]
            M[r][t] = TruncSeries.zero(M[r][t].truncation)
        for c in range(t + 1, ncols):
            if M[t][c].is_zero():
                continue
            g = _divide(M[t][c], pinv, v)
            for row in C:
                row[c] = row[c] - g * row[t]
            Ci[t] = [x + g * y for x, y in zip(Ci[t], Ci[c])]
            M[t][c] = TruncSeries.zero(M[t][c].truncation)
        vals.append(v)
        t += 1
    return SeriesReduction(t, vals, C, Ci)


def series_rank(A: Sequence[Sequence[TruncSeries]], ncols: int, truncation: int) -> int:
    return reduce_series_matrix(A, ncols, truncation).rank


def series_kernel(
    A: Sequence[Sequence[TruncSeries]], ncols: int, truncation: int
) -> List[List[TruncSeries]]:
    """Basis of the (saturated) kernel ``{Y : A Y = 0}``."""
    return reduce_series_matrix(A, ncols, truncation).kernel()


def saturate(vectors: Sequence[Sequence[TruncSeries]], ncols: int, truncation: int):
    """Basis of the saturation of the ``Q[[b]]``-span of ``vectors``.

    The returned rows are normalised so that there are pivot columns at
    which the basis restricts to the identity matrix.  Returns
    ``(basis, pivot_columns)``.
    """
    if not vectors:
        return [], []
    red = reduce_series_matrix(vectors, ncols, truncation)
    rows = red.row_space_basis()
    return unit_pivot_basis(rows, ncols)


def unit_pivot_basis(rows: Sequence[Sequence[TruncSeries]], ncols: int):
    """Normalise a saturated basis so that pivot columns carry the identity.

    Pivots are found on constant terms, which are independent exactly when
    the span is saturated.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    consts = [[x[0] for x in r] for r in rows]
    _, pivots = rref(consts)
    if len(pivots) != len(rows):
        raise ValueError("basis is not saturated: constant terms are dependent")
    # invert the pivot block (a unit matrix over Q[[b]]) by Gauss-Jordan
    r = len(rows)
    for t in range(r):
        c = pivots[t]
        piv = None
        for i in range(t, r):
            if rows[i][c].is_unit():
                piv = i
                break
        if piv is None:
            raise ValueError("pivot block is singular modulo b")
        rows[t], rows[piv] = rows[piv], rows[t]
        inv = invert_unit(rows[t][c])
        rows[t] = [x * inv for x in rows[t]]
        for i in range(r):
            if i != t and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[t])]
    return rows, pivots


def in_span(vector: Sequence[TruncSeries], basis, pivots) -> bool:
    """Membership of ``vector`` in the span of a unit-pivot ``basis``."""
    rest = list(vector)
    for row, p in zip(basis, pivots):
        f = rest[p]
        if not f.is_zero():
            rest = [x - f * y for x, y in zip(rest, row)]
    return all(x.is_zero() for x in rest)


def coordinates(vector: Sequence[TruncSeries], basis, pivots) -> List[TruncSeries]:
    """Coordinates of ``vector`` in a unit-pivot basis (membership assumed)."""
    return [vector[p] for p in pivots]
