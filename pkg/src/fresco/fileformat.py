"""Line-oriented ``key=value`` presentation files.

    # a rank-2 theme
    rank=2
    lambda=["5/2", "5/2"]
    series=["1 + b"]
    truncation=64

``truncation`` defaults to 64 and must be at least ``4 * rank``;
``log_cap`` defaults to ``rank - 1``.  Series are polynomials in ``b``
(a trailing ``O(b^n)`` is not part of the grammar).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .ab_algebra import FrescoPresentation, validate
from .exact_series import (
    SeriesSyntaxError,
    TruncSeries,
    parse_rational,
    parse_series,
    render_rational,
    render_series,
)

DEFAULT_TRUNCATION = 64
KEYS = ("rank", "lambda", "series", "truncation", "log_cap")


class PresentationSyntaxError(SyntaxError):
    """Malformed presentation file; ``lineno`` and ``offset`` are 1-based."""

    def __init__(self, message: str, lineno: int, offset: int, line: str = ""):
        super().__init__(f"line {lineno}, column {offset}: {message}")
        self.lineno = lineno
        self.offset = offset
        self.text = line

    def __str__(self) -> str:
        return self.msg


class ValidationError(ValueError):
    """The file parses but violates an invariant of a presentation."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


@dataclass(frozen=True)
class PresentationFile:
    presentation: FrescoPresentation
    log_cap: int
    source: str


def _parse_list(value: str, lineno: int, offset: int, line: str):
    try:
        items = json.loads(value)
    except json.JSONDecodeError as exc:
        raise PresentationSyntaxError(f"bad list: {exc.msg}", lineno, offset + exc.colno - 1, line) from None
    if not isinstance(items, list) or not all(isinstance(s, (str, int)) for s in items):
        raise PresentationSyntaxError("expected a list of strings", lineno, offset, line)
    return [str(s) for s in items]


def _parse_int(value: str, lineno: int, offset: int, line: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise PresentationSyntaxError(f"expected an integer, got {value!r}", lineno, offset, line) from None


def _locate(exc: SeriesSyntaxError, item: str, where) -> PresentationSyntaxError:
    """Translate a column inside one list item to a column of the file line."""
    lineno, col, line = where
    start = line.find(json.dumps(item))
    if start >= 0:
        col = start + 1 + exc.column
    return PresentationSyntaxError(exc.reason, lineno, col, line)


def parse_presentation_file(text: str, truncation: Optional[int] = None) -> PresentationFile:
    """Parse and validate.  ``truncation`` overrides the value in the file."""
    fields = {}
    where = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in line:
            raise PresentationSyntaxError("expected key=value", lineno, len(line) - len(line.lstrip()) + 1, line)
        key, value = line.split("=", 1)
        key_col = len(key) - len(key.lstrip()) + 1
        key = key.strip()
        val_col = len(line) - len(line.split("=", 1)[1].lstrip()) + 1
        if key not in KEYS:
            raise PresentationSyntaxError(f"unknown key {key!r}", lineno, key_col, line)
        if key in fields:
            raise PresentationSyntaxError(f"duplicate key {key!r}", lineno, key_col, line)
        value = value.strip()
        if key in ("lambda", "series"):
            fields[key] = _parse_list(value, lineno, val_col, line)
        else:
            fields[key] = _parse_int(value, lineno, val_col, line)
        where[key] = (lineno, val_col, line)
    for key in ("rank", "lambda"):
        if key not in fields:
            raise PresentationSyntaxError(f"missing key {key!r}", len(text.splitlines()) + 1, 1)
    k = fields["rank"]
    if k < 1:
        raise ValidationError("rank", "rank must be positive")
    N = truncation if truncation is not None else fields.get("truncation", DEFAULT_TRUNCATION)
    if N < 4 * k:
        raise ValidationError("truncation", f"truncation {N} is below 4*rank = {4 * k}")
    lam_txt = fields["lambda"]
    ser_txt = fields.get("series", [])
    if len(lam_txt) != k:
        raise ValidationError("lambda", f"{len(lam_txt)} values for rank {k}")
    if len(ser_txt) != k - 1:
        raise ValidationError("series", f"{len(ser_txt)} series for rank {k}, expected {k - 1}")
    lams = []
    for s in lam_txt:
        try:
            lams.append(parse_rational(s))
        except SeriesSyntaxError as exc:
            raise _locate(exc, s, where["lambda"]) from None
    sers = []
    for j, s in enumerate(ser_txt, start=1):
        try:
            S = parse_series(s, N)
        except SeriesSyntaxError as exc:
            raise _locate(exc, s, where["series"]) from None
        if S[0] != 1:
            raise ValidationError("unit", f"S_{j}(0) = {render_rational(S[0])}, expected 1")
        sers.append(S)
    P = FrescoPresentation(tuple(lams), tuple(sers), N)
    rep = validate(P)
    if not rep.primitive:
        raise ValidationError("primitive", "lambda values are not congruent modulo 1")
    if not rep.geometric:
        raise ValidationError("geometric", "lambda_j + j must exceed the rank for every j")
    log_cap = fields.get("log_cap", k - 1)
    if log_cap < k - 1:
        raise ValidationError("log_cap", f"log_cap {log_cap} is below rank - 1")
    return PresentationFile(P, log_cap, text)


def parse_presentation(text: str, truncation: Optional[int] = None) -> FrescoPresentation:
    return parse_presentation_file(text, truncation).presentation


def render_presentation(P: FrescoPresentation, log_cap: Optional[int] = None) -> str:
    lines = [
        f"rank={P.rank}",
        "lambda=" + json.dumps([render_rational(l) for l in P.lambdas]),
        "series=" + json.dumps([render_series(s) for s in P.series]),
        f"truncation={P.truncation}",
    ]
    if log_cap is not None:
        lines.append(f"log_cap={log_cap}")
    return "\n".join(lines) + "\n"
