"""Seeded random presentations and the property checks run on them."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, TypeVar

from .ab_algebra import (
    FrescoPresentation,
    bernstein_polynomial,
    bernstein_roots,
    fundamental_invariants,
    poly_mul,
    poly_shift,
    principal_form,
    swap_adjacent,
    swap_precondition,
    verify_swap,
)
from .exact_series import TruncSeries
from .linalg import PrecisionInsufficient
from . import xi_asymptotics as xa

T = TypeVar("T")

CLASSES = [Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4), Fraction(3, 4)]


def random_series_coeffs(rng: random.Random, degree: int = 4) -> List[Fraction]:
    """``1 + ...`` with small coefficients, zero about half the time."""
    pool = [0, 0, 0, 1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 3)]
    return [Fraction(1)] + [Fraction(rng.choice(pool)) for _ in range(degree)]


@dataclass(frozen=True)
class RandomSpec:
    """Polynomial data of a random presentation, re-buildable at any truncation."""

    lambdas: Tuple[Fraction, ...]
    series: Tuple[Tuple[Fraction, ...], ...]

    def build(self, N: int) -> FrescoPresentation:
        return FrescoPresentation(self.lambdas, tuple(TruncSeries(c, N) for c in self.series), N)


def random_spec(rng: random.Random, k: int, spread: int = 3, degree: int = 4) -> RandomSpec:
    """Geometric and primitive: ``l_j = c + k - 1 + n_j`` with ``0 <= n_j <= spread``."""
    c = rng.choice(CLASSES)
    lams = tuple(c + k - 1 + rng.randint(0, spread) for _ in range(k))
    sers = tuple(tuple(random_series_coeffs(rng, degree)) for _ in range(k - 1))
    return RandomSpec(lams, sers)


def escalate(spec: RandomSpec, fn: Callable[[FrescoPresentation], T], N: int, steps: int = 3) -> Tuple[T, int]:
    """``fn(spec.build(n))`` for the first ``n`` in ``N, 2N, 4N, ...`` with enough precision."""
    n = N
    for attempt in range(steps):
        try:
            return fn(spec.build(n)), n
        except PrecisionInsufficient:
            if attempt == steps - 1:
                raise
            n *= 2
    raise AssertionError("unreachable")


def random_presentation(rng: random.Random, k: int, N: int = 32) -> FrescoPresentation:
    return random_spec(rng, k).build(N)


def random_rho(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-3, 3), rng.randint(1, 3))


def scramble(rng: random.Random, P: FrescoPresentation, steps: int = 6) -> FrescoPresentation:
    """Apply random admissible swaps with random ``rho``."""
    cur = P
    for _ in range(steps):
        js = []
        for j in range(1, cur.rank):
            try:
                if swap_precondition(cur, j) is None:
                    js.append(j)
            except PrecisionInsufficient:
                pass
        if not js:
            break
        cur, _ = swap_adjacent(cur, rng.choice(js), random_rho(rng))
    return cur


# individual properties; each returns (ok, message)


@dataclass
class SwapCheck:
    swaps: int = 0
    identity_ok: bool = True
    invariants_ok: bool = True
    message: str = ""


def check_swaps(rng: random.Random, P: FrescoPresentation, mutate: bool = False) -> SwapCheck:
    """Every admissible swap is an identity in the algebra and keeps the invariants."""
    out = SwapCheck()
    for j in range(1, P.rank):
        try:
            if swap_precondition(P, j) is not None:
                continue
        except PrecisionInsufficient:
            continue
        P2, cert = swap_adjacent(P, j, random_rho(rng))
        if mutate:
            ser = list(P2.series)
            s = ser[j - 1]
            ser[j - 1] = s + TruncSeries.monomial(1, 2, s.truncation)
            P2 = FrescoPresentation(P2.lambdas, tuple(ser), P2.truncation)
        out.swaps += 1
        if out.identity_ok and not verify_swap(P, P2, cert):
            out.identity_ok = False
            out.message = f"swap at {j} is not an identity for {P.render()}"
        same = (
            fundamental_invariants(P) == fundamental_invariants(P2)
            and sorted(bernstein_roots(P)) == sorted(bernstein_roots(P2))
            and sum(P.lambdas) == sum(P2.lambdas)
        )
        if out.invariants_ok and not same:
            out.invariants_ok = False
            out.message = f"invariants change under the swap at {j} of {P.render()}"
    return out


def check_principal_uniqueness(rng: random.Random, P: FrescoPresentation) -> Tuple[bool, str]:
    direct = principal_form(P)[0].lambdas
    scrambled = principal_form(scramble(rng, P))[0].lambdas
    if direct != scrambled:
        return False, f"{direct} vs {scrambled}"
    return True, ""


def check_hom_dimension(spec: RandomSpec, N: int) -> Tuple[bool, str]:
    """``k`` independent solutions at ``N`` that agree with the ones at ``2N``."""
    P = spec.build(N)
    hb = xa.solve_annihilator(P)
    hb2 = xa.solve_annihilator(spec.build(2 * N))
    if hb.dimension != P.rank or not xa.solutions_independent(hb):
        return False, f"dimension {hb.dimension} for rank {P.rank}"
    if hb2.dimension != P.rank or not xa.solutions_independent(hb2):
        return False, "dimension unstable at 2N"
    n = hb.truncation
    for x, y in zip(hb.solutions, hb2.solutions):
        if not x.eq_within(y.truncate(n)):
            return False, "solutions change between N and 2N"
    return True, ""


def filtration_identities(P: FrescoPresentation, hb=None) -> Dict[str, bool]:
    """The rank identities relating ``S_j``, ``Sigma^j`` and the depth."""
    hb = xa.solve_annihilator(P) if hb is None else hb
    k = P.rank
    d = xa.depth(P, hb)
    ss = [s.rank for s in xa.ss_filtration(P, hb)]
    co = xa.co_ss_filtration(P, hb)
    sig = [c.rank for c in co]
    return {
        "rk S1 + d = k + 1": ss[0] + d == k + 1,
        "rk Sigma^1 = d - 1": sig[1] == d - 1,
        "S_j/S_(j-1) rank 1": all(ss[j] - ss[j - 1] == 1 for j in range(1, len(ss))),
        "Sigma^j strictly decreasing to 0": sig[-1] == 0 and all(sig[i] > sig[i + 1] for i in range(len(sig) - 1)),
        "d(Sigma^j) = d - j": all(c.depth == d - j for j, c in enumerate(co)),
    }


def check_filtration_identities(spec: RandomSpec, N: int) -> Tuple[bool, str]:
    res, n = escalate(spec, filtration_identities, N)
    P = spec.build(n)
    bad = [name for name, ok in res.items() if not ok]
    if bad:
        return False, f"{', '.join(bad)} for {P.render()}"
    return True, ""


def check_bernstein_product(P: FrescoPresentation, m: int) -> Tuple[bool, str]:
    """``B_E(x) = B_F(x - rk G) B_G(x)`` for ``F`` spanned by ``e_1..e_m``."""
    F, G = P.prefix(m), P.quotient(m)
    lhs = bernstein_polynomial(P)
    rhs = poly_mul(poly_shift(bernstein_polynomial(F), G.rank), bernstein_polynomial(G))
    if list(lhs) != list(rhs):
        return False, f"split at {m} of {P.render()}"
    return True, ""


def check_depth_subadditivity(P: FrescoPresentation, m: int) -> Tuple[bool, str]:
    F, G = P.prefix(m), P.quotient(m)
    hb = xa.solve_annihilator(P)
    d, dF, dG = xa.depth(P, hb), xa.depth(F), xa.depth(G)
    if not (max(dF, dG) <= d <= dF + dG):
        return False, f"d={d}, d(F)={dF}, d(G)={dG} for {P.render()}"
    return True, ""


def check_trace(P: FrescoPresentation, m: int) -> Tuple[bool, str]:
    """``rk(S_j(E) cap F) = rk S_j(F)`` for ``F`` spanned by ``e_1..e_m``."""
    F = P.prefix(m)
    hb = xa.solve_annihilator(P)
    hbF = xa.solve_annihilator(F)
    d = xa.depth(P, hb)
    for j in range(1, d + 1):
        if xa.trace_rank(P, j, m, hb) != xa.trace_rank(F, j, m, hbF):
            return False, f"j={j}, split {m} of {P.render()}"
    return True, ""


# driver


@dataclass
class PropertyTally:
    passed: int = 0
    failed: int = 0
    failures: List[str] = field(default_factory=list)

    def record(self, ok: bool, message: str, keep: int = 3):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < keep:
                self.failures.append(message)


@dataclass
class RandomCheckReport:
    seed: int
    count: int
    rank_max: int
    mutate: bool
    properties: Dict[str, PropertyTally]

    @property
    def ok(self) -> bool:
        return all(t.failed == 0 for t in self.properties.values())


PROPERTY_NAMES = (
    "swap oracle",
    "invariant preservation",
    "principal uniqueness",
    "hom dimension",
    "filtration identities",
    "Bernstein product",
    "depth subadditivity",
)


def run_random_check(
    seed: int, count: int, rank_max: int = 4, truncation: int = 32, mutate: bool = False
) -> RandomCheckReport:
    """Deterministic given the arguments.

    With ``mutate`` one coefficient of every swapped presentation is changed
    before verification, so the swap oracle must report failures.
    """
    rng = random.Random(seed)
    tallies = {name: PropertyTally() for name in PROPERTY_NAMES}
    for _ in range(count):
        k = rng.randint(2, max(2, rank_max))
        spec = random_spec(rng, k)
        P = spec.build(truncation)
        sc = check_swaps(rng, P, mutate)
        if sc.swaps:
            tallies["swap oracle"].record(sc.identity_ok, sc.message)
            tallies["invariant preservation"].record(sc.invariants_ok, sc.message)
        tallies["principal uniqueness"].record(*check_principal_uniqueness(rng, P))
        tallies["hom dimension"].record(*check_hom_dimension(spec, truncation))
        tallies["filtration identities"].record(*check_filtration_identities(spec, truncation))
        m = rng.randint(1, k - 1)
        tallies["Bernstein product"].record(*check_bernstein_product(P, m))
        ok1, m1 = check_depth_subadditivity(P, m)
        ok2, m2 = check_trace(P, m)
        tallies["depth subadditivity"].record(ok1 and ok2, m1 or m2)
    return RandomCheckReport(seed, count, rank_max, mutate, tallies)
