"""Command-line front end.

Every command prints a report with stable field order: the command, a
digest of the input, the precision window, the result and the
verification flags.  The exit code is 0 exactly when no flag failed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

from . import xi_asymptotics as xa
from .ab_algebra import (
    FrescoPresentation,
    NonCommutingIndex,
    bernstein_roots,
    fundamental_invariants,
    nci_list,
    principal_form,
    swap_adjacent,
    verify_swap,
)
from .exact_series import parse_rational, render_rational, render_series
from .fileformat import (
    DEFAULT_TRUNCATION,
    PresentationSyntaxError,
    ValidationError,
    parse_presentation_file,
    render_presentation,
)
from .fresco_basis import is_theme, kernel, rank1_normal_submodules
from .linalg import PrecisionInsufficient


def _q(x) -> str:
    return render_rational(x)


def _ql(xs) -> List[str]:
    return [_q(x) for x in xs]


class Report:
    def __init__(self, command: str, digest: str = "", window: Optional[Dict[str, Any]] = None):
        self.fields: Dict[str, Any] = {"command": command}
        if digest:
            self.fields["input_digest"] = digest
        if window is not None:
            self.fields["precision"] = window
        self.fields["result"] = {}
        self.fields["verification"] = {}

    @property
    def result(self) -> Dict[str, Any]:
        return self.fields["result"]

    @property
    def verification(self) -> Dict[str, bool]:
        return self.fields["verification"]

    @property
    def ok(self) -> bool:
        return all(self.verification.values())

    def to_json(self) -> str:
        return json.dumps(self.fields, indent=2)

    def to_text(self) -> str:
        lines: List[str] = []

        def emit(key, value, indent, flags=False):
            pad = "  " * indent
            if isinstance(value, dict):
                lines.append(f"{pad}{key}:")
                for k, v in value.items():
                    emit(k, v, indent + 1, flags)
            elif isinstance(value, list) and value and isinstance(value[0], dict):
                lines.append(f"{pad}{key}:")
                for i, v in enumerate(value, start=1):
                    emit(f"- {i}", v, indent + 1)
            elif isinstance(value, list):
                lines.append(f"{pad}{key}: [{', '.join(str(v) for v in value)}]")
            elif isinstance(value, bool) and flags:
                lines.append(f"{pad}{key}: {'pass' if value else 'FAIL'}")
            elif isinstance(value, bool):
                lines.append(f"{pad}{key}: {'yes' if value else 'no'}")
            else:
                lines.append(f"{pad}{key}: {value}")

        for k, v in self.fields.items():
            emit(k, v, 0, k == "verification")
        return "\n".join(lines)


# loading


class Loaded:
    def __init__(self, text: str, args):
        self.text = text
        self.digest = hashlib.sha256(text.encode()).hexdigest()[:16]
        self.N = args.truncation
        pf = parse_presentation_file(text, self.N)
        self.pres = pf.presentation
        self.log_cap = args.log_cap if args.log_cap is not None else pf.log_cap
        self.recheck = not args.no_recheck

    def at_double(self) -> FrescoPresentation:
        return parse_presentation_file(self.text, 2 * self.pres.truncation).presentation

    def window(self) -> Dict[str, Any]:
        return {"truncation": self.pres.truncation, "log_cap": self.log_cap}

    def homs(self, P: Optional[FrescoPresentation] = None) -> xa.HomBasis:
        return xa.solve_annihilator(self.pres if P is None else P, log_cap=self.log_cap)


def _with_recheck(rep: Report, L: Loaded, summary: Callable[[FrescoPresentation, xa.HomBasis], Any], key: str):
    """Store ``summary`` at N and record whether it is unchanged at 2N."""
    val = summary(L.pres, L.homs())
    if L.recheck:
        P2 = L.at_double()
        rep.verification[f"{key} stable at 2N"] = summary(P2, L.homs(P2)) == val
    return val


def _presentation_fields(P: FrescoPresentation) -> Dict[str, Any]:
    return {
        "lambda": _ql(P.lambdas),
        "series": [render_series(s) for s in P.series],
    }


# commands


def _depth_summary(P, hb):
    return xa.depth(P, hb)


def _analysis_summary(P, hb):
    d = xa.depth(P, hb)
    ss = [s.rank for s in xa.ss_filtration(P, hb)]
    co = [(c.rank, c.depth) for c in xa.co_ss_filtration(P, hb)]
    rq = xa.rank1_quotient_classes(P, hb)
    strata = [(st.rank, len(st.witnesses)) for st in xa.quotient_theme_survey(P, hb)]
    return d, tuple(ss), tuple(co), tuple(rq), tuple(strata)


def cmd_analyze(L: Loaded, args) -> Report:
    rep = Report("analyze", L.digest, L.window())
    P = L.pres
    hb = L.homs()
    Q, _ = principal_form(P)
    d, ss, co, rq, strata = _with_recheck(rep, L, _analysis_summary, "analysis")
    r = rep.result
    r["rank"] = P.rank
    r["presentation"] = P.render()
    r["principal"] = _presentation_fields(Q)
    r["fundamental_invariants"] = _ql(fundamental_invariants(P))
    r["bernstein_roots"] = _ql(sorted(bernstein_roots(P)))
    r["nci_principal"] = nci_list(Q)
    r["depth"] = d
    r["theme"] = is_theme(P)
    r["semi_simple"] = d == 1
    r["ss_filtration_ranks"] = list(ss)
    r["co_ss_filtration"] = [{"rank": a, "depth": b} for a, b in co]
    r["rank1_quotient_classes"] = _ql(rq)
    r["quotient_theme_strata"] = [{"rank": a, "witnesses": b} for a, b in strata]
    rep.verification["all solutions annihilated"] = all(xa.xi_apply(P, x).is_zero() for x in hb.solutions)
    rep.verification["k independent solutions"] = hb.dimension == P.rank and xa.solutions_independent(hb)
    rep.verification["rk S1 + d = k + 1"] = ss[0] + d == P.rank + 1
    rep.verification["rk Sigma^1 = d - 1"] = co[1][0] == d - 1
    rep.verification["k - d + 1 rank-1 quotients"] = len(rq) == P.rank - d + 1
    if d > 1:
        try:
            L1 = xa.L_series(P, hb)
            r["sigma1_lambda"] = _ql(L1.lambdas)
            rep.verification["Sigma^1 is a theme"] = L1.sigma1_is_theme
        except (xa.RankMismatch, ArithmeticError, ValueError) as exc:
            r["sigma1_lambda"] = f"unavailable ({type(exc).__name__})"
    return rep


def cmd_swap(L: Loaded, args) -> Report:
    rep = Report("swap", L.digest, L.window())
    P = L.pres
    rho = parse_rational(args.rho) if args.rho is not None else None
    P2, cert = swap_adjacent(P, args.index, rho)
    r = rep.result
    r["index"] = args.index
    r["delta"] = _q(cert.delta)
    r["rho"] = _q(cert.rho_used)
    r["U"] = render_series(cert.U)
    r["result"] = _presentation_fields(P2)
    if cert.left_unit is not None:
        r["left_unit"] = render_series(cert.left_unit)
    if cert.right_unit is not None:
        r["right_unit"] = render_series(cert.right_unit)
    rep.verification["identity in the algebra"] = verify_swap(P, P2, cert)
    rep.verification["fundamental invariants preserved"] = fundamental_invariants(P) == fundamental_invariants(P2)
    if L.recheck:
        Pd = L.at_double()
        Pd2, _ = swap_adjacent(Pd, args.index, rho)
        same = Pd2.lambdas == P2.lambdas and all(
            a.eq_within(b.truncate(a.truncation)) for a, b in zip(P2.series, Pd2.series)
        )
        rep.verification["result stable at 2N"] = same
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(render_presentation(P2))
        r["written"] = args.output
    return rep


def cmd_principal(L: Loaded, args) -> Report:
    rep = Report("principal", L.digest, L.window())
    Q, certs = principal_form(L.pres)
    rep.result["principal"] = _presentation_fields(Q)
    rep.result["swaps"] = len(certs)
    rep.result["nci_principal"] = nci_list(Q)
    keys = Q.keys()
    rep.verification["keys nondecreasing"] = all(keys[i] <= keys[i + 1] for i in range(len(keys) - 1))
    rep.verification["fundamental invariants preserved"] = fundamental_invariants(L.pres) == fundamental_invariants(Q)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(render_presentation(Q))
        rep.result["written"] = args.output
    return rep


def cmd_depth(L: Loaded, args) -> Report:
    rep = Report("depth", L.digest, L.window())
    d = _with_recheck(rep, L, _depth_summary, "depth")
    rep.result["depth"] = d
    rep.result["semi_simple"] = d == 1
    if d == 1:
        cert = xa.semisimple_certificate(L.pres)
        rep.result["semi_simple_certificate"] = _ql(cert.lambdas) if cert is not None else "not found"
    return rep


def _filtration_summary(P, hb):
    ss = tuple(s.rank for s in xa.ss_filtration(P, hb))
    co = tuple((c.rank, c.depth) for c in xa.co_ss_filtration(P, hb))
    return ss, co


def cmd_filtration(L: Loaded, args) -> Report:
    rep = Report("filtration", L.digest, L.window())
    P = L.pres
    hb = L.homs()
    ss, co = _with_recheck(rep, L, _filtration_summary, "filtration")
    rep.result["ss_filtration"] = [
        {"j": j, "rank": s.rank, "basis": [v.render() for v in s.basis]}
        for j, s in enumerate(xa.ss_filtration(P, hb), start=1)
    ]
    rep.result["co_ss_filtration"] = [{"j": j, "rank": a, "depth": b} for j, (a, b) in enumerate(co)]
    report = xa.filtration_report(P, hb)
    rep.verification.update(report.checks)
    return rep


def _quotients_summary(P, hb):
    return tuple(xa.rank1_quotient_classes(P, hb))


def cmd_quotients(L: Loaded, args) -> Report:
    rep = Report("quotients", L.digest, L.window())
    P = L.pres
    hb = L.homs()
    rq = _with_recheck(rep, L, _quotients_summary, "rank-1 classes")
    d = xa.depth(P, hb)
    rep.result["rank1_quotient_classes"] = _ql(rq)
    strata = []
    for st in xa.quotient_theme_survey(P, hb):
        strata.append(
            {
                "rank": st.rank,
                "themes": [{"lambda": _ql(t.lambdas), "series": [render_series(s) for s in t.series]} for t in st.themes],
            }
        )
    rep.result["quotient_themes"] = strata
    rep.verification["k - d + 1 rank-1 quotients"] = len(rq) == P.rank - d + 1
    rep.verification["witnesses annihilated"] = all(xa.xi_apply(P, x).is_zero() for x in hb.solutions)
    return rep


def cmd_kernel(L: Loaded, args) -> Report:
    rep = Report("kernel", L.digest, L.window())
    P = L.pres
    if args.mu is not None:
        mu = parse_rational(args.mu)
        K = kernel(P, mu)
        rep.result["mu"] = _q(mu)
        rep.result["dimension"] = len(K)
        rep.result["basis"] = [v.render() for v in K]
    fams = rank1_normal_submodules(P)
    rep.result["normal_rank1"] = [
        {"mu": _q(f.mu), "kernel_dim": f.kernel_dim, "primitive_rank": f.primitive_rank} for f in fams
    ]
    rep.result["theme"] = is_theme(P)
    return rep


def cmd_embed(L: Loaded, args) -> Report:
    rep = Report("embed", L.digest, L.window())
    P = L.pres
    hb = L.homs()
    keys = P.keys()
    if all(keys[i] > keys[i + 1] for i in range(len(keys) - 1)) and P.lambdas[0] > P.rank - 1 and P.rank > 1:
        emb = xa.embed_semisimple(P)
        rep.result["components"] = [x.render() for x in emb.images]
        rep.result["T"] = [render_series(t) for t in emb.T_values]
        rep.verification["T equations"] = all(emb.checks)
        rep.verification["joint kernel zero"] = emb.injective
    ed = xa.embedding_dimension(P, hb)
    d = xa.depth(P, hb)
    rep.result["embedding_dimension"] = ed.dimension
    rep.result["k - d + 1"] = P.rank - d + 1
    rep.verification["witness injective"] = ed.injective
    rep.verification["lower bound certified"] = ed.lower_bound_certified
    rep.verification["embedding dimension = k - d + 1"] = ed.dimension == P.rank - d + 1
    return rep


def cmd_verify(L: Loaded, args) -> Report:
    rep = Report("verify", L.digest, L.window())
    P = L.pres
    hb = L.homs()
    rep.result["homomorphisms"] = hb.dimension
    rep.verification["k independent solutions"] = hb.dimension == P.rank and xa.solutions_independent(hb)
    rep.verification["all solutions annihilated"] = all(xa.xi_apply(P, x).is_zero() for x in hb.solutions)
    for j in range(1, P.rank):
        try:
            P2, cert = swap_adjacent(P, j, parse_rational(args.rho) if args.rho else None)
        except (NonCommutingIndex, PrecisionInsufficient):
            continue
        rep.verification[f"swap {j} identity"] = verify_swap(P, P2, cert)
    if L.recheck:
        P2 = L.at_double()
        hb2 = L.homs(P2)
        n = hb.truncation
        rep.verification["solutions stable at 2N"] = all(
            x.eq_within(y.truncate(n)) for x, y in zip(hb.solutions, hb2.solutions)
        )
    return rep


def cmd_worked_examples(args) -> Report:
    from .worked_examples import ERRATUM, run_all

    rep = Report("paper-examples")
    claims = run_all()
    rep.result["claims"] = [{"name": c.name, "status": c.status, "detail": c.detail} for c in claims]
    rep.result["summary"] = {
        s: sum(1 for c in claims if c.status == s) for s in ("PASS", "FAIL", ERRATUM)
    }
    for c in claims:
        rep.verification[c.name] = c.ok
    return rep


def cmd_random_check(args) -> Report:
    from .random_check import run_random_check

    N = args.truncation or 32
    res = run_random_check(args.seed, args.count, args.rank_max, N, args.mutate)
    rep = Report("random-check", window={"truncation": N})
    rep.result["seed"] = args.seed
    rep.result["count"] = args.count
    rep.result["rank_max"] = args.rank_max
    rep.result["mutate"] = args.mutate
    rep.result["properties"] = {
        name: {"passed": t.passed, "failed": t.failed, "examples": t.failures} for name, t in res.properties.items()
    }
    for name, t in res.properties.items():
        rep.verification[name] = t.failed == 0
    return rep


FILE_COMMANDS = {
    "analyze": cmd_analyze,
    "swap": cmd_swap,
    "principal": cmd_principal,
    "depth": cmd_depth,
    "filtration": cmd_filtration,
    "quotients": cmd_quotients,
    "kernel": cmd_kernel,
    "embed": cmd_embed,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    env_n = os.environ.get("FRESCO_TRUNCATION")
    common.add_argument(
        "--truncation", type=int, default=int(env_n) if env_n else None,
        help=f"precision window N (default: file value, else {DEFAULT_TRUNCATION})",
    )
    common.add_argument("--log-cap", type=int, default=None, help="largest log power (default rank-1)")
    common.add_argument("--rho", default=None, help="free constant for swaps")
    common.add_argument("--no-recheck", action="store_true", help="skip the recomputation at 2N")
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")

    p = argparse.ArgumentParser(prog="fresco", description="Exact computations with frescos.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in FILE_COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("file", help="presentation file, or - for stdin")
        if name == "swap":
            sp.add_argument("--index", type=int, required=True)
            sp.add_argument("-o", "--output")
        if name == "principal":
            sp.add_argument("-o", "--output")
        if name == "kernel":
            sp.add_argument("--mu", default=None)
    sub.add_parser("paper-examples", parents=[common])
    rc = sub.add_parser("random-check", parents=[common])
    rc.add_argument("--seed", type=int, default=1)
    rc.add_argument("--count", type=int, default=100)
    rc.add_argument("--rank-max", type=int, default=4)
    rc.add_argument("--mutate", action="store_true", help="perturb swapped presentations (harness sanity)")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in FILE_COMMANDS:
            text = sys.stdin.read() if args.file == "-" else open(args.file).read()
            rep = FILE_COMMANDS[args.command](Loaded(text, args), args)
        elif args.command == "paper-examples":
            rep = cmd_worked_examples(args)
        else:
            rep = cmd_random_check(args)
    except (PresentationSyntaxError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print(rep.to_json() if args.json else rep.to_text())
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
