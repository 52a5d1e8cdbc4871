"""Command-line front end.

Exit codes: 0 when the verdict is zero or as expected, 1 for a nonzero or
inconclusive verdict, 2 for usage, parse and setup errors.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from importlib import resources
from pathlib import Path

from ..diffops import adjoint, apply, compose, frechet, green_current, pairing
from ..jetalgebra import Signature, divergence
from ..poisson import (
    HAMILTONIAN,
    NotSkewAdjointError,
    PoissonSetup,
    bracket_rep,
    classify,
    default_basis,
    is_skew_adjoint,
    jacobi_direct,
    jacobi_mt,
)
from ..variational import euler, is_divergence
from .report import Report
from .setup import DEFAULT_OPTIONS, Setup, SetupError, load_setup
from .syntax import ParseError, format_function, format_operator, parse_expression, parse_operator, parse_vector
from .validate import validate_setup

EXIT_OK, EXIT_NONZERO, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def corpus_dir():
    return resources.files("jetpoisson.workbench") / "corpus"


def _resolve_setup(name: str) -> Setup:
    """A path on disk, or else the name of a shipped corpus file."""
    if not Path(name).exists():
        shipped = corpus_dir() / name
        if shipped.is_file():
            with resources.as_file(shipped) as path:
                return load_setup(path)
    return load_setup(name)


class Context:
    """Resolved signature, setup and options for one invocation."""

    def __init__(self, ns: argparse.Namespace):
        self.ns = ns
        self.setup: Setup | None = _resolve_setup(ns.setup) if ns.setup else None
        if self.setup is not None:
            self.sig = self.setup.sig
            if ns.independent or ns.dependent:
                raise UsageError("--independent/--dependent cannot be combined with --setup")
        else:
            indep = tuple(ns.independent.split(",")) if ns.independent else ("x",)
            dep = tuple(ns.dependent.split(",")) if ns.dependent else ("u",)
            self.sig = Signature(indep, dep)
        opts = dict(self.setup.options if self.setup else DEFAULT_OPTIONS)
        for key in DEFAULT_OPTIONS:
            val = getattr(ns, key, None)
            if val is not None:
                opts[key] = val
        self.options = opts

    def fmt(self, F) -> str:
        return format_function(F, self.sig)

    def fmt_op(self, P) -> str:
        return format_operator(P, self.sig)

    def op(self, text: str):
        if self.setup is not None and text in self.setup.operators:
            return self.setup.operators[text]
        return parse_operator(text, self.sig)

    def ops(self, count: int | None = None, at_least: int = 1):
        texts = self.ns.op or []
        if count is not None and len(texts) != count:
            raise UsageError(f"expected {count} --op argument(s), got {len(texts)}")
        if len(texts) < at_least:
            raise UsageError(f"expected at least {at_least} --op argument(s)")
        return [self.op(t) for t in texts]

    def exprs(self, count: int, vector: bool = False):
        texts = self.ns.expr or []
        if len(texts) != count:
            raise UsageError(f"expected {count} --expr argument(s), got {len(texts)}")
        if vector:
            return [parse_vector(t, self.sig) for t in texts]
        return [parse_expression(t, self.sig) for t in texts]

    def poisson(self) -> PoissonSetup:
        (op,) = self.ops(1)
        return PoissonSetup(self.sig, op)


def _verdict(F) -> str:
    return "zero" if is_divergence(F) else "nonzero"


def cmd_euler(ctx: Context, rep: Report):
    (L,) = ctx.exprs(1)
    delta = euler(L, ctx.sig)
    rep.result = {"expression": ctx.fmt(L),
                  "euler": {name: ctx.fmt(d) for name, d in zip(ctx.sig.dependent, delta)}}
    rep.add_check("euler", "zero" if not any(delta) else "nonzero")
    return EXIT_OK


def cmd_adjoint(ctx: Context, rep: Report):
    (P,) = ctx.ops(1)
    rep.result = {"operator": ctx.fmt_op(P), "adjoint": ctx.fmt_op(adjoint(P))}
    rep.add_check("skew_adjoint", "true" if is_skew_adjoint(P) else "false")
    return EXIT_OK


def cmd_compose(ctx: Context, rep: Report):
    ops = ctx.ops(at_least=2)
    out = ops[0]
    for P in ops[1:]:
        if out.cols != P.rows:
            raise UsageError(f"cannot compose {out.rows}x{out.cols} with {P.rows}x{P.cols}")
        out = compose(out, P)
    rep.result = {"operators": [ctx.fmt_op(P) for P in ops], "composition": ctx.fmt_op(out)}
    return EXIT_OK


def cmd_frechet(ctx: Context, rep: Report):
    (L,) = ctx.exprs(1)
    rep.result = {"expression": ctx.fmt(L), "frechet": ctx.fmt_op(frechet(L, ctx.sig))}
    return EXIT_OK


def cmd_green(ctx: Context, rep: Report):
    (P,) = ctx.ops(1)
    f, g = ctx.exprs(2, vector=True)
    if len(f) != P.rows or len(g) != P.cols:
        raise UsageError(f"operator is {P.rows}x{P.cols}; got vectors of length {len(f)} and {len(g)}")
    psi = green_current(P, f, g)
    residual = pairing(f, apply(P, g)) - pairing(apply(adjoint(P), f), g) - divergence(psi)
    rep.result = {"operator": ctx.fmt_op(P), "adjoint": ctx.fmt_op(adjoint(P)),
                  "current": [ctx.fmt(c) for c in psi]}
    rep.add_check("green_identity", "zero" if not residual else "nonzero", ctx.fmt(residual))
    return EXIT_OK if not residual else EXIT_NONZERO


def cmd_bracket(ctx: Context, rep: Report):
    ps = ctx.poisson()
    K, L = ctx.exprs(2)
    R = bracket_rep(ps, K, L)
    rep.result = {"operator": ctx.fmt_op(ps.op), "K": ctx.fmt(K), "L": ctx.fmt(L), "representative": ctx.fmt(R)}
    verdict = _verdict(R)
    rep.add_check("bracket", verdict, ctx.fmt(R))
    return EXIT_OK if verdict == "zero" else EXIT_NONZERO


def _hamiltonian(ctx: Context, rep: Report, ps: PoissonSetup):
    basis = default_basis(ctx.sig, ctx.options["max_degree"], ctx.options["max_order"])
    with rep.timed("universal"):
        res = classify(ps, basis)
        rep.add_check("universal", res.universal.verdict, format_function(res.universal.residual, res.extended))
    rep.add_check("sufficient_constant_coefficients", "true" if res.sufficient else "false")
    rep.result["verdict"] = res.verdict
    if res.witness is not None:
        rep.witness = [ctx.fmt(F) for F in res.witness]
        with rep.timed("witness_direct"):
            direct = jacobi_direct(ps, *res.witness)
            rep.add_check("witness_direct", direct.verdict, ctx.fmt(direct.residual))
    return EXIT_OK if res.verdict == HAMILTONIAN else EXIT_NONZERO


def cmd_jacobi(ctx: Context, rep: Report):
    ps = ctx.poisson()
    rep.result = {"operator": ctx.fmt_op(ps.op)}
    code = EXIT_OK
    if ctx.ns.expr or not ctx.ns.search:
        K, L, M = ctx.exprs(3)
        rep.result["triple"] = [ctx.fmt(F) for F in (K, L, M)]
        for fn in (jacobi_direct, jacobi_mt):
            with rep.timed(fn.__name__):
                r = fn(ps, K, L, M)
                rep.add_check(r.method, r.verdict, ctx.fmt(r.residual))
            if not r.is_zero:
                code = EXIT_NONZERO
    if ctx.ns.search:
        code = max(code, _hamiltonian(ctx, rep, ps))
    return code


def cmd_hamiltonian(ctx: Context, rep: Report):
    ps = ctx.poisson()
    rep.result = {"operator": ctx.fmt_op(ps.op)}
    return _hamiltonian(ctx, rep, ps)


def cmd_validate(ctx: Context, rep: Report):
    out = validate_setup(ctx.sig, seed=ctx.options["seed"], samples=ctx.options["samples"])
    for c in out["checks"]:
        extra = {"detail": c["detail"]}
        if "note" in c:
            extra["note"] = c["note"]
        rep.add_check(c["name"], "pass" if c["passed"] else "fail", **extra)
    rep.result = {"all_passed": out["all_passed"]}
    return EXIT_OK if out["all_passed"] else EXIT_NONZERO


def corpus_verdicts(max_degree: int | None = None, max_order: int | None = None) -> dict:
    """Classify every operator in every shipped setup file."""
    out = {}
    for entry in sorted(corpus_dir().iterdir(), key=lambda p: p.name):
        if not entry.name.endswith(".setup"):
            continue
        with resources.as_file(entry) as path:
            setup = load_setup(path)
        opts = setup.options
        basis = default_basis(setup.sig, max_degree or opts["max_degree"], max_order or opts["max_order"])
        table = {}
        for name in sorted(setup.operators):
            op = setup.operators[name]
            row = {"operator": format_operator(op, setup.sig), "skew_adjoint": is_skew_adjoint(op)}
            if row["skew_adjoint"]:
                res = classify(PoissonSetup(setup.sig, op), basis)
                row.update(sufficient=res.sufficient, universal=res.universal.verdict, verdict=res.verdict,
                           witness=None if res.witness is None else [format_function(F, setup.sig) for F in res.witness])
            table[name] = row
        out[entry.name] = table
    return out


def cmd_corpus(ctx: Context, rep: Report):
    got = corpus_verdicts(ctx.ns.max_degree, ctx.ns.max_order)
    if ctx.ns.write:
        Path(ctx.ns.write).write_text(json.dumps(got, indent=2) + "\n", encoding="utf-8")
    expected = json.loads((corpus_dir() / "expected.json").read_text(encoding="utf-8"))
    ok = True
    for fname, table in got.items():
        for name, row in table.items():
            want = expected.get(fname, {}).get(name)
            verdict = row.get("verdict", "not-skew-adjoint")
            status = "match" if want == row else "mismatch"
            ok &= status == "match"
            rep.add_check(f"{fname}:{name}", status, row["operator"], classification=verdict)
    missing = sorted(f"{f}:{n}" for f, t in expected.items() for n in t if n not in got.get(f, {}))
    for key in missing:
        ok = False
        rep.add_check(key, "missing")
    rep.result = {"entries": sum(len(t) for t in got.values()), "all_match": ok}
    return EXIT_OK if ok else EXIT_NONZERO


COMMANDS = {
    "euler": (cmd_euler, "Euler-Lagrange derivative of an expression"),
    "adjoint": (cmd_adjoint, "Lagrange adjoint of an operator"),
    "compose": (cmd_compose, "composition of two or more operators"),
    "green": (cmd_green, "current in Green's formula for P, f, g"),
    "frechet": (cmd_frechet, "Frechet derivative of an expression"),
    "bracket": (cmd_bracket, "Poisson bracket of two functionals"),
    "jacobi": (cmd_jacobi, "Jacobi identity on a triple, or a witness search"),
    "hamiltonian": (cmd_hamiltonian, "decide whether a skew-adjoint operator is Hamiltonian"),
    "validate": (cmd_validate, "sampled checks of the structural assumptions"),
    "corpus": (cmd_corpus, "re-run the shipped corpus and compare with locked verdicts"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--setup", metavar="PATH", help="setup file (TOML)")
    common.add_argument("--expr", action="append", metavar="STR", help="expression; repeat for several")
    common.add_argument("--op", action="append", metavar="STR|NAME",
                        help="operator text or a name from the setup; repeat for several")
    common.add_argument("--independent", metavar="NAMES", help="comma-separated, default x")
    common.add_argument("--dependent", metavar="NAMES", help="comma-separated, default u")
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--max-degree", dest="max_degree", type=int)
    common.add_argument("--max-order", dest="max_order", type=int)
    common.add_argument("--timing", action="store_true", help="include wall-clock timings (not deterministic)")

    parser = argparse.ArgumentParser(prog="jetpoisson", description="Differential polynomials and Hamiltonian operators.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "jacobi":
            p.add_argument("--search", action="store_true", help="run the universal check and a witness search")
        if name == "corpus":
            p.add_argument("--write", metavar="PATH", help="write the fresh verdict table to PATH")
    return parser


def _args_echo(ns: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(ns).items()) if k != "command" and v not in (None, False)}


def run_report(argv: list[str]) -> Report:
    """Parse ``argv``, run the command and return its report (errors give exit code 2)."""
    ns = build_parser().parse_args(argv)
    rep = Report(shlex.join(argv), _args_echo(ns), timing=ns.timing)
    rep.as_json = ns.json
    try:
        ctx = Context(ns)
        rep.setup, rep.signature = ctx.setup, ctx.sig
        fn = COMMANDS[ns.command][0]
        rep.exit_code = fn(ctx, rep)
    except (ParseError, SetupError, UsageError, NotSkewAdjointError, ValueError) as exc:
        rep.result = {"error": str(exc)}
        rep.exit_code = EXIT_USAGE
    return rep


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    rep = run_report(argv)
    if rep.exit_code == EXIT_USAGE:
        print(f"jetpoisson: error: {rep.result['error']}", file=sys.stderr)
    sys.stdout.write(rep.to_json() if rep.as_json else rep.to_text())
    return rep.exit_code
