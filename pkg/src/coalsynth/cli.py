"""Synthesize dynamic-coalition strategies for games with preferences over temporal goals.

Exit codes: 0 success, 1 bad input or usage, 2 budget exceeded, 3 a
property check failed.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, blocksworld, oracle
from .errors import BudgetExceeded, CapacityError, CoalsynthError
from .game import dump_problem, load_problem
from .product import DEFAULT_PRODUCT_BUDGET, build_product, export_graph
from .sim import Profile, render_trace, run
from .synthesis import export_solution, synthesize, synthesize_level
from .values import export_values, value_table
from .verify import run_checks

OK, INPUT_ERROR, BUDGET_ERROR, CHECK_FAILED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def header(digest: str) -> str:
    return f"# coalsynth {__version__} input={digest}\n"


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _product(args):
    spec = load_problem(_read(args.problem))
    return spec, build_product(spec, full=args.full, budget=args.state_budget)


def cmd_solve(args) -> int:
    spec, H = _product(args)
    val = value_table(H)
    head = header(spec.digest)
    if args.bound is not None:
        if not 0 <= args.bound <= H.rank_max[0]:
            raise UsageError(f"--bound must lie in 0..{H.rank_max[0]}")
        res = synthesize_level(H, val, args.bound)
        verdict = "success" if res.success else "no admissible strategy"
        sys.stdout.write(head + f"bound {args.bound}: {verdict}\n")
        return OK
    sol = synthesize(H, val)
    summary = (f"product states: {H.n_states}\n"
               f"Val(v0) = {[int(x) for x in val[:, H.v0]]}\n"
               f"l* = {sol.l_star}\n"
               f"candidate evaluations: {sol.evaluations}\n")
    if args.out is None:
        sys.stdout.write(head + summary + "\n" + export_values(H, val) + "\n" + export_solution(sol))
        return OK
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {out}: {exc.strerror}") from None
    _write(str(out / "values.txt"), head + export_values(H, val))
    _write(str(out / "solution.txt"), head + export_solution(sol))
    _write(str(out / "solution.json"), Profile.from_solution(sol).to_json(H))
    sys.stdout.write(head + summary)
    return OK


def cmd_verify(args) -> int:
    spec, H = _product(args)
    val = value_table(H)
    if args.corrupt_values:
        # negative control: pretend the leader can never improve on its worst rank
        val = val.copy()
        val[0, :] = H.rank_max[0]
    lines = run_checks(H, Path(args.problem).stem, args.budget, val=val, seed=args.seed)
    body = oracle.report_header() + "\n" + "".join(f"{ln}\n" for ln in lines)
    sys.stdout.write(header(spec.digest) + body)
    return OK if all(ln.passed for ln in lines) else CHECK_FAILED


def cmd_simulate(args) -> int:
    if args.horizon < 1:
        raise UsageError("--horizon must be at least 1")
    spec, H = _product(args)
    prof = Profile.from_json(H, _read(args.solution))
    trace = run(H, prof, args.horizon)
    _write(args.out, header(spec.digest) + render_trace(trace, args.format))
    return OK


def cmd_blocksworld(args) -> int:
    spec = blocksworld.build_blocksworld()
    text = dump_problem(spec, args.format)
    if args.format == "text":
        text = header(spec.digest) + text
    _write(args.out, text)
    return OK


def cmd_export_graph(args) -> int:
    spec, H = _product(args)
    _write(args.out, "// coalsynth %s input=%s\n" % (__version__, spec.digest) + export_graph(H))
    return OK


def cmd_random(args) -> int:
    spec = oracle.random_problem(np.random.default_rng(args.seed), dense=args.dense, owned=args.owned)
    _write(args.out, header(spec.digest) + dump_problem(spec))
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coalsynth", description=__doc__.splitlines()[0] if __doc__ else None)
    p.add_argument("--version", action="version", version=f"coalsynth {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_problem(sp):
        sp.add_argument("problem", help="problem file (text or JSON)")
        sp.add_argument("--full", action="store_true", help="materialise the full product, not just the reachable part")
        sp.add_argument("--state-budget", type=int, default=DEFAULT_PRODUCT_BUDGET,
                        help="maximum number of product states")
        return sp

    s = with_problem(sub.add_parser("solve", help="compute values and the leader's admissible strategy"))
    s.add_argument("-o", "--out", help="directory for values.txt, solution.txt and solution.json")
    s.add_argument("--bound", type=int, help="only test whether this leader rank bound is achievable")
    s.set_defaults(func=cmd_solve)

    s = with_problem(sub.add_parser("verify", help="check the solver against brute-force enumeration"))
    s.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET,
                   help="oracle exhaustion budget (states x joint actions, and search nodes)")
    s.add_argument("--seed", type=int, default=0, help="seed for sampled strategies")
    s.add_argument("--corrupt-values", action="store_true", help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_verify)

    s = with_problem(sub.add_parser("simulate", help="play a saved solution from the initial state"))
    s.add_argument("solution", help="solution.json written by solve")
    s.add_argument("--horizon", type=int, default=20)
    s.add_argument("--format", choices=("text", "csv"), default="text")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("blocksworld", help="write the three-arm BlocksWorld problem")
    s.add_argument("-o", "--out")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_blocksworld)

    s = with_problem(sub.add_parser("export-graph", help="write the product game as Graphviz"))
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_export_graph)

    s = sub.add_parser("random", help="write a small random problem")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dense", action="store_true", help="use the maximal size in every dimension")
    s.add_argument("--owned", action="store_true", help="each state is controlled by one player")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_random)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (BudgetExceeded, CapacityError) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return BUDGET_ERROR
    except CoalsynthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
