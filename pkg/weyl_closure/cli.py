# weyl_closure/cli.py
"""
The ``wclose`` command line.

Exit codes: 0 on success, 1 on a computational failure (budget, truncation
cap, certification, finite rank, a failed annihilation check) after the
partial JSON trace is written, 2 on usage and parse errors.
"""
import argparse
import json
import logging
import os
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from weyl_closure import __version__
from weyl_closure.algebra import act_on_exponential, act_on_rational, annihilates
from weyl_closure.bench import SUITES, bench, format_table
from weyl_closure.closure import partial_weyl_closure
from weyl_closure.config import AppConfig, ClosureConfig, EngineBudget
from weyl_closure.domains import format_poly
from weyl_closure.errors import (
    BudgetExceededError,
    CertificationError,
    NotFiniteRankError,
    ProblemParseError,
    TruncationCapError,
    WeylClosureError,
)
from weyl_closure.groebner import buchberger, is_finite_rank, replay_certificate
from weyl_closure.holonomy import is_holonomic
from weyl_closure.orders import default_order, parse_order
from weyl_closure.parser import ProblemFile, format_problem, generators_for, load_problem, parse_function, parse_functions
from weyl_closure.symbol import singular_locus
from weyl_closure.trace import build_trace, write_trace

logger = logging.getLogger(__name__)


class CommandFailed(Exception):
    """A command ran to the end but its check failed"""

    def __init__(self, message: str, result: Dict[str, Any]):
        super().__init__(message)
        self.result = result


def build_parser(config: Optional[AppConfig] = None) -> argparse.ArgumentParser:
    config = config or AppConfig()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="Write a machine-readable trace to PATH")
    common.add_argument("--save", action="store_true", help="Also save the trace under WCLOSE_DATA_DIR")
    common.add_argument("--order", help="Term order, e.g. grevlex, lex(x,Dx), block(...), weight(...)")
    common.add_argument("--position", choices=["pot", "top"], help="Module layer: position over term or term over position")
    common.add_argument("--max-pairs", type=int, help="S-pair budget")
    common.add_argument("--max-terms", type=int, help="Stored term budget")
    common.add_argument("--timeout", type=float, help="Wall-clock budget in seconds")
    common.add_argument("-v", "--verbose", action="store_true", help="Log progress at INFO level")

    parser = argparse.ArgumentParser(prog="wclose", description="Partial Weyl closure of D-modules")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gb = sub.add_parser("gb", parents=[common], help="Reduced Gröbner basis of the generators")
    gb.add_argument("problem", help="Problem file")
    gb.add_argument("--certificates", action="store_true", help="Record and replay cofactor certificates")

    closure = sub.add_parser("closure", parents=[common], help="Partial Weyl closure")
    closure.add_argument("problem", help="Problem file")
    closure.add_argument("--loc-poly", help="Polynomial f vanishing on the singular locus, or 'auto'")
    closure.add_argument("--criterion", choices=["holonomic", "stable-and-holonomic", "holonomic-plus-extra"])
    closure.add_argument("--extra", type=int, help="h for holonomic-plus-extra")
    closure.add_argument("--max-T-degree", dest="max_T_degree", type=int, help="Cap on the truncation degree")
    closure.add_argument("--no-seed", action="store_true", help="Recompute every iteration from scratch")
    closure.add_argument("--verify-input", action="store_true", help="Check finite rank before running")
    closure.add_argument("--k-max", type=int, help="Largest power of f tried when certifying")
    closure.add_argument("--output", metavar="PATH", help="Write the closure as a problem file")
    closure.add_argument("--jobs", type=int, default=config.jobs, help="Threads for certification")

    holcheck = sub.add_parser("holcheck", parents=[common], help="Holonomicity of the generated module")
    holcheck.add_argument("problem", help="Problem file")

    singlocus = sub.add_parser("singlocus", parents=[common], help="Singular locus of the generated module")
    singlocus.add_argument("problem", help="Problem file")
    singlocus.add_argument("--jobs", type=int, default=config.jobs, help="Threads for the saturations")

    rank = sub.add_parser("rank", parents=[common], help="Finite rank test")
    rank.add_argument("problem", help="Problem file")

    check = sub.add_parser("check-annihilates", parents=[common], help="Apply the generators to a function")
    check.add_argument("problem", help="Problem file")
    check.add_argument("--function", help="Rational function (or [f1, ..., fr]) the generators should kill")
    check.add_argument("--exp", help="Polynomial g: check annihilation of exp(g)")

    bench_parser = sub.add_parser("bench", parents=[common], help="Run a benchmark suite")
    bench_parser.add_argument("suite", choices=SUITES)
    bench_parser.add_argument("--jobs", type=int, default=config.jobs, help="Instances run in parallel")
    bench_parser.add_argument("--format", choices=["text", "csv"], default="text")
    bench_parser.add_argument("--out", metavar="PATH", help="Write the table to PATH instead of stdout")
    bench_parser.add_argument("--seed", type=int, default=0, help="Seed of the random suites")
    bench_parser.add_argument("--count", type=int, default=4, help="Instances in the random suites")
    return parser


def _budget(args: argparse.Namespace, config: AppConfig) -> EngineBudget:
    updates = {k: getattr(args, k) for k in ("max_pairs", "max_terms", "timeout") if getattr(args, k) is not None}
    return EngineBudget(**{**config.budget.model_dump(), **updates})


def _order(args: argparse.Namespace, problem: ProblemFile):
    text = args.order or problem.order
    position = args.position or problem.position or "pot"
    return parse_order(text, position) if text else default_order(position)


def _input_info(problem: ProblemFile, order_text: Optional[str]) -> Dict[str, Any]:
    info = problem.to_dict()
    info["order"] = order_text
    return info


def _print_elements(title: str, elements: Sequence) -> None:
    print(f"{title} ({len(elements)}):")
    for g in elements:
        print(f"  {g}")


# -- commands -------------------------------------------------------------------

def cmd_gb(args, problem: ProblemFile, budget: EngineBudget) -> Dict[str, Any]:
    order = _order(args, problem)
    gens = generators_for(problem)
    sig = gens[0].signature if gens else problem.signature
    G = buchberger(gens, order, budget, track_certificates=args.certificates, signature=sig)
    _print_elements("Gröbner basis", G.elements)
    result = G.to_dict()
    if args.certificates:
        replayed = replay_certificate(G, gens)
        print(f"certificates replay: {'ok' if replayed else 'FAILED'}")
        result["certificates_ok"] = replayed
        if not replayed:
            raise CommandFailed("certificate replay failed", result)
    return result


def cmd_closure(args, problem: ProblemFile, budget: EngineBudget, config: AppConfig) -> Dict[str, Any]:
    updates = {"budget": budget.model_dump(), "order": args.order or problem.order}
    if args.position or problem.position:
        updates["position"] = args.position or problem.position
    for name in ("criterion", "extra", "max_T_degree", "k_max"):
        if getattr(args, name) is not None:
            updates[name] = getattr(args, name)
    if args.no_seed:
        updates["seed_previous"] = False
    if args.verify_input:
        updates["verify_input"] = True
    closure_config = ClosureConfig.model_validate({**config.closure.model_dump(), **updates})

    sig = problem.signature
    f = problem.loc_poly
    if args.loc_poly:
        f = None if args.loc_poly == "auto" else parse_function(args.loc_poly, sig.function_ring)
    result = partial_weyl_closure(generators_for(problem), f, closure_config, jobs=args.jobs)

    print(f"f = {format_poly(result.loc_poly)} ({result.loc_source})")
    _print_elements("closure generators", result.generators)
    last = result.trace[-1]
    print(f"verdict: {'holonomic' if last.holonomic else 'NOT holonomic'} at s = {last.s}"
          f" ({result.fired_criterion})")
    print(f"certificate exponents: {result.certificates}")
    if args.output:
        text = format_problem(sig, result.generators, loc_poly=result.loc_poly, order=closure_config.order,
                              function=problem.function, exp_function=problem.exp_function,
                              comment=f"closure of {args.problem}")
        with open(args.output, "w", encoding="utf-8") as f_out:
            f_out.write(text)
        logger.info(f"Closure written to {args.output}")
    return result.to_dict()


def cmd_holcheck(args, problem: ProblemFile, budget: EngineBudget) -> Dict[str, Any]:
    G = buchberger(generators_for(problem), _order(args, problem), budget, signature=problem.signature)
    holonomic, witness = is_holonomic(G)
    if holonomic:
        print("holonomic")
    else:
        print(f"NOT holonomic; witness {witness}")
    return {"holonomic": holonomic, "witness": witness.to_dict() if witness else None, "size": len(G),
            "elements": [str(g) for g in G.elements]}


def cmd_singlocus(args, problem: ProblemFile, budget: EngineBudget) -> Dict[str, Any]:
    locus = singular_locus(generators_for(problem), budget, jobs=args.jobs)
    texts = [format_poly(p) for p in locus]
    if not locus:
        print("singular locus: zero ideal (whole space)")
    elif len(locus) == 1 and locus[0].is_ground:
        print("singular locus: unit ideal (empty)")
    else:
        _print_elements("singular locus generators", texts)
    return {"generators": texts, "size": len(texts)}


def cmd_rank(args, problem: ProblemFile, budget: EngineBudget) -> Dict[str, Any]:
    finite, rank = is_finite_rank(generators_for(problem), problem.signature, budget)
    print(f"finite rank {rank}" if finite else "not of finite rank")
    return {"finite": finite, "rank": rank}


def cmd_check_annihilates(args, problem: ProblemFile) -> Dict[str, Any]:
    sig = problem.signature
    gens = generators_for(problem)
    exp_text = args.exp
    g_exp = problem.exp_function
    if exp_text:
        g_exp = parse_function(exp_text, sig.function_ring).numer
    functions = problem.function
    if args.function:
        functions = parse_functions(args.function, sig.function_ring)
    if g_exp is None and functions is None:
        raise ValueError("give --function or --exp (or declare one in the problem file)")

    failures = []
    for i, P in enumerate(gens, start=1):
        if g_exp is not None:
            values = act_on_exponential(P, g_exp, functions if functions is not None else None)
        else:
            values = act_on_rational(P, functions if len(functions) > 1 else functions[0])
        if not annihilates(P, values):
            failures.append(i)
            print(f"generator {i} does not annihilate: {P}")
    result = {"generators": [str(g) for g in gens], "size": len(gens), "failures": failures}
    if failures:
        raise CommandFailed(f"{len(failures)} of {len(gens)} generators do not annihilate", result)
    print(f"all {len(gens)} generators annihilate")
    return result


def cmd_bench(args, budget: EngineBudget) -> Dict[str, Any]:
    df = bench(args.suite, jobs=args.jobs, budget=budget, seed=args.seed, count=args.count)
    table = format_table(df, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(table)
        logger.info(f"Bench table written to {args.out}")
    else:
        print(table, end="")
    return {"size": len(df), "rows": json.loads(df.to_json(orient="records"))}


# -- entry points -----------------------------------------------------------------

_FAILURE_STATUS = {
    BudgetExceededError: "budget-exceeded",
    TruncationCapError: "truncation-cap-hit",
    CertificationError: "certification-failed",
    NotFiniteRankError: "not-finite-rank",
}


def _partial_result(e: Exception) -> Dict[str, Any]:
    if isinstance(e, TruncationCapError) and e.result is not None:
        return e.result.to_dict()
    if isinstance(e, BudgetExceededError):
        if e.result is not None:
            return e.result.to_dict()
        return {"elements": [str(g) for g in e.partial], "size": len(e.partial), "provenance": dict(e.stats)}
    if isinstance(e, CertificationError):
        return {"failures": list(e.failures)}
    if isinstance(e, CommandFailed):
        return e.result
    return {}


def run_cli(argv: Optional[List[str]] = None, config: Optional[AppConfig] = None) -> int:
    """Run one subcommand and return its exit code"""
    config = config or AppConfig.load_config()
    parser = build_parser(config)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.verbose:
        logging.getLogger("weyl_closure").setLevel(logging.INFO)

    start = time.time()
    problem: Optional[ProblemFile] = None
    input_info: Dict[str, Any] = {}
    status, error, result, code = "completed", None, {}, 0
    try:
        budget = _budget(args, config)
        if args.command != "bench":
            problem = load_problem(args.problem)
            input_info = _input_info(problem, args.order or problem.order)
        if args.command == "gb":
            result = cmd_gb(args, problem, budget)
        elif args.command == "closure":
            result = cmd_closure(args, problem, budget, config)
        elif args.command == "holcheck":
            result = cmd_holcheck(args, problem, budget)
        elif args.command == "singlocus":
            result = cmd_singlocus(args, problem, budget)
        elif args.command == "rank":
            result = cmd_rank(args, problem, budget)
        elif args.command == "check-annihilates":
            result = cmd_check_annihilates(args, problem)
        else:
            result = cmd_bench(args, budget)
    except (ProblemParseError, ValidationError, ValueError, OSError) as e:
        print(f"error: {str(e)}", file=sys.stderr)
        logger.error(f"Usage error in {args.command}: {str(e)}", exc_info=True)
        return 2
    except (WeylClosureError, CommandFailed) as e:
        status = next((s for cls, s in _FAILURE_STATUS.items() if isinstance(e, cls)), "error")
        error, result, code = str(e), _partial_result(e), 1
        print(f"error: {str(e)}", file=sys.stderr)
        logger.error(f"{args.command} failed: {str(e)}", exc_info=True)

    if args.json or args.save:
        trace = build_trace(args.command, status, input_info, result, time.time() - start, error,
                            budget=_budget(args, config).model_dump())
        if args.json:
            write_trace(trace, args.json)
        if args.save:
            write_trace(trace, os.path.join(config.data_dir, f"{args.command}_{trace['metadata']['run_id']}.json"))
    return code


def main() -> None:
    """Main entry point for the application"""
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
