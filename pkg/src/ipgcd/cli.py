"""Command-line front door.

Commands: check (feasibility, exit 1 when infeasible), solve (feasibility
plus witness), optimize, analyze (difficult-prime and increasing-form
diagnostics), oracle (brute force over a window).  Reports go to standard
output as a single JSON object when --json is set or stdout is not a tty;
all integers are serialized as decimal strings.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional, Sequence

from .config import SolverConfig
from .divsys import DivSystem, VarPartition, is_increasing, pdiff, pzero
from .errors import SearchBudgetExceeded, SolverError
from .fileformat import ParsedFile, parse_file
from .instance import IpGcdInstance
from .localglobal import ModPSolution, SolveStats, solve_increasing
from .oracle import Window, enumerate_mod_p, enumerate_solutions
from .solver import feasible, normalize, optimize, sign_split, to_triples

# Valuation cap for the per-prime witness search on raw divisibility files.
# Escalation past this cap is reported as undecided rather than infeasible.
DIV_MODE_EXPONENT_CAP = 10


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="problem file")
    common.add_argument("--max-prime-search", type=int, default=5000000, metavar="N",
                        help="factorization budget (default 5000000)")
    common.add_argument("--max-members", type=int, default=20000, metavar="N",
                        help="cap on sign-split disjuncts (default 20000)")
    common.add_argument("--parallel", type=int, default=1, metavar="N",
                        help="worker count (accepted; current pipeline is sequential)")
    common.add_argument("--seed", type=int, default=0, metavar="N",
                        help="reserved; the pipeline is deterministic")
    common.add_argument("--json", action="store_true",
                        help="emit a JSON report (default when stdout is not a tty)")
    parser = argparse.ArgumentParser(prog="ipgcd",
                                     description="exact solver for integer programs with gcd constraints")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="decide feasibility")
    sub.add_parser("solve", parents=[common], help="decide feasibility and print a witness")
    sub.add_parser("optimize", parents=[common], help="optimize the objective")
    sub.add_parser("analyze", parents=[common], help="print solver diagnostics")
    oracle = sub.add_parser("oracle", parents=[common], help="brute-force a window")
    oracle.add_argument("--window", type=int, required=True, metavar="W",
                        help="search [-W, W] per variable")
    return parser


def _config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(factor_budget=args.max_prime_search, max_members=args.max_members)


def _witness_map(variables: Sequence[str], assignment: Dict[str, int]) -> Dict[str, str]:
    return {v: str(assignment[v]) for v in variables if v in assignment}


def _stats_map(stats: SolveStats) -> Dict[str, str]:
    return {k: str(v) for k, v in stats.as_dict().items()}


def _emit(report: Dict[str, object], as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, indent=2))
        return
    for key, value in report.items():
        if key == "witness" and isinstance(value, dict):
            text = ", ".join(f"{k} = {v}" for k, v in value.items())
            print(f"witness: {text}")
        elif key == "witnesses" and isinstance(value, list):
            print(f"witnesses: {len(value)}")
            for w in value:
                print("  " + ", ".join(f"{k} = {v}" for k, v in w.items()))
        elif key == "stats" and isinstance(value, dict):
            print("stats: " + " ".join(f"{k}={v}" for k, v in value.items()))
        elif isinstance(value, list):
            print(f"{key}: " + " ".join(str(v) for v in value))
        else:
            print(f"{key}: {value}")


def _div_mod_solutions(system: DivSystem, config: SolverConfig,
                       stats: SolveStats) -> Dict[int, ModPSolution]:
    """Witnesses modulo every difficult prime, by escalating the valuation cap."""
    out: Dict[int, ModPSolution] = {}
    for p in sorted(pdiff(system, budget=config.factor_budget)):
        stats.primes += 1
        found: Optional[ModPSolution] = None
        for exponent in range(1, DIV_MODE_EXPONENT_CAP + 1):
            values = enumerate_mod_p(system, p, exponent, cap=config.point_cap)
            if values is not None:
                found = ModPSolution.for_system(system, p, values)
                break
        if found is None:
            raise SearchBudgetExceeded(
                f"no witness modulo {p} within valuation cap {DIV_MODE_EXPONENT_CAP}; "
                "satisfiability undecided")
        out[p] = found
    return out


def _run_feasibility(parsed: ParsedFile, config: SolverConfig,
                     with_witness: bool) -> Dict[str, object]:
    target = parsed.target
    if isinstance(target, IpGcdInstance):
        outcome = feasible(target, config)
        status = "Feasible" if outcome.status == "feasible" else "Infeasible"
        witness = None
        if with_witness and outcome.assignment is not None:
            witness = _witness_map(target.variables, outcome.assignment)
        return {"status": status, "witness": witness, "objective_value": None,
                "stats": _stats_map(outcome.stats)}
    if parsed.partition is None:
        raise SolverError("divisibility feasibility needs an `increasing` directive")
    stats = SolveStats()
    sols = _div_mod_solutions(target, config, stats)
    assignment = solve_increasing(target, parsed.partition, sols,
                                  config.factor_budget, stats)
    witness = _witness_map(target.variables, assignment) if with_witness else None
    return {"status": "Feasible", "witness": witness, "objective_value": None,
            "stats": _stats_map(stats)}


def _run_optimize(parsed: ParsedFile, config: SolverConfig) -> Dict[str, object]:
    target = parsed.target
    if not isinstance(target, IpGcdInstance):
        raise SolverError("optimize requires an IP-GCD instance")
    if target.objective is None:
        raise SolverError("optimize requires a minimize or maximize line")
    outcome = optimize(target, config)
    status = {"optimal": "Optimal", "infeasible": "Infeasible",
              "unbounded": "Unbounded"}[outcome.status]
    witness = None
    if outcome.assignment is not None:
        witness = _witness_map(target.variables, outcome.assignment)
    value = str(outcome.value) if outcome.value is not None else None
    return {"status": status, "witness": witness, "objective_value": value,
            "stats": _stats_map(outcome.stats)}


def _run_analyze(parsed: ParsedFile, config: SolverConfig) -> Dict[str, object]:
    target = parsed.target
    stats = SolveStats()
    if isinstance(target, DivSystem):
        partition = parsed.partition or VarPartition(tuple((v,) for v in target.variables))
        order = partition.induced_order(target.variables)
        diff = sorted(pdiff(target, budget=config.factor_budget))
        zero = sorted(pzero(target, order, budget=config.factor_budget))
        increasing = is_increasing(target, partition)
    else:
        diff_set: set = set()
        zero_set: set = set()
        increasing = True
        for member in sign_split(normalize(target), config):
            for triple in to_triples(member, config):
                stats.triples += 1
                if triple.psi is None:
                    continue
                order = tuple(triple.all_vars)
                diff_set |= pdiff(triple.psi, budget=config.factor_budget)
                zero_set |= pzero(triple.psi, order, budget=config.factor_budget)
                blocks = tuple(b for b in (triple.zvars, triple.yvars, triple.wvars) if b)
                if not is_increasing(triple.psi, VarPartition(blocks)):
                    increasing = False
        diff, zero = sorted(diff_set), sorted(zero_set)
    return {"status": "Analyzed", "witness": None, "objective_value": None,
            "pdiff": [str(p) for p in diff], "pzero": [str(p) for p in zero],
            "increasing": increasing, "stats": _stats_map(stats)}


def _run_oracle(parsed: ParsedFile, config: SolverConfig, window: int) -> Dict[str, object]:
    target = parsed.target
    found = enumerate_solutions(
        target, Window.uniform(target.variables, -window, window), cap=config.point_cap)
    stats = SolveStats()
    stats.scan_steps = len(found)
    witnesses = [_witness_map(target.variables, w) for w in found]
    status = "Feasible" if witnesses else "Infeasible"
    first = witnesses[0] if witnesses else None
    return {"status": status, "witness": first, "objective_value": None,
            "witnesses": witnesses, "stats": _stats_map(stats)}


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    as_json = args.json or not sys.stdout.isatty()
    config = _config(args)
    stage = "parse"
    try:
        with open(args.file, "r", encoding="utf-8") as handle:
            parsed = parse_file(handle.read())
        stage = args.command
        if args.command == "check":
            report = _run_feasibility(parsed, config, with_witness=False)
        elif args.command == "solve":
            report = _run_feasibility(parsed, config, with_witness=True)
        elif args.command == "optimize":
            report = _run_optimize(parsed, config)
        elif args.command == "analyze":
            report = _run_analyze(parsed, config)
        else:
            report = _run_oracle(parsed, config, args.window)
    except (SolverError, OSError, ValueError) as e:
        error = {"status": "Error", "stage": stage, "error": str(e)}
        if as_json:
            print(json.dumps(error, indent=2))
        else:
            print(f"error in {stage}: {e}", file=sys.stderr)
        return 2
    _emit(report, as_json)
    if args.command == "check" and report["status"] == "Infeasible":
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
