"""Command-line entry point: validate, plan, episode, and bench subcommands.

Machine-readable results go to stdout; diagnostics and logging go to stderr.
Exit codes: 0 success, 1 domain outcome failure (no plan / episode failed),
2 usage or configuration error, 3 I/O error. All stochastic behavior is
determined by --seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .assets import DATA_DIR_ENV
from .bench import ExperimentConfig, emit_report, run_experiment
from .episode import run_adaptability_episode, run_episode
from .errors import ConfigError, FgsError, GroundingError, PddlParseError, ValidationError
from .grounding import ground
from .heuristics import HEURISTIC_NAMES
from .pddl import parse_domain, parse_problem
from .scenario import load_scenario, sense
from .scoring import ScoreParams, make_scorer
from .search import SearchConfig, search

EXIT_OK = 0
EXIT_NO_SOLUTION = 1
EXIT_USAGE = 2
EXIT_IO = 3

log = logging.getLogger("fgs")


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_model(args):
    domain = parse_domain(_read(args.domain))
    problem = parse_problem(_read(args.problem), domain)
    return domain, problem, ground(domain, problem)


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        algorithm={"wastar": "weighted_astar"}.get(args.algorithm, args.algorithm),
        heuristic=args.heuristic,
        use_feature_score=args.features == "on",
        weight=args.weight,
        node_budget=args.node_budget,
    )


def cmd_validate(args) -> int:
    domain, problem, gp = _load_model(args)
    if args.scenario:
        scenario = load_scenario(args.scenario)
        print(f"scenario {scenario.scenario_id}: {scenario.n} objects, "
              f"tools {', '.join(scenario.tools)}")
    print(f"domain {domain.name}: {len(domain.action_schemas)} schemas, "
          f"{len(domain.predicates)} predicates")
    print(f"problem {problem.name}: {len(problem.objects)} objects, "
          f"{len(gp.actions)} ground actions, {len(gp.atoms)} atoms")
    return EXIT_OK


def cmd_plan(args) -> int:
    _, _, gp = _load_model(args)
    cfg = _search_config(args)
    scorer = None
    if cfg.use_feature_score:
        if not args.scenario:
            raise ConfigError("--features on requires --scenario")
        scenario = load_scenario(args.scenario)
        profiles = sense(scenario, args.noise == "on")
        scorer = make_scorer(scenario.registry(), profiles, ScoreParams())
    result = search(gp, cfg, scorer=scorer)
    log.info("search status=%s nodes=%d", result.status, result.nodes_expanded)
    if result.plan is None:
        print(f"no plan ({result.status})", file=sys.stderr)
        return EXIT_NO_SOLUTION
    for act in result.plan:
        print(act.name)
    return EXIT_OK


def cmd_episode(args) -> int:
    _, _, gp = _load_model(args)
    scenario = load_scenario(args.scenario)
    cfg = _search_config(args)
    trace = None
    trace_fh = None
    if args.trace:
        trace_fh = open(args.trace, "w", encoding="utf-8")

        def trace(event):
            trace_fh.write(json.dumps(event, sort_keys=True) + "\n")

    try:
        kwargs = dict(
            trust_policy={"fixed": "fixed_true", "switchable": "switchable"}[args.trust],
            budget=args.budget,
            noise_on=args.noise == "on",
            trace=trace,
        )
        if args.adaptability:
            outcome = run_adaptability_episode(gp, cfg, scenario, **kwargs)
            result = outcome.result
            extra = {"chosen_tool": outcome.chosen_tool, "use_action": outcome.use_action}
        else:
            result = run_episode(gp, cfg, scenario, **kwargs)
            extra = {}
    finally:
        if trace_fh is not None:
            trace_fh.close()
    summary = {
        "scenario": scenario.scenario_id,
        "success": result.success,
        "status": result.status,
        "failed_attempts": result.failed_attempts,
        "nodes_total": result.nodes_total,
        "nodes_first_search": result.nodes_first_search,
        "searches": result.searches,
        "plan_length": result.plan_length,
        "trust_trace": result.trust_trace,
        "attempted": [list(p) for p in result.attempted],
        "plan": [a.name for a in result.final_plan] if result.final_plan else None,
        **extra,
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK if result.success else EXIT_NO_SOLUTION


def cmd_bench(args) -> int:
    cfg = ExperimentConfig(
        experiment=args.experiment,
        cases_per_tool=args.cases,
        trust_policy={"fixed": "fixed_true", "switchable": "switchable"}[args.trust],
        budgets=tuple(args.budget_sweep) if args.budget_sweep else None,
        seed=args.seed,
        noise_on=args.noise == "on",
        regression=not args.generate,
    )
    table = run_experiment(cfg, trace_dir=Path(args.trace_dir) if args.trace_dir else None)
    written = emit_report(table, args.format, args.out)
    for path in written:
        print(path)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x != ""]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fgs",
        description="Feature-guided STRIPS planning with tool construction episodes.",
        epilog=f"The {DATA_DIR_ENV} environment variable overrides the bundled data directory.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress to stderr (-vv for debug)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_args(p):
        p.add_argument("--domain", required=True, help="domain PDDL file")
        p.add_argument("--problem", required=True, help="problem PDDL file")

    def add_search_args(p):
        p.add_argument("--algorithm", default="astar", choices=("astar", "wastar", "ucs", "ehc"))
        p.add_argument("--heuristic", default="ff", choices=HEURISTIC_NAMES)
        p.add_argument("--features", default="off", choices=("on", "off"))
        p.add_argument("--weight", type=float, default=5.0, help="weighted search weight")
        p.add_argument("--node-budget", type=int, default=None)
        p.add_argument("--noise", default="off", choices=("on", "off"),
                       help="apply the scenario's seeded sensor noise")

    p = sub.add_parser("validate", help="parse and validate PDDL (and optionally a scenario)")
    add_model_args(p)
    p.add_argument("--scenario", help="scenario JSON file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plan", help="run a single search and print the plan")
    add_model_args(p)
    add_search_args(p)
    p.add_argument("--scenario", help="scenario JSON file (needed with --features on)")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("episode", help="run a plan-execute-replan episode")
    add_model_args(p)
    add_search_args(p)
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--trust", default="switchable", choices=("fixed", "switchable"))
    p.add_argument("--budget", type=int, default=None, help="max failed construction attempts")
    p.add_argument("--trace", help="write a JSON-lines episode trace to this file")
    p.add_argument("--adaptability", action="store_true",
                   help="report the chosen tool and task action")
    p.set_defaults(func=cmd_episode)

    p = sub.add_parser("bench", help="run a benchmark experiment and write a report")
    p.add_argument("--experiment", required=True, choices=("baselines", "algorithms", "adaptability"))
    p.add_argument("--out", required=True, help="report output path")
    p.add_argument("--format", default="csv", choices=("csv", "json", "markdown"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=10, help="cases per tool when generating")
    p.add_argument("--generate", action="store_true",
                   help="generate fresh scenarios instead of the bundled fixed ones")
    p.add_argument("--trust", default="switchable", choices=("fixed", "switchable"))
    p.add_argument("--noise", default="off", choices=("on", "off"))
    p.add_argument("--budget-sweep", type=_int_list, default=None,
                   help="comma-separated budgets for success-rate curves, e.g. 0,1,2,5,10,89")
    p.add_argument("--trace-dir", help="directory for raw episode traces")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (PddlParseError, ValidationError, GroundingError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FgsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
