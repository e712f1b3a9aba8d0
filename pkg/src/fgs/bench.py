"""Benchmark harness: baseline comparison, alternative algorithms, and
adaptability, each over the bundled fixed scenarios (regression mode) or
freshly generated ones. Aggregation is a deterministic fold over episode
records ordered by (scenario, config); identical configurations produce
byte-identical reports.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from pathlib import Path

from .assets import TASKS, benchmark_dir, load_task, task_for_scenario
from .episode import run_adaptability_episode, run_episode
from .errors import ConfigError
from .scenario import (
    TASK_TOOLS,
    Scenario,
    generate_adaptability,
    generate_benchmark,
    load_scenario,
)
from .search import SearchConfig

EXPERIMENTS = ("baselines", "algorithms", "adaptability")

BASELINE_CONFIGS: tuple[tuple[str, SearchConfig], ...] = (
    ("FS+H", SearchConfig(algorithm="astar", heuristic="landmarks", use_feature_score=True)),
    ("H", SearchConfig(algorithm="astar", heuristic="landmarks")),
    ("FS", SearchConfig(algorithm="ucs", use_feature_score=True)),
    ("UCS", SearchConfig(algorithm="ucs")),
)

ALGORITHM_CONFIGS: tuple[tuple[str, SearchConfig], ...] = (
    ("A*+LM", SearchConfig(algorithm="astar", heuristic="landmarks", use_feature_score=True)),
    ("wA*+FF", SearchConfig(algorithm="weighted_astar", heuristic="ff", weight=5.0, use_feature_score=True)),
    ("EHC+FF", SearchConfig(algorithm="ehc", heuristic="ff", use_feature_score=True)),
)

ADAPTABILITY_CONFIG = (
    "FS+H",
    SearchConfig(algorithm="astar", heuristic="landmarks", use_feature_score=True),
)

RANDOM_BASELINE_ID = "random"

SUMMARY_HEADER = ("task", "tool", "config", "nodes_mean", "failed_attempts_mean", "success", "plan_length_mean")
BUDGET_HEADER = ("config", "budget", "success_rate")
ADAPT_HEADER = ("task", "config", "correct", "cases")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    task_types: tuple[str, ...] = ("cleaning", "cooking", "woodworking")
    tools: tuple[str, ...] | None = None
    cases_per_tool: int = 10
    configs: tuple[tuple[str, SearchConfig], ...] | None = None
    trust_policy: str = "switchable"
    budgets: tuple[int, ...] | None = None
    seed: int = 0
    noise_on: bool = False
    regression: bool = True  # use the bundled fixed scenarios

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment '{self.experiment}' (choose from {EXPERIMENTS})")
        if self.cases_per_tool < 1:
            raise ConfigError("cases_per_tool must be >= 1")
        if self.configs is not None and not self.configs:
            raise ConfigError("configs must be nonempty")
        for t in self.task_types:
            if t not in TASK_TOOLS:
                raise ConfigError(f"unknown task type '{t}'")

    def resolved_configs(self) -> tuple[tuple[str, SearchConfig], ...]:
        if self.configs is not None:
            return self.configs
        if self.experiment == "baselines":
            return BASELINE_CONFIGS
        if self.experiment == "algorithms":
            return ALGORITHM_CONFIGS
        return (ADAPTABILITY_CONFIG,)


@dataclass
class EpisodeRecord:
    scenario_id: str
    task_type: str
    tool: str
    config_id: str
    success: bool
    failed_attempts: int
    nodes: int  # initial planning run, the per-search effort the tables report
    plan_length: int | None
    nodes_total: int = 0  # summed over every replan
    gt_tool: str | None = None
    chosen_tool: str | None = None
    use_action: str | None = None


@dataclass
class SummaryRow:
    task: str
    tool: str
    config: str
    nodes_mean: float | None
    failed_attempts_mean: float | None
    success: int
    plan_length_mean: float | None


@dataclass
class BudgetPoint:
    config: str
    budget: int
    success_rate: float


@dataclass
class AdaptRow:
    task: str
    config: str
    correct: int
    cases: int


@dataclass
class MetricsTable:
    kind: str  # "summary" or "adaptability"
    rows: list[SummaryRow] = field(default_factory=list)
    budget_points: list[BudgetPoint] = field(default_factory=list)
    adapt_rows: list[AdaptRow] = field(default_factory=list)


# -- scenario selection ----------------------------------------------------------


def _bundled_scenarios(prefix_tool_pairs) -> list[Scenario]:
    base = benchmark_dir()
    out = []
    for task_type, tool in prefix_tool_pairs:
        pattern = f"{task_type}_{tool}_case*.json"
        files = sorted(base.glob(pattern))
        if not files:
            raise ConfigError(f"no bundled scenarios matching {pattern} under {base}")
        out.extend(load_scenario(p) for p in files)
    return sorted(out, key=lambda s: s.scenario_id)


def experiment_scenarios(cfg: ExperimentConfig) -> list[Scenario]:
    task_types = tuple(sorted(cfg.task_types))
    if cfg.experiment == "adaptability":
        if cfg.regression:
            return _bundled_scenarios((t, "either") for t in task_types)
        out = []
        for t in task_types:
            out.extend(generate_adaptability(t, cfg.cases_per_tool, cfg.seed))
        return sorted(out, key=lambda s: s.scenario_id)
    pairs = []
    for t in task_types:
        for tool in TASK_TOOLS[t]:
            if cfg.tools is None or tool in cfg.tools:
                pairs.append((t, tool))
    if cfg.regression:
        return _bundled_scenarios(pairs)
    out = []
    for t, tool in pairs:
        out.extend(generate_benchmark(t, tool, cfg.cases_per_tool, cfg.seed))
    return sorted(out, key=lambda s: s.scenario_id)


# -- episode collection ------------------------------------------------------------


def _trace_writer(trace_dir: Path | None, scenario_id: str, config_id: str):
    if trace_dir is None:
        return None, None
    safe = re.sub(r"[^A-Za-z0-9_.-]", "-", config_id)
    path = trace_dir / f"{scenario_id}__{safe}.jsonl"
    fh = open(path, "w", encoding="utf-8")

    def write(event: dict) -> None:
        fh.write(json.dumps(event, sort_keys=True) + "\n")

    return write, fh


def collect_records(cfg: ExperimentConfig, trace_dir: Path | None = None) -> list[EpisodeRecord]:
    cfg.validate()
    if trace_dir is not None:
        trace_dir = Path(trace_dir)
        trace_dir.mkdir(parents=True, exist_ok=True)
    scenarios = experiment_scenarios(cfg)
    configs = cfg.resolved_configs()
    gp_cache: dict[str, tuple] = {}
    records: list[EpisodeRecord] = []
    for scenario in scenarios:
        task = task_for_scenario(scenario.task_type, scenario.tools)
        if task.task_id not in gp_cache:
            _, _, gp = load_task(task.task_id)
            gp_cache[task.task_id] = (gp, {})
        gp, succ_cache = gp_cache[task.task_id]
        for config_id, search_cfg in configs:
            trace, fh = _trace_writer(trace_dir, scenario.scenario_id, config_id)
            try:
                if cfg.experiment == "adaptability":
                    outcome = run_adaptability_episode(
                        gp,
                        search_cfg,
                        scenario,
                        trust_policy=cfg.trust_policy,
                        noise_on=cfg.noise_on,
                        succ_cache=succ_cache,
                        trace=trace,
                    )
                    res = outcome.result
                    records.append(
                        EpisodeRecord(
                            scenario.scenario_id,
                            scenario.task_type,
                            scenario.ground_truth.tool,
                            config_id,
                            res.success,
                            res.failed_attempts,
                            res.nodes_first_search,
                            res.plan_length,
                            nodes_total=res.nodes_total,
                            gt_tool=scenario.ground_truth.tool,
                            chosen_tool=outcome.chosen_tool,
                            use_action=outcome.use_action,
                        )
                    )
                else:
                    res = run_episode(
                        gp,
                        search_cfg,
                        scenario,
                        trust_policy=cfg.trust_policy,
                        noise_on=cfg.noise_on,
                        succ_cache=succ_cache,
                        trace=trace,
                    )
                    records.append(
                        EpisodeRecord(
                            scenario.scenario_id,
                            scenario.task_type,
                            scenario.ground_truth.tool,
                            config_id,
                            res.success,
                            res.failed_attempts,
                            res.nodes_first_search,
                            res.plan_length,
                            nodes_total=res.nodes_total,
                        )
                    )
            finally:
                if fh is not None:
                    fh.close()
        if cfg.experiment == "adaptability":
            rng = random.Random(f"random-baseline:{cfg.seed}:{scenario.scenario_id}")
            guess = rng.choice(sorted(scenario.tools))
            records.append(
                EpisodeRecord(
                    scenario.scenario_id,
                    scenario.task_type,
                    scenario.ground_truth.tool,
                    RANDOM_BASELINE_ID,
                    guess == scenario.ground_truth.tool,
                    0,
                    0,
                    None,
                    gt_tool=scenario.ground_truth.tool,
                    chosen_tool=guess,
                    use_action=None,
                )
            )
    return records


# -- aggregation --------------------------------------------------------------------


def _mean(values) -> float | None:
    values = list(values)
    if not values:
        return None
    return sum(values) / len(values)


def aggregate(records: list[EpisodeRecord], cfg: ExperimentConfig) -> MetricsTable:
    """Fold episode records into the metrics table. Means over nodes, failed
    attempts, and plan length use only successful episodes; success counts
    and budget curves use all episodes."""
    config_ids = [cid for cid, _ in cfg.resolved_configs()]
    if cfg.experiment == "adaptability":
        config_ids = config_ids + [RANDOM_BASELINE_ID]
        table = MetricsTable(kind="adaptability")
        for task_type in sorted(cfg.task_types):
            for cid in config_ids:
                group = [
                    r for r in records if r.task_type == task_type and r.config_id == cid
                ]
                if not group:
                    continue
                correct = sum(
                    1 for r in group if r.success and r.chosen_tool == r.gt_tool
                )
                table.adapt_rows.append(AdaptRow(task_type, cid, correct, len(group)))
        return table

    table = MetricsTable(kind="summary")
    keys = sorted({(r.task_type, r.tool) for r in records})
    for task_type, tool in keys:
        for cid in config_ids:
            group = [
                r
                for r in records
                if r.task_type == task_type and r.tool == tool and r.config_id == cid
            ]
            if not group:
                continue
            wins = [r for r in group if r.success]
            table.rows.append(
                SummaryRow(
                    task=task_type,
                    tool=tool,
                    config=cid,
                    nodes_mean=_mean(r.nodes for r in wins),
                    failed_attempts_mean=_mean(r.failed_attempts for r in wins),
                    success=len(wins),
                    plan_length_mean=_mean(r.plan_length for r in wins),
                )
            )
    if cfg.budgets:
        for cid in config_ids:
            group = [r for r in records if r.config_id == cid]
            if not group:
                continue
            for budget in cfg.budgets:
                hits = sum(1 for r in group if r.success and r.failed_attempts <= budget)
                table.budget_points.append(BudgetPoint(cid, budget, hits / len(group)))
    return table


def run_experiment(cfg: ExperimentConfig, trace_dir: Path | None = None) -> MetricsTable:
    return aggregate(collect_records(cfg, trace_dir), cfg)


# -- report emission -----------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _table_rows(table: MetricsTable) -> tuple[tuple[str, ...], list[tuple[str, ...]]]:
    if table.kind == "adaptability":
        return ADAPT_HEADER, [
            (r.task, r.config, _fmt(r.correct), _fmt(r.cases)) for r in table.adapt_rows
        ]
    return SUMMARY_HEADER, [
        (
            r.task,
            r.tool,
            r.config,
            _fmt(r.nodes_mean),
            _fmt(r.failed_attempts_mean),
            _fmt(r.success),
            _fmt(r.plan_length_mean),
        )
        for r in table.rows
    ]


def _budget_rows(table: MetricsTable) -> list[tuple[str, ...]]:
    return [(p.config, _fmt(p.budget), _fmt(p.success_rate)) for p in table.budget_points]


def emit_report(table: MetricsTable, fmt: str, path) -> list[Path]:
    """Write the metrics table at *path*; budget curves, when present, land
    beside it as long-format rows in '<stem>_budgets.<ext>'. Returns the
    written paths."""
    if fmt not in ("csv", "json", "markdown"):
        raise ConfigError(f"unknown report format '{fmt}'")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header, rows = _table_rows(table)
    written = [path]

    if fmt == "json":
        payload = {
            "kind": table.kind,
            "rows": [dict(zip(header, row)) for row in rows],
            "budget_curves": [dict(zip(BUDGET_HEADER, row)) for row in _budget_rows(table)],
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return written

    def render(header_row, body_rows) -> str:
        if fmt == "csv":
            lines = [",".join(header_row)]
            lines.extend(",".join(row) for row in body_rows)
        else:
            lines = ["| " + " | ".join(header_row) + " |"]
            lines.append("|" + "|".join(" --- " for _ in header_row) + "|")
            lines.extend("| " + " | ".join(row) + " |" for row in body_rows)
        return "\n".join(lines) + "\n"

    path.write_text(render(header, rows), encoding="utf-8")
    if table.budget_points:
        ext = "md" if fmt == "markdown" else fmt
        budget_path = path.with_name(f"{path.stem}_budgets.{ext}")
        budget_path.write_text(render(BUDGET_HEADER, _budget_rows(table)), encoding="utf-8")
        written.append(budget_path)
    return written
