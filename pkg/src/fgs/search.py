"""Best-first search with object-fitness-augmented cost, plus enforced
hill-climbing.

Cost shapes per algorithm (g path cost, h heuristic, phi fitness of the
generating edge's object permutation):

    astar           f = g + h - phi          (clamped at 0)
    weighted_astar  f = g + w * (h - phi)    (clamped at 0)
    ucs             f = g, or g + (2 - phi) with feature scoring on
    ehc             f = h - phi, committed breadth-first improvement

A permutation scored -inf is recorded in the reject set (while trusted) and
its successor skipped; permutations in *exclusions* are skipped the same way
without being recorded, since they were already attempted. A known state is
re-opened exactly when a strictly cheaper path to it appears.

Ties break on (f, then h, then insertion order), so runs are reproducible.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

from .errors import ConfigError, InternalError
from .grounding import GroundAction, GroundProblem, State, goal_satisfied, successors
from .heuristics import Heuristic, make_heuristic

INF = float("inf")
NEG_INF = float("-inf")

ALGORITHMS = ("astar", "ucs", "weighted_astar", "ehc")
TIE_BREAK = "f-h-order"

STATUS_FOUND = "found"
STATUS_EXHAUSTED = "exhausted"
STATUS_BUDGET = "budget"


@dataclass
class SearchConfig:
    algorithm: str = "astar"
    heuristic: str = "zero"
    use_feature_score: bool = False
    weight: float = 5.0
    tie_break: str = TIE_BREAK
    node_budget: int | None = None

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm '{self.algorithm}' (choose from {ALGORITHMS})")
        if self.weight < 1.0:
            raise ConfigError("weighted search weight must be >= 1")
        if self.tie_break != TIE_BREAK:
            raise ConfigError(f"unsupported tie_break '{self.tie_break}'")
        if self.node_budget is not None and self.node_budget < 0:
            raise ConfigError("node_budget must be non-negative")


@dataclass
class SearchNode:
    state: State
    g: float
    h: float
    phi: float
    f: float
    parent: tuple["SearchNode", GroundAction] | None
    ctx: object = None  # heuristic path bookkeeping


@dataclass
class PlanResult:
    plan: list[GroundAction] | None
    nodes_expanded: int
    reject_set_out: frozenset
    trust_used: bool
    status: str
    g_values: dict[State, float] = field(default_factory=dict, repr=False)
    closed: tuple = ()  # states in expansion order

    @property
    def found(self) -> bool:
        return self.plan is not None


def _combined_cost(cfg: SearchConfig, g: float, h: float, phi: float) -> float:
    if cfg.algorithm == "astar":
        return max(0.0, g + h - phi)
    if cfg.algorithm == "weighted_astar":
        return max(0.0, g + cfg.weight * (h - phi))
    if cfg.use_feature_score:  # feature-guided uniform cost
        return g + (2.0 - phi)
    return g


def search(
    gp: GroundProblem,
    cfg: SearchConfig,
    scorer=None,
    trust: bool = True,
    exclusions: frozenset = frozenset(),
    heuristic: Heuristic | None = None,
    succ_cache: dict | None = None,
) -> PlanResult:
    """Run one search over *gp*. The scorer is a callback
    (state, action_name, o_a, trust) -> float, required when feature
    scoring is on. Exclusions are object permutations never to revisit."""
    cfg.validate()
    if cfg.algorithm == "ehc":
        return search_ehc(gp, cfg, scorer, trust, exclusions, heuristic, succ_cache)
    if cfg.use_feature_score and scorer is None:
        raise ConfigError("feature scoring enabled but no scorer provided")

    needs_h = cfg.algorithm in ("astar", "weighted_astar")
    if needs_h and heuristic is None:
        heuristic = make_heuristic(cfg.heuristic, gp)

    reject_out: set = set()
    expanded = 0
    closed: list[State] = []
    init = gp.init
    if needs_h:
        h0, ctx0 = heuristic.evaluate(init, None)
    else:
        h0, ctx0 = 0.0, None
    best_g: dict[State, float] = {init: 0.0}
    if h0 == INF:
        return PlanResult(None, 0, frozenset(), trust, STATUS_EXHAUSTED, best_g, ())

    root = SearchNode(init, 0.0, h0, 0.0, _combined_cost(cfg, 0.0, h0, 0.0), None, ctx0)
    seq = 0
    heap: list[tuple] = [(root.f, root.h, seq, root)]
    while heap:
        _, _, _, node = heapq.heappop(heap)
        if node.g > best_g.get(node.state, INF):
            continue  # superseded by a cheaper path
        if goal_satisfied(node.state, gp):
            plan = extract_plan(node, gp)
            return PlanResult(
                plan, expanded, frozenset(reject_out), trust, STATUS_FOUND, best_g, tuple(closed)
            )
        if cfg.node_budget is not None and expanded >= cfg.node_budget:
            return PlanResult(
                None, expanded, frozenset(reject_out), trust, STATUS_BUDGET, best_g, tuple(closed)
            )
        expanded += 1
        closed.append(node.state)
        for action_idx, succ in successors(gp, node.state, succ_cache):
            act = gp.actions[action_idx]
            g2 = node.g + act.base_cost
            if g2 >= best_g.get(succ, INF):
                continue
            best_g[succ] = g2  # recorded before the feature gate, as in the transition rule
            phi = 0.0
            if act.o_a:
                if act.o_a in exclusions:
                    continue  # already attempted; rejected without re-recording
                if cfg.use_feature_score:
                    phi = scorer(node.state, act.schema_name, act.o_a, trust)
                    if phi == NEG_INF:
                        if trust:
                            reject_out.add((act.o_a, act.schema_name))
                        continue
            if needs_h:
                h2, ctx2 = heuristic.evaluate(succ, node.ctx)
            else:
                h2, ctx2 = 0.0, None
            f2 = _combined_cost(cfg, g2, h2, phi)
            if f2 == INF:
                continue
            seq += 1
            child = SearchNode(succ, g2, h2, phi, f2, (node, act), ctx2)
            heapq.heappush(heap, (f2, h2, seq, child))
    return PlanResult(
        None, expanded, frozenset(reject_out), trust, STATUS_EXHAUSTED, best_g, tuple(closed)
    )


def search_ehc(
    gp: GroundProblem,
    cfg: SearchConfig,
    scorer=None,
    trust: bool = True,
    exclusions: frozenset = frozenset(),
    heuristic: Heuristic | None = None,
    succ_cache: dict | None = None,
) -> PlanResult:
    """Enforced hill-climbing: breadth-first search from the current state
    until an expansion yields strictly better f = h - phi, commit to the
    best such successor, repeat. Fails when a plateau has no improving
    descendant. Committing to the lowest-f improver (rather than whichever
    improving state is generated first) is what lets the feature term steer
    which objects get joined."""
    cfg.validate()
    if cfg.use_feature_score and scorer is None:
        raise ConfigError("feature scoring enabled but no scorer provided")
    if heuristic is None:
        heuristic = make_heuristic(cfg.heuristic, gp)

    reject_out: set = set()
    expanded = 0
    state = gp.init
    h0, ctx = heuristic.evaluate(state, None)
    if h0 == INF:
        return PlanResult(None, 0, frozenset(), trust, STATUS_EXHAUSTED)
    f_cur = h0  # the root has no generating edge, hence no feature term
    plan: list[GroundAction] = []

    while not goal_satisfied(state, gp):
        committed = None
        queue = deque([(state, ctx, ())])
        seen = {state}
        while queue and committed is None:
            s, c, path = queue.popleft()
            if cfg.node_budget is not None and expanded >= cfg.node_budget:
                return PlanResult(None, expanded, frozenset(reject_out), trust, STATUS_BUDGET)
            expanded += 1
            best = None  # lowest-f improving successor of this expansion
            for action_idx, succ in successors(gp, s, succ_cache):
                if succ in seen:
                    continue
                act = gp.actions[action_idx]
                phi = 0.0
                if act.o_a:
                    if act.o_a in exclusions:
                        continue
                    if cfg.use_feature_score:
                        phi = scorer(s, act.schema_name, act.o_a, trust)
                        if phi == NEG_INF:
                            if trust:
                                reject_out.add((act.o_a, act.schema_name))
                            continue
                h2, c2 = heuristic.evaluate(succ, c)
                if h2 == INF:
                    continue
                seen.add(succ)
                f2 = h2 - phi
                step = path + ((act, succ, c2),)
                if goal_satisfied(succ, gp):
                    best = (0.0 - phi, succ, c2, step)
                    break
                if f2 < f_cur and (best is None or f2 < best[0]):
                    best = (f2, succ, c2, step)
                elif f2 >= f_cur:
                    queue.append((succ, c2, step))
            if best is not None:
                committed = best
        if committed is None:
            return PlanResult(None, expanded, frozenset(reject_out), trust, STATUS_EXHAUSTED)
        f_cur, state, ctx, step = committed
        plan.extend(act for act, _, _ in step)

    _simulate(plan, gp)
    return PlanResult(plan, expanded, frozenset(reject_out), trust, STATUS_FOUND)


def extract_plan(goal_node: SearchNode, gp: GroundProblem) -> list[GroundAction]:
    """Reverse the parent chain and re-simulate it as a validity check."""
    actions: list[GroundAction] = []
    node = goal_node
    while node.parent is not None:
        parent, act = node.parent
        actions.append(act)
        node = parent
    actions.reverse()
    if node.state != gp.init:
        raise InternalError("plan parent chain does not reach the initial state")
    _simulate(actions, gp)
    return actions


def _simulate(plan, gp: GroundProblem) -> State:
    state = gp.init
    for act in plan:
        if not (act.pre_pos <= state and not (act.pre_neg & state)):
            raise InternalError(f"extracted plan is invalid at {act.name}")
        state = (state - act.dels) | act.adds
    if not goal_satisfied(state, gp):
        raise InternalError("extracted plan does not reach the goal")
    return state
