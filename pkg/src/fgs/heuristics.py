"""Domain-independent heuristics over the grounded model.

All estimates work on the delete relaxation: negative preconditions and
negative goal literals are treated as satisfied, which keeps h_max a lower
bound on true cost. Unit action costs throughout.

The landmark heuristic counts discovered-but-unachieved landmarks plus goal
landmarks that were achieved and then undone (required again); landmark
bookkeeping travels along the search path via an opaque context value.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError
from .grounding import GroundProblem, State

INF = float("inf")


class Heuristic:
    """Estimate interface: evaluate(state, parent_ctx) -> (value, ctx).

    parent_ctx is None for a search root; stateless heuristics return None
    as their context.
    """

    name = "base"

    def __init__(self, gp: GroundProblem):
        self.gp = gp

    def evaluate(self, state: State, parent_ctx=None):
        raise NotImplementedError


class ZeroHeuristic(Heuristic):
    name = "zero"

    def evaluate(self, state, parent_ctx=None):
        return 0.0, None


class _RelaxationHeuristic(Heuristic):
    """Fixpoint cost propagation in the delete relaxation."""

    combine = None  # max or sum over precondition costs

    def __init__(self, gp: GroundProblem):
        super().__init__(gp)
        self._cache: dict[State, float] = {}

    def evaluate(self, state, parent_ctx=None):
        h = self._cache.get(state)
        if h is None:
            h = self._propagate(state)
            self._cache[state] = h
        return h, None

    def _propagate(self, state: State) -> float:
        costs = {atom: 0.0 for atom in state}
        actions = self.gp.actions
        changed = True
        while changed:
            changed = False
            for act in actions:
                pre = act.pre_pos
                if not pre <= costs.keys():
                    continue
                base = self.combine(costs[p] for p in pre) if pre else 0.0
                new = base + act.base_cost
                for f in act.adds:
                    if costs.get(f, INF) > new:
                        costs[f] = new
                        changed = True
        goal = self.gp.goal_pos
        if not goal:
            return 0.0
        if not goal <= costs.keys():
            return INF
        return self.combine(costs[g] for g in goal)


class MaxHeuristic(_RelaxationHeuristic):
    name = "hmax"
    combine = staticmethod(max)


class AddHeuristic(_RelaxationHeuristic):
    name = "hadd"
    combine = staticmethod(sum)


@dataclass
class RelaxedPlanningGraph:
    """Leveled delete-relaxed graph: cumulative fact/action layers plus the
    first level of each fact and action."""

    fact_layers: list[frozenset[int]]
    action_layers: list[frozenset[int]]
    fact_level: dict[int, int]
    action_level: dict[int, int]


def build_rpg(gp: GroundProblem, state: State) -> RelaxedPlanningGraph:
    """Grow fact/action layers until the goal appears or a fixpoint."""
    fact_level: dict[int, int] = {f: 0 for f in state}
    action_level: dict[int, int] = {}
    facts = set(state)
    fact_layers = [frozenset(facts)]
    action_layers: list[frozenset[int]] = []
    level = 0
    while True:
        if gp.goal_pos <= facts:
            break
        new_actions = []
        for idx, act in enumerate(gp.actions):
            if idx in action_level:
                continue
            if act.pre_pos <= facts:
                action_level[idx] = level
                new_actions.append(idx)
        action_layers.append(frozenset(a for a, lv in action_level.items() if lv <= level))
        grew = False
        for idx in new_actions:
            for f in gp.actions[idx].adds:
                if f not in fact_level:
                    fact_level[f] = level + 1
                    facts.add(f)
                    grew = True
        fact_layers.append(frozenset(facts))
        level += 1
        if not grew:
            break
    return RelaxedPlanningGraph(fact_layers, action_layers, fact_level, action_level)


class FFHeuristic(Heuristic):
    """Length of a greedily extracted relaxed plan, or inf when the goal is
    unreachable even with deletes ignored."""

    name = "ff"

    def __init__(self, gp: GroundProblem):
        super().__init__(gp)
        self._cache: dict[State, float] = {}

    def evaluate(self, state, parent_ctx=None):
        h = self._cache.get(state)
        if h is None:
            h = self._ff(state)
            self._cache[state] = h
        return h, None

    def _ff(self, state: State) -> float:
        gp = self.gp
        if gp.goal_pos <= state:
            return 0.0
        rpg = build_rpg(gp, state)
        if not gp.goal_pos <= rpg.fact_level.keys():
            return INF
        max_level = max(rpg.fact_level[g] for g in gp.goal_pos)
        needed: dict[int, set[int]] = {lv: set() for lv in range(max_level + 1)}
        for g in gp.goal_pos:
            needed[rpg.fact_level[g]].add(g)
        chosen: set[int] = set()
        satisfied: set[int] = set(state)
        for level in range(max_level, 0, -1):
            for fact in sorted(needed[level]):
                if fact in satisfied:
                    continue
                supporter = self._pick_supporter(fact, level, rpg)
                if supporter in chosen:
                    satisfied.update(gp.actions[supporter].adds)
                    continue
                chosen.add(supporter)
                satisfied.update(gp.actions[supporter].adds)
                for p in gp.actions[supporter].pre_pos:
                    lv = rpg.fact_level[p]
                    if lv > 0 and p not in satisfied:
                        needed[lv].add(p)
        return float(len(chosen))

    def _pick_supporter(self, fact: int, level: int, rpg: RelaxedPlanningGraph) -> int:
        # Ties broken by the earliest precondition levels, then action index.
        best = None
        best_key = None
        for idx, act in enumerate(self.gp.actions):
            if fact not in act.adds or rpg.action_level.get(idx) != level - 1:
                continue
            depth = max((rpg.fact_level[p] for p in act.pre_pos), default=0)
            key = (depth, idx)
            if best_key is None or key < best_key:
                best, best_key = idx, key
        if best is None:  # supporter one level earlier cannot be missing
            raise ConfigError(f"relaxed graph has no supporter for atom {fact}")
        return best


@dataclass(frozen=True)
class LandmarkSet:
    """Atoms every delete-relaxed plan must achieve (initial-state facts are
    excluded since they need no achieving)."""

    landmarks: frozenset[int]
    goal_landmarks: frozenset[int]


def _relaxed_reachable_without(gp: GroundProblem, banned: int) -> frozenset[int]:
    """Relaxed reachability when *banned* is struck from every add list."""
    facts = set(gp.init)
    used = [False] * len(gp.actions)
    changed = True
    while changed:
        changed = False
        for idx, act in enumerate(gp.actions):
            if used[idx] or not act.pre_pos <= facts:
                continue
            used[idx] = True
            new = (act.adds - {banned}) - facts
            if new:
                facts |= new
                changed = True
    return frozenset(facts)


def discover_landmarks(gp: GroundProblem) -> LandmarkSet:
    """Backchain from the goal: if every possible first achiever of a known
    landmark shares a precondition, that precondition is a landmark too."""
    landmarks: set[int] = set()
    queue = [g for g in sorted(gp.goal_pos) if g not in gp.init]
    landmarks.update(queue)
    while queue:
        lm = queue.pop(0)
        reached = _relaxed_reachable_without(gp, lm)
        achiever_pres = [
            act.pre_pos
            for act in gp.actions
            if lm in act.adds and act.pre_pos <= reached
        ]
        if not achiever_pres:
            continue
        common = frozenset.intersection(*achiever_pres)
        for p in sorted(common):
            if p not in gp.init and p not in landmarks:
                landmarks.add(p)
                queue.append(p)
    lm_frozen = frozenset(landmarks)
    return LandmarkSet(lm_frozen, lm_frozen & gp.goal_pos)


class LandmarkCountHeuristic(Heuristic):
    name = "landmarks"

    def __init__(self, gp: GroundProblem, landmark_set: LandmarkSet | None = None):
        super().__init__(gp)
        self.landmark_set = landmark_set or discover_landmarks(gp)

    def evaluate(self, state, parent_ctx=None):
        lms = self.landmark_set.landmarks
        achieved_now = lms & state
        accepted = achieved_now if parent_ctx is None else parent_ctx | achieved_now
        required_again = (accepted & self.landmark_set.goal_landmarks) - state
        h = len(lms) - len(accepted) + len(required_again)
        return float(h), accepted


_HEURISTICS = {
    "zero": ZeroHeuristic,
    "hmax": MaxHeuristic,
    "hadd": AddHeuristic,
    "ff": FFHeuristic,
    "landmarks": LandmarkCountHeuristic,
}

HEURISTIC_NAMES = tuple(sorted(_HEURISTICS))


def make_heuristic(name: str, gp: GroundProblem) -> Heuristic:
    cls = _HEURISTICS.get(name)
    if cls is None:
        raise ConfigError(f"unknown heuristic '{name}' (choose from {', '.join(HEURISTIC_NAMES)})")
    return cls(gp)
