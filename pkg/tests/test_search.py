import random

import pytest

from fgs.errors import ConfigError
from fgs.grounding import goal_satisfied
from fgs.scoring import NEG_INF
from fgs.search import (
    STATUS_BUDGET,
    STATUS_EXHAUSTED,
    STATUS_FOUND,
    PlanResult,
    SearchConfig,
    search,
    search_ehc,
)

from .util import bfs_optimal_length, chain_problem, dijkstra_distances, make_ground_problem, random_model


def simulate(gp, plan):
    state = gp.init
    for act in plan:
        assert act.pre_pos <= state and not (act.pre_neg & state)
        state = (state - act.dels) | act.adds
    return state


def test_goal_at_init_expands_nothing():
    gp = make_ground_problem(["p"], [("a", [], [], ["p"], [])], ["p"], ["p"])
    result = search(gp, SearchConfig())
    assert result.status == STATUS_FOUND
    assert result.plan == []
    assert result.nodes_expanded == 0


def test_three_step_chain_matches_bfs():
    gp = chain_problem(3)
    for heuristic in ("zero", "hmax"):
        result = search(gp, SearchConfig(algorithm="astar", heuristic=heuristic))
        assert result.found
        assert len(result.plan) == 3 == bfs_optimal_length(gp)


def test_plans_optimal_on_random_models():
    rng = random.Random(11)
    for _ in range(25):
        gp = random_model(rng)
        opt = bfs_optimal_length(gp)
        for algorithm, heuristic in (("astar", "hmax"), ("astar", "zero"), ("ucs", "zero")):
            result = search(gp, SearchConfig(algorithm=algorithm, heuristic=heuristic))
            assert result.found
            assert len(result.plan) == opt
            assert goal_satisfied(simulate(gp, result.plan), gp)


def test_closed_g_matches_dijkstra():
    rng = random.Random(12)
    for _ in range(10):
        gp = random_model(rng)
        dist = dijkstra_distances(gp)
        result = search(gp, SearchConfig(algorithm="ucs"))
        for state in result.closed:
            assert result.g_values[state] == dist[state]


def test_unsolvable_exhausts():
    gp = make_ground_problem(["p", "g"], [("a", [], [], ["p"], [])], [], ["g"])
    result = search(gp, SearchConfig(algorithm="ucs"))
    assert result.status == STATUS_EXHAUSTED
    assert result.plan is None


def test_budget_exhaustion_distinguished():
    gp = chain_problem(30)
    result = search(gp, SearchConfig(algorithm="ucs", node_budget=5))
    assert result.status == STATUS_BUDGET
    assert result.nodes_expanded <= 5
    full = search(gp, SearchConfig(algorithm="ucs"))
    assert full.status == STATUS_FOUND


def join_fanout_problem(phis):
    """Gate state with one join per entry in *phis*; joins are mutually
    exclusive and each leads to a one-step suffix reaching the goal."""
    atoms = ["start", "gate", "goal", "has-tool"] + [f"joined{i}" for i in range(len(phis))]
    actions = [("prep", ["start"], [], ["gate"], [])]
    for i in range(len(phis)):
        actions.append(
            (f"join{i}", ["gate"], ["has-tool"], ["has-tool", f"joined{i}"], [], (f"x{i}", f"y{i}"))
        )
        actions.append((f"use{i}", [f"joined{i}"], [], ["goal"], []))
    return make_ground_problem(atoms, actions, ["start"], ["goal"])


def scorer_from_table(table):
    def scorer(state, action_name, o_a, trust):
        return table[o_a]

    return scorer


def test_higher_phi_join_wins_at_equal_g_plus_h():
    gp = join_fanout_problem([0.3, 1.8])
    table = {("x0", "y0"): 0.3, ("x1", "y1"): 1.8}
    cfg = SearchConfig(algorithm="astar", heuristic="zero", use_feature_score=True)
    result = search(gp, cfg, scorer=scorer_from_table(table))
    assert result.found
    assert any(a.schema_name == "join1" for a in result.plan)
    # exhaustive check: both joins reach the goal in the same number of steps
    assert bfs_optimal_length(gp) == len(result.plan)


def test_join_expansion_order_follows_phi():
    phis = [0.2, 1.9, 0.7, 1.1, 1.5]
    gp = join_fanout_problem(phis)
    table = {(f"x{i}", f"y{i}"): phi for i, phi in enumerate(phis)}
    cfg = SearchConfig(algorithm="ucs", use_feature_score=True)
    result = search(gp, cfg, scorer=scorer_from_table(table))
    # joined-states must first reach expansion in non-increasing phi order
    seen_phis = []
    for state in result.closed:
        for i in range(len(phis)):
            if gp.atom_ids[(f"joined{i}",)] in state:
                seen_phis.append(phis[i])
    assert len(seen_phis) >= 2
    assert sorted(seen_phis, reverse=True) == seen_phis


def test_rejected_combination_recorded_and_skipped():
    gp = join_fanout_problem([0.5, 0.9])
    table = {("x0", "y0"): NEG_INF, ("x1", "y1"): 0.9}
    cfg = SearchConfig(algorithm="astar", heuristic="zero", use_feature_score=True)
    result = search(gp, cfg, scorer=scorer_from_table(table))
    assert result.found
    assert result.reject_set_out == frozenset({(("x0", "y0"), "join0")})
    assert all(a.schema_name != "join0" for a in result.plan)


def test_rejects_not_recorded_without_trust():
    gp = join_fanout_problem([0.5])
    table = {("x0", "y0"): NEG_INF}
    cfg = SearchConfig(algorithm="astar", heuristic="zero", use_feature_score=True)
    result = search(gp, cfg, scorer=scorer_from_table(table), trust=False)
    assert result.status == STATUS_EXHAUSTED
    assert result.reject_set_out == frozenset()


def test_exclusions_skipped_without_rerecording():
    gp = join_fanout_problem([0.5, 0.9])
    table = {("x0", "y0"): 0.5, ("x1", "y1"): 0.9}
    cfg = SearchConfig(algorithm="astar", heuristic="zero", use_feature_score=True)
    result = search(
        gp, cfg, scorer=scorer_from_table(table), exclusions=frozenset({("x1", "y1")})
    )
    assert result.found
    assert any(a.schema_name == "join0" for a in result.plan)
    assert result.reject_set_out == frozenset()


def test_exclusions_apply_with_features_off():
    gp = join_fanout_problem([0.5, 0.9])
    cfg = SearchConfig(algorithm="ucs")
    result = search(gp, cfg, exclusions=frozenset({("x0", "y0")}))
    assert result.found
    assert any(a.schema_name == "join1" for a in result.plan)


def test_all_joins_rejected_fails_with_reject_set():
    gp = join_fanout_problem([0.5, 0.9])
    table = {("x0", "y0"): NEG_INF, ("x1", "y1"): NEG_INF}
    cfg = SearchConfig(algorithm="astar", heuristic="zero", use_feature_score=True)
    result = search(gp, cfg, scorer=scorer_from_table(table))
    assert result.status == STATUS_EXHAUSTED
    assert len(result.reject_set_out) == 2


def test_weighted_astar_valid_and_uses_weight():
    rng = random.Random(13)
    for _ in range(10):
        gp = random_model(rng)
        opt = bfs_optimal_length(gp)
        result = search(gp, SearchConfig(algorithm="weighted_astar", heuristic="ff", weight=5.0))
        assert result.found
        assert len(result.plan) >= opt
        assert goal_satisfied(simulate(gp, result.plan), gp)


def test_feature_scoring_requires_scorer():
    gp = chain_problem(2)
    with pytest.raises(ConfigError, match="scorer"):
        search(gp, SearchConfig(use_feature_score=True))


def test_config_validation():
    with pytest.raises(ConfigError):
        SearchConfig(algorithm="dfs").validate()
    with pytest.raises(ConfigError):
        SearchConfig(weight=0.5).validate()
    with pytest.raises(ConfigError):
        SearchConfig(tie_break="random").validate()


def test_determinism_bitwise():
    rng = random.Random(21)
    gp = random_model(rng)
    cfg = SearchConfig(algorithm="astar", heuristic="hadd")
    a = search(gp, cfg)
    b = search(gp, cfg)
    assert [x.name for x in a.plan] == [x.name for x in b.plan]
    assert a.nodes_expanded == b.nodes_expanded
    assert a.g_values == b.g_values


# -- enforced hill-climbing ----------------------------------------------------


def test_ehc_monotone_chain():
    gp = chain_problem(5)
    result = search_ehc(gp, SearchConfig(algorithm="ehc", heuristic="ff"))
    assert result.found
    assert len(result.plan) == 5
    # each commit expands roughly one state along the chain
    assert result.nodes_expanded <= 2 * 5 + 2


def test_ehc_dead_end_fails():
    # h improves into a trap: grab reaches a state with no successors
    gp = make_ground_problem(
        ["s", "mid", "g"],
        [
            ("trap", ["s"], [], ["mid"], ["s"]),
            ("out", ["mid"], ["mid"], ["g"], []),  # contradictory: never applicable
        ],
        ["s"],
        ["g"],
    )
    result = search_ehc(gp, SearchConfig(algorithm="ehc", heuristic="hadd"))
    assert result.status == STATUS_EXHAUSTED


def test_ehc_goal_at_init():
    gp = make_ground_problem(["p"], [("a", [], [], ["p"], [])], ["p"], ["p"])
    result = search_ehc(gp, SearchConfig(algorithm="ehc", heuristic="ff"))
    assert result.plan == []
    assert result.nodes_expanded == 0


def test_ehc_phi_boost_commits_first():
    # with h = 0 nothing improves on its own; only the boosted join drops
    # below the current f and gets committed
    gp = join_fanout_problem([0.0, 1.4])
    table = {("x0", "y0"): 0.0, ("x1", "y1"): 1.4}
    cfg = SearchConfig(algorithm="ehc", heuristic="zero", use_feature_score=True)
    result = search_ehc(gp, cfg, scorer=scorer_from_table(table))
    assert result.found
    assert any(a.schema_name == "join1" for a in result.plan)
    assert all(a.schema_name != "join0" for a in result.plan)


def test_ehc_via_search_dispatch():
    gp = chain_problem(2)
    result = search(gp, SearchConfig(algorithm="ehc", heuristic="ff"))
    assert isinstance(result, PlanResult)
    assert result.found


def test_ehc_budget():
    gp = chain_problem(40)
    result = search_ehc(gp, SearchConfig(algorithm="ehc", heuristic="zero", node_budget=3))
    assert result.status == STATUS_BUDGET
    assert result.nodes_expanded <= 3
