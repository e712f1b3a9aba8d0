"""Shared helpers: tiny model builders and brute-force search oracles."""

from __future__ import annotations

import random
from collections import deque

from fgs.grounding import GroundAction, GroundProblem, State, goal_satisfied, successors


def make_ground_problem(atoms, actions, init, goal_pos, goal_neg=()):
    """Build a GroundProblem straight from atom names.

    actions: list of (name, pre_pos, pre_neg, adds, dels, o_a) with atom
    names; o_a optional.
    """
    atoms = tuple(sorted(atoms))
    ids = {name: i for i, name in enumerate(atoms)}

    def to_ids(names):
        return frozenset(ids[n] for n in names)

    ground_actions = []
    for entry in actions:
        name, pre_pos, pre_neg, adds, dels = entry[:5]
        o_a = tuple(entry[5]) if len(entry) > 5 else ()
        ground_actions.append(
            GroundAction(
                name=f"({name})",
                schema_name=name,
                bound_objects=(),
                o_a=o_a,
                pre_pos=to_ids(pre_pos),
                pre_neg=to_ids(pre_neg),
                adds=to_ids(adds),
                dels=to_ids(dels),
            )
        )
    atom_tuples = tuple((a,) for a in atoms)
    return GroundProblem(
        atoms=atom_tuples,
        atom_ids={t: i for i, t in enumerate(atom_tuples)},
        actions=tuple(ground_actions),
        init=to_ids(init),
        goal_pos=to_ids(goal_pos),
        goal_neg=to_ids(goal_neg),
    )


def chain_problem(n):
    """Serial chain: step i enables step i+1; goal is the last fact."""
    atoms = [f"s{i}" for i in range(n + 1)]
    actions = [(f"adv{i}", [f"s{i}"], [], [f"s{i+1}"], []) for i in range(n)]
    return make_ground_problem(atoms, actions, ["s0"], [f"s{n}"])


def bfs_optimal_length(gp: GroundProblem) -> int | None:
    """Breadth-first oracle: optimal plan length, or None if unsolvable."""
    if goal_satisfied(gp.init, gp):
        return 0
    seen = {gp.init}
    frontier = deque([(gp.init, 0)])
    while frontier:
        state, depth = frontier.popleft()
        for _, succ in successors(gp, state):
            if succ in seen:
                continue
            if goal_satisfied(succ, gp):
                return depth + 1
            seen.add(succ)
            frontier.append((succ, depth + 1))
    return None


def dijkstra_distances(gp: GroundProblem) -> dict[State, int]:
    """Unit-cost shortest path distance from the initial state to every
    reachable state."""
    dist = {gp.init: 0}
    frontier = deque([gp.init])
    while frontier:
        state = frontier.popleft()
        d = dist[state]
        for _, succ in successors(gp, state):
            if succ not in dist:
                dist[succ] = d + 1
                frontier.append(succ)
    return dist


def random_model(rng: random.Random, n_atoms=8, n_actions=14):
    """A random solvable STRIPS model with a goal sampled from a reachable
    state, so the BFS oracle always terminates with a plan."""
    while True:
        atoms = [f"a{i}" for i in range(n_atoms)]
        actions = []
        for i in range(n_actions):
            pre_pos = rng.sample(atoms, rng.randint(0, 2))
            rest = [a for a in atoms if a not in pre_pos]
            pre_neg = rng.sample(rest, rng.randint(0, 1))
            adds = rng.sample(atoms, rng.randint(1, 2))
            dels = rng.sample([a for a in atoms if a not in adds], rng.randint(0, 2))
            actions.append((f"act{i}", pre_pos, pre_neg, adds, dels))
        init = rng.sample(atoms, rng.randint(1, 3))
        gp = make_ground_problem(atoms, actions, init, [])
        # walk a few random steps to pick a genuinely reachable goal
        state = gp.init
        for _ in range(rng.randint(1, 6)):
            succs = successors(gp, state)
            if not succs:
                break
            _, state = rng.choice(succs)
        goal_atoms = [gp.atoms[i][0] for i in state]
        if not goal_atoms:
            continue
        goal = rng.sample(goal_atoms, min(len(goal_atoms), rng.randint(1, 3)))
        gp = make_ground_problem(atoms, actions, init, goal)
        if bfs_optimal_length(gp) is not None:
            return gp
