"""Grounding a typed STRIPS domain/problem into a propositional model.

States are frozensets of atom indices. Atom indexing is lexicographic over
the atom tuples, so two runs over the same inputs produce bit-identical
models. Object parameters of join actions must bind distinct objects (an
ordered permutation); other parameters may repeat freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import GroundingError
from .pddl import Atom, DomainDef, Literal, ProblemDef

State = frozenset[int]

DEFAULT_MAX_GROUND_ACTIONS = 200_000


@dataclass(frozen=True)
class GroundAction:
    name: str  # pretty form: "(schema obj ...)"
    schema_name: str
    bound_objects: tuple[str, ...]
    o_a: tuple[str, ...]  # ordered object permutation; empty for non-tool actions
    pre_pos: frozenset[int]
    pre_neg: frozenset[int]
    adds: frozenset[int]
    dels: frozenset[int]
    base_cost: int = 1


@dataclass(frozen=True)
class GroundProblem:
    atoms: tuple[Atom, ...]
    atom_ids: dict[Atom, int] = field(compare=False)
    actions: tuple[GroundAction, ...] = ()
    init: State = frozenset()
    goal_pos: frozenset[int] = frozenset()
    goal_neg: frozenset[int] = frozenset()

    def atom_name(self, idx: int) -> str:
        return "(" + " ".join(self.atoms[idx]) + ")"

    def state_atoms(self, state: State) -> frozenset[Atom]:
        return frozenset(self.atoms[i] for i in state)


def applicable(state: State, action: GroundAction) -> bool:
    return action.pre_pos <= state and not (action.pre_neg & state)


def apply_action(state: State, action: GroundAction) -> State:
    """Transition function; the caller must ensure applicability."""
    if not applicable(state, action):
        raise GroundingError(f"action {action.name} is not applicable in this state")
    return (state - action.dels) | action.adds


def goal_satisfied(state: State, gp: GroundProblem) -> bool:
    return gp.goal_pos <= state and not (gp.goal_neg & state)


def successors(gp: GroundProblem, state: State, cache: dict | None = None):
    """All (action_index, next_state) pairs, in action-index order.

    An optional cache dict may be shared by searches over the same problem;
    it stores raw successors with no search-specific filtering.
    """
    if cache is not None:
        hit = cache.get(state)
        if hit is not None:
            return hit
    out = []
    for idx, act in enumerate(gp.actions):
        if act.pre_pos <= state and not (act.pre_neg & state):
            out.append((idx, (state - act.dels) | act.adds))
    if cache is not None:
        cache[state] = out
    return out


def _bind(lit: Literal, binding: dict[str, str]) -> Atom:
    return (lit.predicate, *(binding[a] for a in lit.args))


def ground(
    domain: DomainDef,
    problem: ProblemDef,
    *,
    prune_static: bool = True,
    max_ground_actions: int = DEFAULT_MAX_GROUND_ACTIONS,
) -> GroundProblem:
    """Enumerate all type-consistent ground actions and index the atoms.

    Static pruning drops actions whose static preconditions can never hold
    and strips always-satisfied static conditions; it never changes the
    reachable state space. The explosion guard raises once the total count
    passes *max_ground_actions*, naming the schema with the most groundings.
    """
    objects_by_type: dict[str, list[str]] = {"object": []}
    for obj, typ in problem.objects:
        objects_by_type.setdefault(typ, []).append(obj)
        objects_by_type["object"].append(obj)

    fluent_preds = {
        lit.predicate
        for schema in domain.action_schemas
        for lit in (*schema.add_effects, *schema.del_effects)
    }

    def is_static(pred: str) -> bool:
        return pred not in fluent_preds

    init_atoms = set(problem.init)
    raw: list[tuple] = []  # (schema, binding tuple)
    per_schema: dict[str, int] = {}
    total = 0
    for schema in domain.action_schemas:
        domains = [objects_by_type.get(typ, []) for _, typ in schema.params]
        count = 0
        for combo in product(*domains):
            if schema.object_param_indices:
                picked = [combo[i] for i in schema.object_param_indices]
                if len(set(picked)) != len(picked):
                    continue
            raw.append((schema, combo))
            count += 1
            total += 1
            if total > max_ground_actions:
                worst = max(per_schema, key=per_schema.get, default=schema.name)
                if per_schema.get(worst, 0) < count:
                    worst = schema.name
                raise GroundingError(
                    f"ground action count exceeds {max_ground_actions}; "
                    f"worst schema: '{worst}'"
                )
        per_schema[schema.name] = count

    actions: list[GroundAction] = []
    for schema, combo in raw:
        binding = {var: obj for (var, _), obj in zip(schema.params, combo)}
        pre_pos_atoms, pre_neg_atoms = [], []
        skip = False
        for lit in schema.preconditions:
            atom = _bind(lit, binding)
            static = is_static(lit.predicate)
            if lit.negated:
                if prune_static and static:
                    if atom in init_atoms:
                        skip = True  # statically false forever
                        break
                    continue  # statically true forever
                pre_neg_atoms.append(atom)
            else:
                if prune_static and static:
                    if atom not in init_atoms:
                        skip = True
                        break
                    continue
                pre_pos_atoms.append(atom)
        if skip:
            continue
        adds = {_bind(lit, binding) for lit in schema.add_effects}
        dels = {_bind(lit, binding) for lit in schema.del_effects}
        overlap = adds & dels
        if overlap:
            raise GroundingError(
                f"schema '{schema.name}' grounds to overlapping add/delete effects "
                f"for {combo}: {sorted(overlap)}"
            )
        o_a = tuple(combo[i] for i in schema.object_param_indices)
        actions.append(
            _ProtoAction(schema.name, combo, o_a, pre_pos_atoms, pre_neg_atoms, adds, dels)
        )

    universe: set[Atom] = set(problem.init)
    universe.update(lit.atom() for lit in problem.goal)
    for act in actions:
        universe.update(act.pre_pos)
        universe.update(act.pre_neg)
        universe.update(act.adds)
        universe.update(act.dels)
    atoms = tuple(sorted(universe))
    atom_ids = {atom: i for i, atom in enumerate(atoms)}

    def ids(atoms_iter) -> frozenset[int]:
        return frozenset(atom_ids[a] for a in atoms_iter)

    ground_actions = tuple(
        GroundAction(
            name="(" + " ".join((act.schema_name, *act.bound_objects)) + ")",
            schema_name=act.schema_name,
            bound_objects=tuple(act.bound_objects),
            o_a=act.o_a,
            pre_pos=ids(act.pre_pos),
            pre_neg=ids(act.pre_neg),
            adds=ids(act.adds),
            dels=ids(act.dels),
        )
        for act in actions
    )
    goal_pos = ids(lit.atom() for lit in problem.goal if not lit.negated)
    goal_neg = ids(lit.atom() for lit in problem.goal if lit.negated)
    return GroundProblem(
        atoms=atoms,
        atom_ids=atom_ids,
        actions=ground_actions,
        init=ids(problem.init),
        goal_pos=goal_pos,
        goal_neg=goal_neg,
    )


@dataclass
class _ProtoAction:
    schema_name: str
    bound_objects: tuple
    o_a: tuple
    pre_pos: list
    pre_neg: list
    adds: set
    dels: set
