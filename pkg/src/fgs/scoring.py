"""Object-fitness scoring for join actions.

A join action consumes an ordered pair of objects (action part, grasp part).
Its score combines shape fitness (soft, a product of per-role confidences),
material fitness (hard, thresholded on the action part), and attachment
feasibility (hard: pierce, grasp, or magnetic). Under full sensor trust all
three apply; with trust withdrawn, only previously rejected combinations are
re-scored, by shape alone.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import ConfigError, ValidationError

log = logging.getLogger(__name__)

NEG_INF = float("-inf")

MATERIAL_CLASSES = ("metal", "wood", "plastic", "paper", "foam")

ATTACH_PIERCE = "pierce"
ATTACH_GRASP = "grasp"
ATTACH_MAGNETIC = "magnetic"


@dataclass(frozen=True)
class ObjectProfile:
    """Perception outputs for one candidate object.

    Confidences are network outputs in [0, 1]; the material distribution
    sums to at most 1. Capability flags stand in for the pierce / grasp /
    magnet predictors.
    """

    object_id: str
    shape_conf: dict[str, float] = field(default_factory=dict)
    material_conf: dict[str, float] = field(default_factory=dict)
    pierceable: bool = False
    can_grasp_others: bool = False
    can_be_grasped: bool = False
    has_magnet: bool = False

    def validate(self, known_roles: set[str] | None = None, where: str = "") -> None:
        prefix = where or f"profile '{self.object_id}'"
        for role, conf in self.shape_conf.items():
            if not 0.0 <= conf <= 1.0:
                raise ValidationError(f"{prefix}.shape_conf.{role}: {conf} not in [0, 1]")
            if known_roles is not None and role not in known_roles:
                raise ValidationError(f"{prefix}.shape_conf: unknown part role '{role}'")
        total = 0.0
        for cls, conf in self.material_conf.items():
            if cls not in MATERIAL_CLASSES:
                raise ValidationError(f"{prefix}.material_conf: unknown material '{cls}'")
            if not 0.0 <= conf <= 1.0:
                raise ValidationError(f"{prefix}.material_conf.{cls}: {conf} not in [0, 1]")
            total += conf
        if total > 1.0 + 1e-9:
            raise ValidationError(f"{prefix}.material_conf sums to {total:.4f} > 1")


@dataclass(frozen=True)
class ToolSpec:
    """Declares how one join action maps onto part roles and materials."""

    tool: str
    join_action_name: str
    action_part_role: str
    allowed_materials: frozenset[str]
    use_action: str  # the task action this tool enables, e.g. "hit"
    grasp_part_role: str = "handle"
    num_parts: int = 2

    def validate(self) -> None:
        if not self.allowed_materials:
            raise ConfigError(f"tool '{self.tool}': allowed_materials is empty")
        unknown = self.allowed_materials - set(MATERIAL_CLASSES)
        if unknown:
            raise ConfigError(f"tool '{self.tool}': unknown materials {sorted(unknown)}")
        if self.num_parts != 2:
            raise ConfigError(f"tool '{self.tool}': only two-part tools are supported")


@dataclass(frozen=True)
class ScoreParams:
    lambda_shape: float = 1.0
    lambda_material: float = 1.0
    material_threshold: float = 0.6

    def validate(self) -> None:
        if self.lambda_shape < 0 or self.lambda_material < 0:
            raise ConfigError("score weights must be non-negative")
        if not 0.0 < self.material_threshold < 1.0:
            raise ConfigError("material threshold must lie in (0, 1)")


class RejectSet:
    """Ordered object combinations rejected by the hard constraints.

    Entries are (o_a permutation, join action name) pairs; they are only
    added while sensors are fully trusted.
    """

    def __init__(self, entries=()):
        self._entries: set[tuple[tuple[str, ...], str]] = set(entries)

    def add(self, o_a: tuple[str, ...], action_name: str) -> None:
        self._entries.add((tuple(o_a), action_name))

    def __contains__(self, key) -> bool:
        o_a, action_name = key
        return (tuple(o_a), action_name) in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(sorted(self._entries))

    def update(self, other) -> None:
        self._entries.update(other)

    def snapshot(self) -> frozenset:
        return frozenset(self._entries)


def shape_fit(o_a, spec: ToolSpec, profiles: dict[str, ObjectProfile]) -> float:
    """Product of role confidences: action part against the tool's action
    role, grasp part against the handle role. Missing confidences count
    as 0 and are logged."""
    action_obj, grasp_obj = profiles[o_a[0]], profiles[o_a[1]]
    score = 1.0
    for profile, role in ((action_obj, spec.action_part_role), (grasp_obj, spec.grasp_part_role)):
        conf = profile.shape_conf.get(role)
        if conf is None:
            log.warning(
                "object '%s' has no confidence for role '%s'; treating as 0",
                profile.object_id,
                role,
            )
            conf = 0.0
        score *= conf
    return score


def material_fit(o_a, spec: ToolSpec, profiles: dict[str, ObjectProfile], params: ScoreParams) -> float:
    """Hard material constraint on the action part: the best confidence over
    the tool's allowed materials, or -inf when it falls below threshold."""
    action_obj = profiles[o_a[0]]
    z = max((action_obj.material_conf.get(c, 0.0) for c in sorted(spec.allowed_materials)), default=0.0)
    if z >= params.material_threshold:
        return z
    return NEG_INF


def can_attach(o_a, profiles: dict[str, ObjectProfile]) -> tuple[bool, str | None]:
    """Whether the ordered pair can be physically joined, and how.

    Pierce needs exactly one pierceable object (the rigid one pierces the
    soft one); grasp needs a grasp part that can hold things and an action
    part that can be held; magnetic needs magnets on both. The reported
    kind follows the fixed order pierce, grasp, magnetic."""
    action_obj, grasp_obj = profiles[o_a[0]], profiles[o_a[1]]
    if action_obj.pierceable != grasp_obj.pierceable:
        return True, ATTACH_PIERCE
    if grasp_obj.can_grasp_others and action_obj.can_be_grasped:
        return True, ATTACH_GRASP
    if action_obj.has_magnet and grasp_obj.has_magnet:
        return True, ATTACH_MAGNETIC
    return False, None


def feature_score(
    state,
    action_name: str,
    o_a: tuple[str, ...],
    trust: bool,
    reject,
    registry: dict[str, ToolSpec],
    profiles: dict[str, ObjectProfile],
    params: ScoreParams,
) -> float:
    """Score one transition's object permutation.

    Actions without objects score 0. With trust, attachment and material act
    as hard constraints around the weighted shape+material sum. Without
    trust, only combinations in *reject* are considered, by shape alone."""
    if not o_a:
        return 0.0
    spec = registry.get(action_name)
    if spec is None:
        raise ConfigError(f"no tool spec registered for join action '{action_name}'")
    if trust:
        attachable, _ = can_attach(o_a, profiles)
        if not attachable:
            return NEG_INF
        material = material_fit(o_a, spec, profiles, params)
        if material == NEG_INF:
            return NEG_INF
        shape = shape_fit(o_a, spec, profiles)
        return params.lambda_shape * shape + params.lambda_material * material
    if (tuple(o_a), action_name) in reject:
        return shape_fit(o_a, spec, profiles)
    return NEG_INF


def make_scorer(
    registry: dict[str, ToolSpec],
    profiles: dict[str, ObjectProfile],
    params: ScoreParams,
    no_trust_whitelist=frozenset(),
):
    """Bind scoring data into the (state, action_name, o_a, trust) callback
    the search engine consumes. The whitelist is the accumulated reject set
    used when trust is withdrawn."""
    for spec in registry.values():
        spec.validate()
    params.validate()

    def scorer(state, action_name, o_a, trust):
        return feature_score(
            state, action_name, o_a, trust, no_trust_whitelist, registry, profiles, params
        )

    return scorer

