"""Vehicle capability profiles and the admissibility of behavior-space steps."""
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Optional, Tuple

from ..builder.spec_text import iter_key_values
from ..core.demands import describe_boundary, describe_reservation
from ..core.errors import InvariantViolation, SpecSyntaxError, UnknownElementError
from ..core.model import (Behavior, BoundaryAttribute, ConditionKind, CrossingDemand, CrossingPermission,
                          LaneKind, ParticipantKind, ParticipantType, ReservationAttribute,
                          ReservationDemand, ReservationKind, SpeedLimitKind)
from ..graph.network import BehaviorGraph, Edge, EdgeKind, Vertex, format_vertex
from ..osm import schema

# lanes whose own reservation belongs to someone other than motor vehicles
FOREIGN_LANE_KINDS = frozenset({LaneKind.BICYCLE_LANE, LaneKind.CROSSWALK})


@dataclass(frozen=True)
class CapabilityProfile:
    max_speed_kmh: float
    yieldable: FrozenSet[ParticipantType] = frozenset()
    supported_conditions: FrozenSet[ConditionKind] = frozenset()
    may_enter_externally_reserved: bool = False
    may_cross_conditional: bool = False

    def __post_init__(self):
        if not self.max_speed_kmh > 0:
            raise InvariantViolation("invalid_profile", f"max_speed_kmh must be positive, got {self.max_speed_kmh}")
        object.__setattr__(self, 'yieldable', frozenset(self.yieldable))
        object.__setattr__(self, 'supported_conditions', frozenset(self.supported_conditions))

    @classmethod
    def full(cls, max_speed_kmh: float = 400.0,
             extra_participants: Iterable[ParticipantType] = ()) -> 'CapabilityProfile':
        participants = {ParticipantType(kind) for kind in ParticipantKind if kind is not ParticipantKind.OTHER}
        return cls(max_speed_kmh, frozenset(participants) | frozenset(extra_participants),
                   frozenset(ConditionKind), True, True)

    def covers(self, other: 'CapabilityProfile') -> bool:
        """True if this profile can do at least everything ``other`` can"""
        return (self.max_speed_kmh >= other.max_speed_kmh
                and self.yieldable >= other.yieldable
                and self.supported_conditions >= other.supported_conditions
                and self.may_enter_externally_reserved >= other.may_enter_externally_reserved
                and self.may_cross_conditional >= other.may_cross_conditional)


def _split(value: str) -> Tuple[str, ...]:
    return tuple(token.strip() for token in value.split(';') if token.strip())


def parse_profile(text: str) -> CapabilityProfile:
    values = {}
    for number, key, value in iter_key_values(text):
        try:
            if key == 'max_speed_kmh':
                values[key] = float(value)
            elif key == 'yieldable':
                values[key] = frozenset(ParticipantType.parse(t) for t in _split(value))
            elif key == 'supported_conditions':
                values[key] = frozenset(ConditionKind(t) for t in _split(value))
            elif key in ('may_enter_externally_reserved', 'may_cross_conditional'):
                values[key] = schema.parse_flag(value)
            else:
                raise SpecSyntaxError(number, f"unknown profile key {key!r}")
        except ValueError as e:
            raise SpecSyntaxError(number, f"{key}: {e}")
    if 'max_speed_kmh' not in values:
        raise SpecSyntaxError(0, "profile needs max_speed_kmh")
    try:
        return CapabilityProfile(**values)
    except InvariantViolation as e:
        raise SpecSyntaxError(0, e.message)


def format_profile(profile: CapabilityProfile) -> str:
    return "\n".join([
        f"max_speed_kmh: {profile.max_speed_kmh:g}",
        f"yieldable: {';'.join(sorted(p.token() for p in profile.yieldable))}",
        f"supported_conditions: {';'.join(sorted(k.value for k in profile.supported_conditions))}",
        f"may_enter_externally_reserved: {schema.format_flag(profile.may_enter_externally_reserved)}",
        f"may_cross_conditional: {schema.format_flag(profile.may_cross_conditional)}",
    ]) + "\n"


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    attribute: str = ""
    demand: str = ""
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "admissible"
        return f"inadmissible({self.attribute}: {self.demand})"


ADMISSIBLE = Admissibility(True)


def crossing_granted(demand: CrossingDemand, profile: CapabilityProfile) -> bool:
    if demand.permission is CrossingPermission.ALLOWED:
        return True
    if demand.permission is CrossingPermission.CONDITIONAL:
        return profile.may_cross_conditional and demand.condition.kind in profile.supported_conditions
    return False


def check_crossing(attribute_name: str, demands: Tuple[CrossingDemand, ...],
                   profile: CapabilityProfile) -> Admissibility:
    if not demands or any(crossing_granted(d, profile) for d in demands):
        return ADMISSIBLE
    text = describe_boundary(BoundaryAttribute(demands))
    if any(d.permission is CrossingPermission.CONDITIONAL for d in demands):
        reason = "no conditional crossing is supported by the profile"
    else:
        reason = "crossing is not permitted"
    return Admissibility(False, attribute_name, text, reason)


def check_speed(behavior: Behavior, profile: CapabilityProfile) -> Admissibility:
    for demand in behavior.speed.demands:
        if demand.limit_kind is SpeedLimitKind.MINIMUM and demand.value > profile.max_speed_kmh:
            return Admissibility(False, 'speed', f"min {demand.value:g} km/h",
                                 f"vehicle reaches only {profile.max_speed_kmh:g} km/h")
    return ADMISSIBLE


def _reservation_blocks(demand: ReservationDemand, lane_kinds: FrozenSet[LaneKind],
                        profile: CapabilityProfile) -> Optional[str]:
    if profile.may_enter_externally_reserved:
        return None
    if demand.kind in (ReservationKind.EXTERNALLY, ReservationKind.EQUALLY):
        missing = sorted(p.token() for p in demand.entitled - profile.yieldable)
        if missing:
            return f"cannot yield to {', '.join(missing)}"
    elif demand.kind is ReservationKind.OWN and lane_kinds and lane_kinds <= FOREIGN_LANE_KINDS:
        return f"space is reserved for {', '.join(sorted(k.value for k in lane_kinds))} traffic"
    return None


def check_reservation(behavior: Behavior, profile: CapabilityProfile,
                      lane_kinds: FrozenSet[LaneKind] = frozenset()) -> Admissibility:
    for demand in behavior.reservation.demands:
        reason = _reservation_blocks(demand, lane_kinds, profile)
        if reason:
            return Admissibility(False, 'reservation', describe_reservation(ReservationAttribute((demand,))), reason)
    return ADMISSIBLE


def _first_failure(*checks: Admissibility) -> Admissibility:
    return next((check for check in checks if not check.ok), ADMISSIBLE)


def admissible_vertex(graph: BehaviorGraph, vertex: Vertex, profile: CapabilityProfile) -> Admissibility:
    """Entering a space through its own longitudinal boundary"""
    behavior = graph.behavior(vertex)
    return _first_failure(
        check_crossing('boundary_long', behavior.boundary_long.demands, profile),
        check_speed(behavior, profile),
        check_reservation(behavior, profile, graph.lane_kinds(vertex)),
    )


EDGE_ATTRIBUTES = {
    EdgeKind.LONGITUDINAL: 'boundary_long',
    EdgeKind.LATERAL_LEFT: 'boundary_left',
    EdgeKind.LATERAL_RIGHT: 'boundary_right',
}


def admissible_edge(graph: BehaviorGraph, edge: Edge, profile: CapabilityProfile) -> Admissibility:
    """One route step: the boundary crossed plus the target's speed and reservation"""
    behavior = graph.behavior(edge.target)
    return _first_failure(
        check_crossing(EDGE_ATTRIBUTES[edge.kind], edge.demands, profile),
        check_speed(behavior, profile),
        check_reservation(behavior, profile, graph.lane_kinds(edge.target)),
    )


def admissible(graph: BehaviorGraph, element, profile: CapabilityProfile) -> Admissibility:
    if isinstance(element, Edge):
        graph.require(element.source)
        graph.require(element.target)
        if graph.edge(element.source, element.target) is None:
            raise UnknownElementError("edge", f"{format_vertex(element.source)}->{format_vertex(element.target)}")
        return admissible_edge(graph, element, profile)
    return admissible_vertex(graph, element, profile)
