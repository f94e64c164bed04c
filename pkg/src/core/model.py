"""Domain types of the behavior-semantic scenery description.

Everything here is format independent and immutable. Constructors check the
type invariants and raise ``InvariantViolation`` with a rule code that the
validator reuses verbatim.
"""
import re
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, Optional, Tuple

from ..config import get_config
from .errors import InvariantViolation

MINUTES_PER_DAY = 1440


def _freeze(instance, name: str, value) -> None:
    object.__setattr__(instance, name, value)


class ParticipantKind(Enum):
    MOTOR_VEHICLE = "motor_vehicle"
    PEDESTRIAN = "pedestrian"
    BICYCLE = "bicycle"
    RAIL_VEHICLE = "rail_vehicle"
    OTHER = "other"


@dataclass(frozen=True)
class ParticipantType:
    kind: ParticipantKind
    label: str = ""

    def __post_init__(self):
        if self.kind is ParticipantKind.OTHER:
            label = self.label.strip().lower()
            if not label:
                raise InvariantViolation("invalid_participant", "other participant needs a label")
            _freeze(self, 'label', label)
        elif self.label:
            _freeze(self, 'label', "")

    @classmethod
    def parse(cls, token: str) -> 'ParticipantType':
        token = token.strip().lower()
        for kind in ParticipantKind:
            if kind is not ParticipantKind.OTHER and kind.value == token:
                return cls(kind)
        return cls(ParticipantKind.OTHER, token)

    def token(self) -> str:
        return self.label if self.kind is ParticipantKind.OTHER else self.kind.value


MOTOR_VEHICLE = ParticipantType(ParticipantKind.MOTOR_VEHICLE)
PEDESTRIAN = ParticipantType(ParticipantKind.PEDESTRIAN)
BICYCLE = ParticipantType(ParticipantKind.BICYCLE)
RAIL_VEHICLE = ParticipantType(ParticipantKind.RAIL_VEHICLE)


class ConditionKind(Enum):
    NO_STAGNANT_TRAFFIC = "no_stagnant_traffic"
    TRAFFIC_LIGHT_STATE = "traffic_light"
    TIME_WINDOW = "time"
    WEATHER = "weather"
    CUSTOM = "custom"


_TIME_TOKEN = re.compile(r"^(\d{2})(\d{2})-(\d{2})(\d{2})$")


@dataclass(frozen=True)
class Condition:
    kind: ConditionKind
    state: Optional[str] = None      # traffic light: "active" | "inactive"
    start: Optional[int] = None      # time window, minutes of day
    end: Optional[int] = None
    label: Optional[str] = None      # weather / custom

    def __post_init__(self):
        if self.kind is ConditionKind.TRAFFIC_LIGHT_STATE:
            if self.state not in ("active", "inactive"):
                raise InvariantViolation("invalid_condition", f"traffic light state {self.state!r}")
        elif self.kind is ConditionKind.TIME_WINDOW:
            for value in (self.start, self.end):
                if value is None or not 0 <= value < MINUTES_PER_DAY:
                    raise InvariantViolation("invalid_condition", f"time window bound {value!r} outside [0, 1440)")
            if self.start == self.end:
                raise InvariantViolation("invalid_condition", "time window start equals end")
        elif self.kind in (ConditionKind.WEATHER, ConditionKind.CUSTOM):
            label = (self.label or "").strip().lower()
            if not label:
                raise InvariantViolation("invalid_condition", f"{self.kind.value} condition needs a label")
            _freeze(self, 'label', label)

    @classmethod
    def no_stagnant_traffic(cls) -> 'Condition':
        return cls(ConditionKind.NO_STAGNANT_TRAFFIC)

    @classmethod
    def traffic_light(cls, active: bool) -> 'Condition':
        return cls(ConditionKind.TRAFFIC_LIGHT_STATE, state="active" if active else "inactive")

    @classmethod
    def time_window(cls, start: int, end: int) -> 'Condition':
        return cls(ConditionKind.TIME_WINDOW, start=start, end=end)

    @classmethod
    def weather(cls, label: str) -> 'Condition':
        return cls(ConditionKind.WEATHER, label=label)

    @classmethod
    def custom(cls, label: str) -> 'Condition':
        return cls(ConditionKind.CUSTOM, label=label)

    def token(self) -> str:
        if self.kind is ConditionKind.NO_STAGNANT_TRAFFIC:
            return "no_stagnant_traffic"
        if self.kind is ConditionKind.TRAFFIC_LIGHT_STATE:
            return f"traffic_light:{self.state}"
        if self.kind is ConditionKind.TIME_WINDOW:
            return "time:{:02d}{:02d}-{:02d}{:02d}".format(
                self.start // 60, self.start % 60, self.end // 60, self.end % 60)
        return f"{self.kind.value}:{self.label}"

    @classmethod
    def parse(cls, token: str) -> 'Condition':
        token = token.strip()
        if token == "no_stagnant_traffic":
            return cls.no_stagnant_traffic()
        prefix, _, rest = token.partition(":")
        if prefix == "traffic_light":
            return cls(ConditionKind.TRAFFIC_LIGHT_STATE, state=rest)
        if prefix == "time":
            match = _TIME_TOKEN.match(rest)
            if not match:
                raise InvariantViolation("invalid_condition", f"bad time window {token!r}")
            h1, m1, h2, m2 = (int(g) for g in match.groups())
            if m1 > 59 or m2 > 59:
                raise InvariantViolation("invalid_condition", f"bad time window {token!r}")
            return cls.time_window(h1 * 60 + m1, h2 * 60 + m2)
        if prefix == "weather":
            return cls.weather(rest)
        if prefix == "custom":
            return cls.custom(rest)
        raise InvariantViolation("invalid_condition", f"unknown condition token {token!r}")


def _condition_key(condition: Optional[Condition]) -> str:
    return condition.token() if condition else ""


class SpeedLimitKind(Enum):
    MAXIMUM = "max"
    MINIMUM = "min"


@dataclass(frozen=True)
class SpeedDemand:
    limit_kind: SpeedLimitKind
    value: float
    condition: Optional[Condition] = None

    def __post_init__(self):
        bound = get_config().max_speed_kmh
        if not 0 < self.value <= bound:
            raise InvariantViolation("invalid_speed_value", f"speed {self.value} km/h outside (0, {bound:g}]")
        _freeze(self, 'value', float(self.value))


@dataclass(frozen=True)
class SpeedAttribute:
    demands: Tuple[SpeedDemand, ...]

    def __post_init__(self):
        _freeze(self, 'demands', tuple(self.demands))
        if not any(d.limit_kind is SpeedLimitKind.MAXIMUM and d.condition is None for d in self.demands):
            raise InvariantViolation("missing_speed_default", "no unconditional maximum speed demand")
        keys = [(d.limit_kind, _condition_key(d.condition)) for d in self.demands]
        if len(set(keys)) != len(keys):
            raise InvariantViolation("duplicate_speed_demand", "two speed demands share limit kind and condition")

    @property
    def maximum(self) -> float:
        return next(d.value for d in self.demands
                    if d.limit_kind is SpeedLimitKind.MAXIMUM and d.condition is None)

    def minimums(self) -> Tuple[SpeedDemand, ...]:
        return tuple(d for d in self.demands if d.limit_kind is SpeedLimitKind.MINIMUM)


class CrossingPermission(Enum):
    ALLOWED = "allowed"
    CONDITIONAL = "conditional"
    PROHIBITED = "prohibited"
    NOT_POSSIBLE = "not_possible"


@dataclass(frozen=True)
class CrossingDemand:
    permission: CrossingPermission
    condition: Optional[Condition] = None

    def __post_init__(self):
        if (self.permission is CrossingPermission.CONDITIONAL) != (self.condition is not None):
            raise InvariantViolation("conditional_mismatch",
                                     "a condition is required for, and only for, conditional crossings")

    def describe(self) -> str:
        if self.condition:
            return f"{self.permission.value} {self.condition.token()}"
        return self.permission.value


@dataclass(frozen=True)
class BoundaryAttribute:
    demands: Tuple[CrossingDemand, ...]
    geometry_refs: Tuple[str, ...] = ()

    def __post_init__(self):
        _freeze(self, 'demands', tuple(self.demands))
        _freeze(self, 'geometry_refs', tuple(self.geometry_refs))
        if not self.demands:
            raise InvariantViolation("missing_crossing_demand", "boundary without crossing demand")
        conditions = [d.condition.token() for d in self.demands
                      if d.permission is CrossingPermission.CONDITIONAL]
        if len(set(conditions)) != len(conditions):
            raise InvariantViolation("duplicate_condition", "conditional crossing demands repeat a condition")


class LinkRole(Enum):
    ORIGIN = "origin"
    DESTINATION = "destination"


@dataclass(frozen=True)
class ReservationLink:
    target: str
    role: LinkRole = LinkRole.ORIGIN


class ReservationKind(Enum):
    # residence allowance has no field of its own; externally and none imply it
    OWN = "own"
    EXTERNALLY = "externally"
    EQUALLY = "equally"
    NONE = "none"


@dataclass(frozen=True)
class ReservationDemand:
    kind: ReservationKind
    entitled: FrozenSet[ParticipantType] = frozenset()
    links: Tuple[ReservationLink, ...] = ()
    condition: Optional[Condition] = None

    def __post_init__(self):
        _freeze(self, 'entitled', frozenset(self.entitled))
        _freeze(self, 'links', tuple(self.links))
        if self.kind in (ReservationKind.EXTERNALLY, ReservationKind.EQUALLY):
            if not self.entitled:
                raise InvariantViolation("missing_entitled",
                                         f"{self.kind.value} reservation names no entitled participant")
        elif self.entitled or self.links:
            raise InvariantViolation("reservation_kind_conflict",
                                     f"{self.kind.value} reservation must not carry participants or links")

    def entitled_tokens(self) -> Tuple[str, ...]:
        return tuple(sorted(p.token() for p in self.entitled))


@dataclass(frozen=True)
class ReservationAttribute:
    demands: Tuple[ReservationDemand, ...]

    def __post_init__(self):
        _freeze(self, 'demands', tuple(self.demands))
        if not self.demands:
            raise InvariantViolation("missing_reservation_demand", "reservation without demand")


@dataclass(frozen=True)
class OvertakeDemand:
    permitted: bool
    condition: Optional[Condition] = None


@dataclass(frozen=True)
class OvertakeAttribute:
    demands: Tuple[OvertakeDemand, ...]

    def __post_init__(self):
        _freeze(self, 'demands', tuple(self.demands))
        defaults = [d for d in self.demands if d.condition is None]
        if len(defaults) != 1:
            raise InvariantViolation("missing_overtake_default",
                                     f"expected one unconditional overtake demand, found {len(defaults)}")

    @property
    def default(self) -> bool:
        return next(d.permitted for d in self.demands if d.condition is None)


class Direction(Enum):
    ALONG = "along"
    AGAINST = "against"


ATTRIBUTE_NAMES = ('speed', 'boundary_long', 'boundary_left', 'boundary_right', 'reservation', 'overtake')


@dataclass(frozen=True)
class Behavior:
    """All four behavioral attributes for one direction of travel.

    Left and right are seen by the driver, so the against behavior's left
    boundary is the lane's geometric right bound.
    """
    direction: Direction
    speed: SpeedAttribute
    boundary_long: BoundaryAttribute
    boundary_left: BoundaryAttribute
    boundary_right: BoundaryAttribute
    reservation: ReservationAttribute
    overtake: OvertakeAttribute

    def attribute(self, name: str):
        if name not in ATTRIBUTE_NAMES:
            raise KeyError(name)
        return getattr(self, name)


class LaneKind(Enum):
    VEHICLE_LANE = "vehicle_lane"
    BICYCLE_LANE = "bicycle_lane"
    CROSSWALK = "crosswalk"
    OTHER = "other"


@dataclass(frozen=True)
class LaneElement:
    id: str
    left_bound: str
    right_bound: str
    kind: LaneKind = LaneKind.VEHICLE_LANE
    one_directional: bool = False
    kind_label: str = ""
    # (left, right) node ids at the lane's start and end; empty without geometry
    start_nodes: Tuple[str, ...] = ()
    end_nodes: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.left_bound == self.right_bound:
            raise InvariantViolation("identical_bounds", "left and right bound are the same linestring", self.id)
        _freeze(self, 'start_nodes', tuple(self.start_nodes))
        _freeze(self, 'end_nodes', tuple(self.end_nodes))


class AreaKind(Enum):
    SIDEWALK = "sidewalk"
    PARKING_AREA = "parking_area"
    KEEPOUT = "keepout"
    OTHER = "other"


@dataclass(frozen=True)
class NonRegularMotionSpace:
    id: str
    kind: AreaKind
    geometry_ref: Optional[str] = None
    kind_label: str = ""


@dataclass(frozen=True)
class AtomicBehaviorSpace:
    id: str
    lane: str
    along: Behavior
    against: Optional[Behavior] = None
    extra_lanes: Tuple[str, ...] = ()
    name: Optional[str] = None

    def __post_init__(self):
        _freeze(self, 'extra_lanes', tuple(self.extra_lanes))
        if self.along.direction is not Direction.ALONG:
            raise InvariantViolation("direction_mismatch", "along member holds an against behavior", self.id)
        if self.against is not None and self.against.direction is not Direction.AGAINST:
            raise InvariantViolation("direction_mismatch", "against member holds an along behavior", self.id)

    @property
    def lanes(self) -> Tuple[str, ...]:
        return (self.lane,) + self.extra_lanes

    def behavior(self, direction: Direction) -> Optional[Behavior]:
        return self.along if direction is Direction.ALONG else self.against

    def directions(self) -> Tuple[Direction, ...]:
        return (Direction.ALONG,) if self.against is None else (Direction.ALONG, Direction.AGAINST)


@dataclass(frozen=True)
class Segment:
    id: str
    lanes: Tuple[str, ...]

    def __post_init__(self):
        _freeze(self, 'lanes', tuple(self.lanes))
        if len(set(self.lanes)) != len(self.lanes):
            raise InvariantViolation("duplicate_lane", "a lane appears twice in one segment", self.id)

    def neighbors(self, lane_id: str) -> Tuple[Optional[str], Optional[str]]:
        index = self.lanes.index(lane_id)
        left = self.lanes[index - 1] if index > 0 else None
        right = self.lanes[index + 1] if index + 1 < len(self.lanes) else None
        return left, right


@dataclass(frozen=True)
class Way:
    id: str
    segments: Tuple[str, ...]

    def __post_init__(self):
        _freeze(self, 'segments', tuple(self.segments))


@dataclass(frozen=True)
class NetworkNode:
    id: str
    incoming_ways: Tuple[str, ...] = ()
    outgoing_ways: Tuple[str, ...] = ()
    internal_ways: Tuple[str, ...] = ()

    def __post_init__(self):
        for name in ('incoming_ways', 'outgoing_ways', 'internal_ways'):
            _freeze(self, name, tuple(getattr(self, name)))
        if self.way_count < 2:
            raise InvariantViolation("invalid_node", "a network node connects at least two ways", self.id)

    @property
    def way_count(self) -> int:
        return len(self.incoming_ways) + len(self.outgoing_ways) + len(self.internal_ways)

    @property
    def degenerate(self) -> bool:
        return self.way_count == 2


def participants(tokens: Iterable[str]) -> FrozenSet[ParticipantType]:
    return frozenset(ParticipantType.parse(t) for t in tokens if t.strip())
