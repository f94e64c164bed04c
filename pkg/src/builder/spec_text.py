"""Behavior specs: the geometry-free demand content of one direction, and its text block form.

A block is a list of ``key: value`` lines using the behavior tag vocabulary::

    speed:max: 50
    condition:speed:max:time:2200-0600: 30
    boundary_long: conditional no_stagnant_traffic
    boundary_left: prohibited
    boundary_right: allowed
    reservation: externally pedestrian;bicycle
    reservation:link: 1501
    overtake: no

``reservation:link``, ``reservation:link_destination`` and
``reservation:condition`` apply to the reservation line above them. Annotation
blocks hold an ``[along]`` and optionally an ``[against]`` section.
"""
from dataclasses import dataclass, replace
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from ..core.errors import InvariantViolation, SpecSyntaxError
from ..core.model import (Behavior, BoundaryAttribute, Condition, CrossingDemand, CrossingPermission,
                          Direction, LinkRole, OvertakeAttribute, OvertakeDemand, ReservationAttribute,
                          ReservationDemand, ReservationKind, ReservationLink, SpeedAttribute, SpeedDemand,
                          SpeedLimitKind, participants)
from ..osm import schema

BOUNDARY_KEYS = ('boundary_long', 'boundary_left', 'boundary_right')


@dataclass(frozen=True)
class BehaviorSpec:
    speed: SpeedAttribute
    boundary_long: BoundaryAttribute
    boundary_left: BoundaryAttribute
    boundary_right: BoundaryAttribute
    reservation: ReservationAttribute
    overtake: OvertakeAttribute
    # heuristic pre-fill that still needs a human look
    provisional: bool = False

    @classmethod
    def from_behavior(cls, behavior: Behavior, provisional: bool = False) -> 'BehaviorSpec':
        return cls(
            speed=behavior.speed,
            boundary_long=BoundaryAttribute(behavior.boundary_long.demands),
            boundary_left=BoundaryAttribute(behavior.boundary_left.demands),
            boundary_right=BoundaryAttribute(behavior.boundary_right.demands),
            reservation=behavior.reservation,
            overtake=behavior.overtake,
            provisional=provisional,
        )

    def to_behavior(self, direction: Direction,
                    geometry: Optional[Dict[str, Sequence[str]]] = None) -> Behavior:
        geometry = geometry or {}
        boundaries = {key: replace(getattr(self, key), geometry_refs=tuple(geometry.get(key, ())))
                      for key in BOUNDARY_KEYS}
        return Behavior(direction=direction, speed=self.speed, reservation=self.reservation,
                        overtake=self.overtake, **boundaries)


def iter_key_values(text: str) -> Iterator[Tuple[int, str, str]]:
    """(line number, key, value) for each ``key: value`` line, skipping blanks, comments and sections"""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#') or (line.startswith('[') and line.endswith(']')):
            continue
        key, sep, value = line.partition(': ')
        if not sep:
            raise SpecSyntaxError(number, f"expected 'key: value', got {line!r}")
        yield number, key.strip(), value.strip()


def _condition(number: int, token: str) -> Condition:
    try:
        return Condition.parse(token)
    except InvariantViolation as e:
        raise SpecSyntaxError(number, e.message)


def _speed(number: int, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise SpecSyntaxError(number, f"speed {value!r} is not a number")


def _flag(number: int, value: str) -> bool:
    try:
        return schema.parse_flag(value)
    except ValueError as e:
        raise SpecSyntaxError(number, str(e))


class _SpecParser:
    def __init__(self):
        self.speed: List[SpeedDemand] = []
        self.overtake: List[OvertakeDemand] = []
        self.boundaries: Dict[str, List[CrossingDemand]] = {key: [] for key in BOUNDARY_KEYS}
        # kind, entitled tokens, links, condition
        self.reservations: List[list] = []
        self.first_line = 0

    def feed(self, number: int, key: str, value: str) -> None:
        self.first_line = self.first_line or number
        try:
            self._feed(number, key, value)
        except InvariantViolation as e:
            raise SpecSyntaxError(number, f"{e.rule}: {e.message}")

    def _feed(self, number: int, key: str, value: str) -> None:
        if key == schema.TAG_SPEED_MAX:
            self.speed.append(SpeedDemand(SpeedLimitKind.MAXIMUM, _speed(number, value)))
        elif key == schema.TAG_SPEED_MIN:
            self.speed.append(SpeedDemand(SpeedLimitKind.MINIMUM, _speed(number, value)))
        elif key.startswith(schema.CONDITIONAL_SPEED_MAX):
            self.speed.append(SpeedDemand(SpeedLimitKind.MAXIMUM, _speed(number, value),
                                          _condition(number, key[len(schema.CONDITIONAL_SPEED_MAX):])))
        elif key.startswith(schema.CONDITIONAL_SPEED_MIN):
            self.speed.append(SpeedDemand(SpeedLimitKind.MINIMUM, _speed(number, value),
                                          _condition(number, key[len(schema.CONDITIONAL_SPEED_MIN):])))
        elif key == schema.TAG_OVERTAKE:
            self.overtake.append(OvertakeDemand(_flag(number, value)))
        elif key.startswith(schema.CONDITIONAL_OVERTAKE):
            self.overtake.append(OvertakeDemand(_flag(number, value),
                                                _condition(number, key[len(schema.CONDITIONAL_OVERTAKE):])))
        elif key in BOUNDARY_KEYS:
            permission, _, token = value.partition(' ')
            try:
                permission = CrossingPermission(permission)
            except ValueError:
                raise SpecSyntaxError(number, f"unknown crossing permission {permission!r}")
            condition = _condition(number, token) if token.strip() else None
            self.boundaries[key].append(CrossingDemand(permission, condition))
        elif key == schema.TAG_RESERVATION:
            kind, _, objects = value.partition(' ')
            try:
                kind = ReservationKind(kind)
            except ValueError:
                raise SpecSyntaxError(number, f"unknown reservation kind {kind!r}")
            self.reservations.append([kind, objects.split(';'), [], None])
        elif key in ('reservation:link', 'reservation:link_destination', 'reservation:condition'):
            if not self.reservations:
                raise SpecSyntaxError(number, f"{key} before any reservation line")
            current = self.reservations[-1]
            if key == 'reservation:condition':
                current[3] = _condition(number, value)
            else:
                role = LinkRole.ORIGIN if key == 'reservation:link' else LinkRole.DESTINATION
                current[2].extend(ReservationLink(target, role) for target in value.split(';') if target.strip())
        else:
            raise SpecSyntaxError(number, f"unknown key {key!r}")

    def build(self) -> BehaviorSpec:
        try:
            boundaries = {}
            for key in BOUNDARY_KEYS:
                if not self.boundaries[key]:
                    raise InvariantViolation("missing_attribute", f"no {key} line")
                boundaries[key] = BoundaryAttribute(tuple(self.boundaries[key]))
            reservations = tuple(ReservationDemand(kind, participants(objects), tuple(links), condition)
                                 for kind, objects, links, condition in self.reservations)
            return BehaviorSpec(
                speed=SpeedAttribute(tuple(self.speed)),
                reservation=ReservationAttribute(reservations),
                overtake=OvertakeAttribute(tuple(self.overtake)),
                **boundaries,
            )
        except InvariantViolation as e:
            raise SpecSyntaxError(self.first_line, f"{e.rule}: {e.message}")


def parse_behavior_spec(text: str) -> BehaviorSpec:
    parser = _SpecParser()
    for number, key, value in iter_key_values(text):
        parser.feed(number, key, value)
    return parser.build()


def parse_annotation_block(text: str) -> Tuple[BehaviorSpec, Optional[BehaviorSpec]]:
    """Along and optional against spec from a block with ``[along]`` / ``[against]`` sections"""
    sections: Dict[str, List[str]] = {'along': [], 'against': []}
    current = 'along'
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        header = line.startswith('[') and line.endswith(']')
        if header:
            current = line[1:-1].strip().lower()
            if current not in sections:
                raise SpecSyntaxError(number, f"unknown section [{current}]")
        # blank placeholders keep line numbers stable in both sections
        for name, lines in sections.items():
            lines.append(raw if name == current and not header else '')

    along = parse_behavior_spec("\n".join(sections['along']))
    against_text = "\n".join(sections['against'])
    against = parse_behavior_spec(against_text) if against_text.strip() else None
    return along, against


def _suffix(condition: Optional[Condition]) -> str:
    return f" {condition.token()}" if condition else ""


def format_behavior_spec(spec: BehaviorSpec) -> str:
    lines = []
    if spec.provisional:
        lines.append("# provisional: derived from map tags, review before use")
    for demand in spec.speed.demands:
        key = schema.TAG_SPEED_MAX if demand.limit_kind is SpeedLimitKind.MAXIMUM else schema.TAG_SPEED_MIN
        if demand.condition is not None:
            key = f"condition:{key}:{demand.condition.token()}"
        lines.append(f"{key}: {schema.format_speed(demand.value)}")
    for key in BOUNDARY_KEYS:
        for demand in getattr(spec, key).demands:
            lines.append(f"{key}: {demand.permission.value}{_suffix(demand.condition)}")
    for demand in spec.reservation.demands:
        objects = ";".join(demand.entitled_tokens())
        lines.append(f"reservation: {demand.kind.value}" + (f" {objects}" if objects else ""))
        if demand.condition is not None:
            lines.append(f"reservation:condition: {demand.condition.token()}")
        for link in demand.links:
            key = 'reservation:link' if link.role is LinkRole.ORIGIN else 'reservation:link_destination'
            lines.append(f"{key}: {link.target}")
    for demand in spec.overtake.demands:
        key = schema.TAG_OVERTAKE
        if demand.condition is not None:
            key = f"{schema.CONDITIONAL_OVERTAKE}{demand.condition.token()}"
        lines.append(f"{key}: {schema.format_flag(demand.permitted)}")
    return "\n".join(lines) + "\n"


def format_annotation_block(along: BehaviorSpec, against: Optional[BehaviorSpec] = None) -> str:
    text = "[along]\n" + format_behavior_spec(along)
    if against is not None:
        text += "\n[against]\n" + format_behavior_spec(against)
    return text
