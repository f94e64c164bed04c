"""Demand content comparison: fingerprints, attribute diffs and table rows."""
import hashlib
import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import MissingDirectionError
from .model import (ATTRIBUTE_NAMES, AtomicBehaviorSpace, Behavior, BoundaryAttribute, Condition,
                    Direction, OvertakeAttribute, ParticipantKind, ParticipantType,
                    ReservationAttribute, ReservationKind, SpeedAttribute)

PLURALS = {
    ParticipantKind.MOTOR_VEHICLE: "motor_vehicles",
    ParticipantKind.PEDESTRIAN: "pedestrians",
    ParticipantKind.BICYCLE: "bicycles",
    ParticipantKind.RAIL_VEHICLE: "rail_vehicles",
}


def _cond(condition: Optional[Condition]) -> str:
    return condition.token() if condition else ""


def _speed_content(attribute: SpeedAttribute) -> tuple:
    return tuple(sorted((d.limit_kind.value, d.value, _cond(d.condition)) for d in attribute.demands))


def _boundary_content(attribute: BoundaryAttribute) -> tuple:
    return tuple(sorted((d.permission.value, _cond(d.condition)) for d in attribute.demands))


def _reservation_content(attribute: ReservationAttribute) -> tuple:
    # link targets name concrete scenery elements, not demand content
    return tuple(sorted((d.kind.value, d.entitled_tokens(), _cond(d.condition)) for d in attribute.demands))


def _overtake_content(attribute: OvertakeAttribute) -> tuple:
    return tuple(sorted((d.permitted, _cond(d.condition)) for d in attribute.demands))


def attribute_content(behavior: Behavior, name: str) -> tuple:
    """Canonical, identifier-free form of one attribute's demands"""
    attribute = behavior.attribute(name)
    if name == 'speed':
        return _speed_content(attribute)
    if name.startswith('boundary_'):
        return _boundary_content(attribute)
    if name == 'reservation':
        return _reservation_content(attribute)
    return _overtake_content(attribute)


def behavior_content(behavior: Optional[Behavior]) -> Optional[Dict[str, tuple]]:
    if behavior is None:
        return None
    return {name: attribute_content(behavior, name) for name in ATTRIBUTE_NAMES}


def behavior_space_fingerprint(space: AtomicBehaviorSpace) -> str:
    payload = {
        'along': behavior_content(space.along),
        'against': behavior_content(space.against),
    }
    canonical = json.dumps(payload, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


@dataclass(frozen=True)
class AttributeDiff:
    direction: Direction
    equal: Dict[str, bool]
    values: Dict[str, Tuple[str, str]]

    @property
    def equal_attributes(self) -> List[str]:
        return [name for name in ATTRIBUTE_NAMES if self.equal[name]]

    @property
    def different_attributes(self) -> List[str]:
        return [name for name in ATTRIBUTE_NAMES if not self.equal[name]]

    @property
    def all_equal(self) -> bool:
        return all(self.equal.values())

    def to_dict(self) -> dict:
        return {
            'direction': self.direction.value,
            'equal': self.equal_attributes,
            'different': {name: list(self.values[name]) for name in self.different_attributes},
        }

    def format(self) -> str:
        lines = [f"direction: {self.direction.value}",
                 f"equal: {', '.join(self.equal_attributes) or '-'}",
                 f"different: {', '.join(self.different_attributes) or '-'}"]
        for name in self.different_attributes:
            a, b = self.values[name]
            lines.append(f"  {name}: {a} | {b}")
        return "\n".join(lines)


def compare_demands(a: AtomicBehaviorSpace, b: AtomicBehaviorSpace,
                    direction: Direction = Direction.ALONG) -> AttributeDiff:
    behavior_a = a.behavior(direction)
    behavior_b = b.behavior(direction)
    if behavior_a is None:
        raise MissingDirectionError(a.id, direction.value)
    if behavior_b is None:
        raise MissingDirectionError(b.id, direction.value)

    rows_a = dict(demand_rows(behavior_a))
    rows_b = dict(demand_rows(behavior_b))
    equal = {name: attribute_content(behavior_a, name) == attribute_content(behavior_b, name)
             for name in ATTRIBUTE_NAMES}
    values = {name: (rows_a[name], rows_b[name]) for name in ATTRIBUTE_NAMES}
    return AttributeDiff(direction=direction, equal=equal, values=values)


def _suffix(condition: Optional[Condition]) -> str:
    return f" @ {condition.token()}" if condition else ""


def _participant_label(participant: ParticipantType) -> str:
    return PLURALS.get(participant.kind, participant.token())


def describe_speed(attribute: SpeedAttribute) -> str:
    return "; ".join(f"{d.limit_kind.value} {d.value:g} km/h{_suffix(d.condition)}" for d in attribute.demands)


def describe_boundary(attribute: BoundaryAttribute) -> str:
    return "; ".join(d.describe() for d in attribute.demands)


def describe_reservation(attribute: ReservationAttribute) -> str:
    parts = []
    for demand in attribute.demands:
        text = demand.kind.value
        if demand.kind in (ReservationKind.EXTERNALLY, ReservationKind.EQUALLY):
            labels = sorted(_participant_label(p) for p in demand.entitled)
            text += "/" + ",".join(labels)
        parts.append(text + _suffix(demand.condition))
    return "; ".join(parts)


def describe_overtake(attribute: OvertakeAttribute) -> str:
    return "; ".join(("yes" if d.permitted else "no") + _suffix(d.condition) for d in attribute.demands)


def demand_rows(behavior: Behavior) -> List[Tuple[str, str]]:
    """The six-attribute table of one behavior as (key, value) rows"""
    return [
        ('speed', describe_speed(behavior.speed)),
        ('boundary_long', describe_boundary(behavior.boundary_long)),
        ('boundary_left', describe_boundary(behavior.boundary_left)),
        ('boundary_right', describe_boundary(behavior.boundary_right)),
        ('reservation', describe_reservation(behavior.reservation)),
        ('overtake', describe_overtake(behavior.overtake)),
    ]
