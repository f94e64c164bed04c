from dataclasses import replace

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from src.core.demands import (behavior_space_fingerprint, compare_demands, demand_rows, describe_reservation,
                              describe_speed)
from src.core.errors import MissingDirectionError
from src.core.model import (BICYCLE, PEDESTRIAN, BoundaryAttribute, Condition, CrossingPermission, Direction,
                            ReservationAttribute, ReservationDemand, ReservationKind, ReservationLink,
                            SpeedAttribute, SpeedDemand, SpeedLimitKind)

from .helpers import make_behavior, make_space

TABLE_A = [
    ("speed", "max 30 km/h"),
    ("boundary_long", "conditional no_stagnant_traffic"),
    ("boundary_left", "prohibited"),
    ("boundary_right", "prohibited"),
    ("reservation", "externally/pedestrians"),
    ("overtake", "yes"),
]
TABLE_B = [
    ("speed", "max 50 km/h"),
    ("boundary_long", "conditional no_stagnant_traffic"),
    ("boundary_left", "conditional no_stagnant_traffic"),
    ("boundary_right", "conditional no_stagnant_traffic"),
    ("reservation", "externally/pedestrians"),
    ("overtake", "no"),
]


def test_table_rows_of_fixture_spaces(example_a, example_b):
    assert demand_rows(example_a.behavior("2005", Direction.ALONG)) == TABLE_A
    assert demand_rows(example_b.behavior("2002", Direction.ALONG)) == TABLE_B
    assert demand_rows(example_b.behavior("2002", Direction.AGAINST)) == TABLE_B


def test_compare_a_and_b(example_a, example_b):
    diff = compare_demands(example_a.find_space("A"), example_b.find_space("B"))
    assert diff.equal_attributes == ["boundary_long", "reservation"]
    assert diff.different_attributes == ["speed", "boundary_left", "boundary_right", "overtake"]
    assert not diff.all_equal
    assert diff.values["speed"] == ("max 30 km/h", "max 50 km/h")
    assert diff.to_dict()["different"]["overtake"] == ["yes", "no"]
    assert "  overtake: yes | no" in diff.format().splitlines()


def test_compare_requires_direction(example_a, example_b):
    with pytest.raises(MissingDirectionError):
        compare_demands(example_b.space("2002"), example_a.space("2005"), Direction.AGAINST)


def test_fingerprint_ignores_identifiers_and_geometry(example_a, example_b):
    a = example_a.space("2005")
    relabeled = replace(a, id="9005", lane="9999", name=None,
                        along=replace(a.along, boundary_long=BoundaryAttribute(a.along.boundary_long.demands)))
    assert behavior_space_fingerprint(relabeled) == behavior_space_fingerprint(a)
    assert behavior_space_fingerprint(a) != behavior_space_fingerprint(example_b.space("2002"))


def test_fingerprint_ignores_reservation_links():
    linked = ReservationDemand(ReservationKind.EXTERNALLY, frozenset({PEDESTRIAN}), (ReservationLink("1501"),))
    plain = ReservationDemand(ReservationKind.EXTERNALLY, frozenset({PEDESTRIAN}))
    assert (behavior_space_fingerprint(make_space(along=make_behavior(reservation=linked)))
            == behavior_space_fingerprint(make_space(along=make_behavior(reservation=plain))))


def test_fingerprint_separates_missing_direction():
    one_way = make_space()
    two_way = make_space(against=make_behavior(Direction.AGAINST))
    assert behavior_space_fingerprint(one_way) != behavior_space_fingerprint(two_way)


def test_descriptions_with_conditions():
    speed = SpeedAttribute((SpeedDemand(SpeedLimitKind.MAXIMUM, 50),
                            SpeedDemand(SpeedLimitKind.MAXIMUM, 30, Condition.time_window(22 * 60, 6 * 60))))
    assert describe_speed(speed) == "max 50 km/h; max 30 km/h @ time:2200-0600"
    reservation = ReservationAttribute((ReservationDemand(ReservationKind.EQUALLY, frozenset({PEDESTRIAN, BICYCLE}),
                                                          condition=Condition.traffic_light(False)),))
    assert describe_reservation(reservation) == "equally/bicycles,pedestrians @ traffic_light:inactive"


# fingerprint equality against an independent structural comparison

PERMISSIONS = st.sampled_from([CrossingPermission.ALLOWED, CrossingPermission.PROHIBITED,
                               CrossingPermission.CONDITIONAL])
RESERVATIONS = st.sampled_from([
    ReservationDemand(ReservationKind.OWN),
    ReservationDemand(ReservationKind.EXTERNALLY, frozenset({PEDESTRIAN})),
    ReservationDemand(ReservationKind.EXTERNALLY, frozenset({PEDESTRIAN}), (ReservationLink("1501"),)),
])


@st.composite
def behaviors(draw, direction):
    return make_behavior(
        direction,
        max_speed=draw(st.sampled_from((30, 50))),
        long=draw(PERMISSIONS),
        left=draw(PERMISSIONS),
        right=draw(PERMISSIONS),
        reservation=draw(RESERVATIONS),
        overtake=draw(st.booleans()),
        geometry={'boundary_left': draw(st.sampled_from([(), ("101",)]))},
    )


@st.composite
def spaces(draw, space_id):
    against = draw(behaviors(Direction.AGAINST)) if draw(st.booleans()) else None
    return make_space(space_id, "1001", draw(behaviors(Direction.ALONG)), against)


@st.composite
def space_pairs(draw):
    a = draw(spaces("2001"))
    if draw(st.booleans()):
        # same demands, other identity
        return a, replace(a, id="2002", lane="1002", name="copy")
    return a, draw(spaces("2002"))


def structurally_equal(a, b) -> bool:
    if (a.against is None) != (b.against is None):
        return False
    for direction in a.directions():
        x, y = a.behavior(direction), b.behavior(direction)
        if set(x.speed.demands) != set(y.speed.demands):
            return False
        for name in ('boundary_long', 'boundary_left', 'boundary_right'):
            if set(x.attribute(name).demands) != set(y.attribute(name).demands):
                return False
        if ({(r.kind, r.entitled, r.condition) for r in x.reservation.demands}
                != {(r.kind, r.entitled, r.condition) for r in y.reservation.demands}):
            return False
        if set(x.overtake.demands) != set(y.overtake.demands):
            return False
    return True


@settings(max_examples=1000, deadline=None)
@given(space_pairs())
def test_fingerprint_matches_structural_equality(pair):
    a, b = pair
    same = behavior_space_fingerprint(a) == behavior_space_fingerprint(b)
    assert same == structurally_equal(a, b)
    if (a.against is None) == (b.against is None):
        assert same == all(compare_demands(a, b, d).all_equal for d in a.directions())
