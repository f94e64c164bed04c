import random

import networkx as nx
import pytest

from src.core.errors import SpecSyntaxError, UnknownElementError
from src.core.model import (BICYCLE, MOTOR_VEHICLE, PEDESTRIAN, Condition, ConditionKind, CrossingPermission,
                            Direction, LaneKind, ReservationDemand, ReservationKind)
from src.graph.network import BehaviorGraph, Edge, EdgeKind, vertex_key
from src.osm.geojson_export import route_overlay
from src.routing.capability import (CapabilityProfile, admissible, admissible_edge, check_crossing,
                                    format_profile, parse_profile)
from src.routing.router import plan_route

from .helpers import crossing, enlarge_profile, fixture_path, make_behavior, random_graph, random_profile

ALONG, AGAINST = Direction.ALONG, Direction.AGAINST


@pytest.fixture
def full_profile():
    return parse_profile(fixture_path("profile_full.txt").read_text())


@pytest.fixture
def no_pedestrians():
    return parse_profile(fixture_path("profile_no_pedestrians.txt").read_text())


def two_vertex_graph(edge_permission=CrossingPermission.ALLOWED, condition=None, target_behavior=None,
                     lane_kind=LaneKind.VEHICLE_LANE):
    source, target = ("2001", ALONG), ("2002", ALONG)
    behaviors = {source: make_behavior(), target: target_behavior or make_behavior()}
    demands = crossing(edge_permission, condition).demands
    edge = Edge(source, target, EdgeKind.LONGITUDINAL, demands)
    graph = BehaviorGraph(behaviors, [edge], {source: {LaneKind.VEHICLE_LANE}, target: {lane_kind}})
    return graph, edge


def test_profile_file(full_profile, no_pedestrians):
    assert full_profile.max_speed_kmh == 130
    assert full_profile.yieldable >= {MOTOR_VEHICLE, PEDESTRIAN, BICYCLE}
    assert full_profile.supported_conditions == frozenset(ConditionKind)
    assert not full_profile.may_enter_externally_reserved
    assert full_profile.may_cross_conditional
    assert PEDESTRIAN not in no_pedestrians.yieldable
    assert no_pedestrians.supported_conditions == {ConditionKind.NO_STAGNANT_TRAFFIC}
    assert full_profile.covers(no_pedestrians)
    assert not no_pedestrians.covers(full_profile)


def test_formatted_profile_reads_back(no_pedestrians):
    assert parse_profile(format_profile(no_pedestrians)) == no_pedestrians


@pytest.mark.parametrize("text,line", [
    ("max_speed_kmh: 50\nwings: yes\n", 2),
    ("max_speed_kmh: fast\n", 1),
    ("max_speed_kmh: 50\nsupported_conditions: moon\n", 2),
    ("max_speed_kmh: 50\nmay_cross_conditional: perhaps\n", 2),
    ("yieldable: pedestrian\n", 0),
    ("max_speed_kmh: -5\n", 0),
])
def test_bad_profiles(text, line):
    with pytest.raises(SpecSyntaxError) as excinfo:
        parse_profile(text)
    assert excinfo.value.line_number == line


def test_right_turn_through_crosswalk(graph_a, full_profile):
    result = plan_route(graph_a, ("2001", ALONG), ("2006", ALONG), full_profile)
    assert [s for s, _ in result.path] == ["2001", "2004", "2005", "2006"]
    assert result.hops == 3
    assert result.blocked_alternatives == ()


def test_crosswalk_blocks_vehicle_that_cannot_yield(graph_a, no_pedestrians):
    result = plan_route(graph_a, ("2001", ALONG), ("2006", ALONG), no_pedestrians)
    assert not result.found
    assert result.hops is None
    assert [b.to_dict() for b in result.blocked_alternatives] == [{
        'space': "2005", 'direction': "along",
        'demand': "reservation: externally/pedestrians",
        'reason': "cannot yield to pedestrian",
    }]
    payload = result.to_dict()
    assert payload['found'] is False
    assert payload['path'] == []
    assert payload['from'] == "2001:along"


def test_straight_route_unaffected_by_crosswalk(graph_a, no_pedestrians):
    result = plan_route(graph_a, ("2001", ALONG), ("2003", ALONG), no_pedestrians)
    assert [s for s, _ in result.path] == ["2001", "2002", "2003"]
    # the turn lane lies within the explored horizon
    assert [b.vertex for b in result.blocked_alternatives] == [("2005", ALONG)]


def test_lateral_step_onto_bicycle_lane(graph_b, full_profile):
    result = plan_route(graph_b, ("2001", ALONG), ("2004", ALONG), full_profile)
    assert result.path == (("2001", ALONG), ("2002", ALONG), ("2004", ALONG))


def test_route_to_itself(graph_a, no_pedestrians):
    result = plan_route(graph_a, ("2005", ALONG), ("2005", ALONG), no_pedestrians)
    assert result.path == (("2005", ALONG),)
    assert result.hops == 0


def test_unknown_endpoints(graph_a, full_profile):
    with pytest.raises(UnknownElementError):
        plan_route(graph_a, ("2001", ALONG), ("9999", ALONG), full_profile)
    with pytest.raises(UnknownElementError):
        plan_route(graph_a, ("2001", AGAINST), ("2003", ALONG), full_profile)


@pytest.mark.parametrize("permission,may_cross,supported,expected", [
    (CrossingPermission.ALLOWED, False, frozenset(), True),
    (CrossingPermission.CONDITIONAL, True, {ConditionKind.NO_STAGNANT_TRAFFIC}, True),
    (CrossingPermission.CONDITIONAL, False, {ConditionKind.NO_STAGNANT_TRAFFIC}, False),
    (CrossingPermission.CONDITIONAL, True, {ConditionKind.WEATHER}, False),
    (CrossingPermission.PROHIBITED, True, frozenset(ConditionKind), False),
    (CrossingPermission.NOT_POSSIBLE, True, frozenset(ConditionKind), False),
])
def test_crossing_truth_table(permission, may_cross, supported, expected):
    graph, edge = two_vertex_graph(permission)
    profile = CapabilityProfile(100, frozenset({PEDESTRIAN}), supported, True, may_cross)
    verdict = admissible(graph, edge, profile)
    assert verdict.ok is expected
    if not expected:
        assert verdict.attribute == 'boundary_long'
        assert verdict.describe().startswith("inadmissible(boundary_long: ")


def test_any_granted_demand_opens_the_boundary():
    demands = (crossing(CrossingPermission.PROHIBITED).demands
               + crossing(CrossingPermission.CONDITIONAL, Condition.traffic_light(True)).demands)
    profile = CapabilityProfile(100, supported_conditions={ConditionKind.TRAFFIC_LIGHT_STATE},
                                may_cross_conditional=True)
    assert check_crossing('boundary_left', demands, profile).ok
    assert not check_crossing('boundary_left', demands, CapabilityProfile(100)).ok


def test_minimum_speed_above_vehicle_top_speed():
    graph, edge = two_vertex_graph(target_behavior=make_behavior(max_speed=100, min_speed=60))
    slow = CapabilityProfile(50)
    verdict = admissible(graph, edge, slow)
    assert (verdict.attribute, verdict.demand) == ('speed', "min 60 km/h")
    assert admissible(graph, edge, CapabilityProfile(60)).ok


def test_maximum_speed_never_blocks():
    graph, edge = two_vertex_graph(target_behavior=make_behavior(max_speed=30))
    assert admissible(graph, edge, CapabilityProfile(200)).ok


@pytest.mark.parametrize("kind,entitled,yieldable,may_enter,expected", [
    (ReservationKind.EXTERNALLY, {PEDESTRIAN}, {PEDESTRIAN}, False, True),
    (ReservationKind.EXTERNALLY, {PEDESTRIAN}, set(), False, False),
    (ReservationKind.EXTERNALLY, {PEDESTRIAN}, set(), True, True),
    (ReservationKind.EQUALLY, {PEDESTRIAN, BICYCLE}, {BICYCLE}, False, False),
    (ReservationKind.EQUALLY, {PEDESTRIAN, BICYCLE}, {BICYCLE, PEDESTRIAN}, False, True),
    (ReservationKind.NONE, set(), set(), False, True),
])
def test_reservation_truth_table(kind, entitled, yieldable, may_enter, expected):
    reservation = ReservationDemand(kind, frozenset(entitled))
    graph, edge = two_vertex_graph(target_behavior=make_behavior(reservation=reservation))
    profile = CapabilityProfile(100, frozenset(yieldable), may_enter_externally_reserved=may_enter)
    assert admissible(graph, edge, profile).ok is expected


@pytest.mark.parametrize("lane_kind,may_enter,expected", [
    (LaneKind.VEHICLE_LANE, False, True),
    (LaneKind.BICYCLE_LANE, False, False),
    (LaneKind.CROSSWALK, False, False),
    (LaneKind.BICYCLE_LANE, True, True),
])
def test_own_reservation_of_foreign_lanes(lane_kind, may_enter, expected):
    graph, edge = two_vertex_graph(lane_kind=lane_kind)
    profile = CapabilityProfile(100, may_enter_externally_reserved=may_enter)
    assert admissible(graph, edge, profile).ok is expected


def test_vertex_admissibility(graph_a, no_pedestrians, full_profile):
    verdict = admissible(graph_a, ("2005", ALONG), no_pedestrians)
    assert verdict.describe() == "inadmissible(reservation: externally/pedestrians)"
    assert admissible(graph_a, ("2005", ALONG), full_profile).describe() == "admissible"


def test_unknown_edge(graph_a, full_profile):
    edge = Edge(("2001", ALONG), ("2003", ALONG), EdgeKind.LONGITUDINAL, ())
    with pytest.raises(UnknownElementError):
        admissible(graph_a, edge, full_profile)


def test_full_profile_takes_every_fixture_step(graph_a, graph_b):
    profile = CapabilityProfile.full()
    for graph in (graph_a, graph_b):
        assert all(admissible_edge(graph, edge, profile).ok for edge in graph.edges())


def test_full_profile_still_respects_prohibited_lines():
    graph, edge = two_vertex_graph(CrossingPermission.PROHIBITED)
    assert not admissible(graph, edge, CapabilityProfile.full()).ok


def reference_route(graph, source, target, profile):
    allowed = nx.DiGraph()
    allowed.add_nodes_from(graph.vertices())
    allowed.add_edges_from((e.source, e.target) for e in graph.edges() if admissible_edge(graph, e, profile).ok)
    if source == target:
        return (source,)
    candidates = list(nx.all_simple_paths(allowed, source, target))
    if not candidates:
        return ()
    return tuple(min(candidates, key=lambda path: (len(path), [vertex_key(v) for v in path])))


@pytest.mark.parametrize("seed", range(200))
def test_route_matches_exhaustive_search(seed):
    rng = random.Random(seed)
    graph = random_graph(rng)
    profile = random_profile(rng)
    vertices = graph.vertices()
    source, target = rng.choice(vertices), rng.choice(vertices)
    result = plan_route(graph, source, target, profile)
    assert result.path == reference_route(graph, source, target, profile)
    for step in result.blocked_alternatives:
        assert any(e.target == step.vertex and not admissible_edge(graph, e, profile).ok for e in graph.edges())


@pytest.mark.parametrize("seed", range(500))
def test_larger_profiles_never_lose_routes(seed):
    rng = random.Random(seed)
    graph = random_graph(rng, max_vertices=8)
    small = random_profile(rng)
    large = enlarge_profile(rng, small)
    assert large.covers(small)
    vertices = graph.vertices()
    source, target = rng.choice(vertices), rng.choice(vertices)
    narrow = plan_route(graph, source, target, small)
    wide = plan_route(graph, source, target, large)
    if narrow.found:
        assert wide.found
        assert wide.hops <= narrow.hops


def test_route_overlay(example_a, graph_a, full_profile):
    result = plan_route(graph_a, ("2001", ALONG), ("2006", ALONG), full_profile)
    feature = route_overlay(example_a, result.path)
    assert feature['geometry']['type'] == "LineString"
    assert feature['properties']['route'] == ["2001", "2004", "2005", "2006"]
    coordinates = feature['geometry']['coordinates']
    assert len(coordinates) >= 4
    assert all(a != b for a, b in zip(coordinates, coordinates[1:]))
