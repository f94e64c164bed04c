"""Factories shared by the test modules."""
import random
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from src.builder.spec_text import BehaviorSpec
from src.core.model import (BICYCLE, MOTOR_VEHICLE, PEDESTRIAN, RAIL_VEHICLE, AtomicBehaviorSpace, Behavior,
                            BoundaryAttribute, Condition, ConditionKind, CrossingDemand, CrossingPermission,
                            Direction, LaneKind, OvertakeAttribute, OvertakeDemand, ParticipantType,
                            ReservationAttribute, ReservationDemand, ReservationKind, SpeedAttribute,
                            SpeedDemand, SpeedLimitKind)
from src.core.scenery import SceneryMap
from src.graph.network import BehaviorGraph, Edge, EdgeKind, Vertex
from src.osm.codec import decode_document, load_map, write_space
from src.osm.document import DocumentEditor, Member, OsmDocument
from src.routing.capability import CapabilityProfile

FIXTURES = Path(__file__).parent / "fixtures"

LAT0, LON0 = 49.8800, 8.6700
STEP = 1e-5

CONDITIONS = (
    Condition.no_stagnant_traffic(),
    Condition.traffic_light(True),
    Condition.traffic_light(False),
    Condition.time_window(22 * 60, 6 * 60),
    Condition.weather("rain"),
    Condition.custom("school_hours"),
)
PARTICIPANTS = (MOTOR_VEHICLE, PEDESTRIAN, BICYCLE, RAIL_VEHICLE, ParticipantType.parse("tram"))

# edge list of example_a.osm as printed by the graph dump
EXAMPLE_A_EDGES = """\
2001:along 2002:along longitudinal_successor
2001:along 2004:along longitudinal_successor
2002:along 2003:along longitudinal_successor
2004:along 2005:along longitudinal_successor
2005:along 2006:along longitudinal_successor
2007:along 2009:along longitudinal_successor
2008:along 2007:along longitudinal_successor
2009:along 2003:along longitudinal_successor"""


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load_fixture(name: str) -> SceneryMap:
    scenery, _ = load_map(fixture_path(name))
    return scenery


def crossing(permission: CrossingPermission, condition: Optional[Condition] = None) -> BoundaryAttribute:
    if permission is CrossingPermission.CONDITIONAL and condition is None:
        condition = Condition.no_stagnant_traffic()
    return BoundaryAttribute((CrossingDemand(permission, condition),))


def make_behavior(direction: Direction = Direction.ALONG,
                  max_speed: float = 50,
                  long: CrossingPermission = CrossingPermission.ALLOWED,
                  left: CrossingPermission = CrossingPermission.NOT_POSSIBLE,
                  right: CrossingPermission = CrossingPermission.NOT_POSSIBLE,
                  reservation: Optional[ReservationDemand] = None,
                  overtake: bool = True,
                  min_speed: Optional[float] = None,
                  geometry: Optional[Dict[str, Sequence[str]]] = None) -> Behavior:
    geometry = geometry or {}
    speed = [SpeedDemand(SpeedLimitKind.MAXIMUM, max_speed)]
    if min_speed is not None:
        speed.append(SpeedDemand(SpeedLimitKind.MINIMUM, min_speed))

    def boundary(key, permission):
        attribute = crossing(permission)
        return BoundaryAttribute(attribute.demands, tuple(geometry.get(key, ())))

    return Behavior(
        direction=direction,
        speed=SpeedAttribute(tuple(speed)),
        boundary_long=boundary('boundary_long', long),
        boundary_left=boundary('boundary_left', left),
        boundary_right=boundary('boundary_right', right),
        reservation=ReservationAttribute((reservation or ReservationDemand(ReservationKind.OWN),)),
        overtake=OvertakeAttribute((OvertakeDemand(overtake),)),
    )


def make_space(space_id: str = "2001", lane: str = "1001", along: Optional[Behavior] = None,
               against: Optional[Behavior] = None, name: Optional[str] = None) -> AtomicBehaviorSpace:
    return AtomicBehaviorSpace(space_id, lane, along or make_behavior(), against, name=name)


class ChainBuilder:
    """A straight chain of lanelets heading east, each closed by a virtual entry linestring"""

    def __init__(self, lane_count: int, two_way: bool = False, subtype: str = 'road',
                 left_line: Tuple[str, str] = ('line_thin', 'dashed'),
                 right_line: Tuple[str, str] = ('curbstone', '')):
        self.editor = DocumentEditor(OsmDocument(nodes={}, ways={}, relations={}))
        self.two_way = two_way
        lefts = [self.editor.add_node(LAT0 + 4 * STEP, LON0 + 10 * i * STEP) for i in range(lane_count + 1)]
        rights = [self.editor.add_node(LAT0, LON0 + 10 * i * STEP) for i in range(lane_count + 1)]
        self.cross_ways = [self.editor.add_way([lefts[i], rights[i]], {'type': 'virtual'})
                           for i in range(lane_count + 1)]
        self.lanelets: List[str] = []
        self.bounds: Dict[str, Tuple[str, str]] = {}
        self.entries: Dict[str, Tuple[str, str]] = {}
        for i in range(lane_count):
            left = self.editor.add_way([lefts[i], lefts[i + 1]], _line_tags(left_line))
            right = self.editor.add_way([rights[i], rights[i + 1]], _line_tags(right_line))
            tags = {'type': 'lanelet', 'subtype': subtype}
            if not two_way:
                tags['one_way'] = 'yes'
            lanelet = self.editor.add_relation([Member('way', left, 'left'), Member('way', right, 'right')], tags)
            self.lanelets.append(lanelet)
            self.bounds[lanelet] = (left, right)
            self.entries[lanelet] = (self.cross_ways[i], self.cross_ways[i + 1])

    def geometry(self, lanelet_ids: Sequence[str], direction: Direction) -> Dict[str, List[str]]:
        lefts = [self.bounds[l][0] for l in lanelet_ids]
        rights = [self.bounds[l][1] for l in lanelet_ids]
        if direction is Direction.ALONG:
            return {'boundary_long': [self.entries[lanelet_ids[0]][0]], 'boundary_left': lefts,
                    'boundary_right': rights}
        return {'boundary_long': [self.entries[lanelet_ids[-1]][1]], 'boundary_left': rights[::-1],
                'boundary_right': lefts[::-1]}

    def annotate(self, lanelet_ids: Sequence[str], along: BehaviorSpec,
                 against: Optional[BehaviorSpec] = None, name: Optional[str] = None) -> str:
        along_behavior = along.to_behavior(Direction.ALONG, self.geometry(lanelet_ids, Direction.ALONG))
        against_behavior = None
        if against is not None:
            against_behavior = against.to_behavior(Direction.AGAINST, self.geometry(lanelet_ids, Direction.AGAINST))
        return write_space(self.editor, list(lanelet_ids), along_behavior, against_behavior, name)

    def document(self) -> OsmDocument:
        return self.editor.freeze()

    def build(self) -> SceneryMap:
        return decode_document(self.document())


def _line_tags(line: Tuple[str, str]) -> Dict[str, str]:
    line_type, subtype = line
    return {'type': line_type, 'subtype': subtype} if subtype else {'type': line_type}


def default_spec(max_speed: float = 50) -> BehaviorSpec:
    return BehaviorSpec.from_behavior(make_behavior(max_speed=max_speed))


def create_test_map(lane_count: int = 3, two_way: bool = False, annotated: bool = True,
                    specs: Optional[Sequence[BehaviorSpec]] = None) -> SceneryMap:
    """Chain map with one behavior space per lanelet (or none when ``annotated`` is off)"""
    chain = ChainBuilder(lane_count, two_way=two_way)
    if annotated:
        for index, lanelet in enumerate(chain.lanelets):
            spec = specs[index] if specs else default_spec()
            chain.annotate([lanelet], spec, spec if two_way else None)
    return chain.build()


# random generation

def random_condition(rng: random.Random) -> Condition:
    return rng.choice(CONDITIONS)


def random_boundary(rng: random.Random) -> BoundaryAttribute:
    permission = rng.choice(list(CrossingPermission))
    condition = random_condition(rng) if permission is CrossingPermission.CONDITIONAL else None
    return BoundaryAttribute((CrossingDemand(permission, condition),))


def random_reservation(rng: random.Random) -> ReservationAttribute:
    kind = rng.choice(list(ReservationKind))
    entitled = frozenset()
    if kind in (ReservationKind.EXTERNALLY, ReservationKind.EQUALLY):
        entitled = frozenset(rng.sample(PARTICIPANTS, rng.randint(1, 2)))
    condition = random_condition(rng) if rng.random() < 0.2 else None
    return ReservationAttribute((ReservationDemand(kind, entitled, (), condition),))


def random_spec(rng: random.Random) -> BehaviorSpec:
    speed = [SpeedDemand(SpeedLimitKind.MAXIMUM, rng.choice((30, 50, 70, 100)))]
    if rng.random() < 0.3:
        speed.append(SpeedDemand(SpeedLimitKind.MINIMUM, rng.choice((10, 20, 60))))
    if rng.random() < 0.3:
        speed.append(SpeedDemand(SpeedLimitKind.MAXIMUM, rng.choice((30, 40)), random_condition(rng)))
    overtake = [OvertakeDemand(rng.random() < 0.5)]
    if rng.random() < 0.2:
        overtake.append(OvertakeDemand(rng.random() < 0.5, random_condition(rng)))
    return BehaviorSpec(
        speed=SpeedAttribute(tuple(speed)),
        boundary_long=random_boundary(rng),
        boundary_left=random_boundary(rng),
        boundary_right=random_boundary(rng),
        reservation=random_reservation(rng),
        overtake=OvertakeAttribute(tuple(overtake)),
    )


def random_chain_map(rng: random.Random, max_lanes: int = 5) -> Tuple[SceneryMap, ChainBuilder]:
    chain = ChainBuilder(rng.randint(1, max_lanes), two_way=rng.random() < 0.5)
    for lanelet in chain.lanelets:
        against = random_spec(rng) if chain.two_way else None
        chain.annotate([lanelet], random_spec(rng), against, name=f"space_{lanelet}" if rng.random() < 0.3 else None)
    return chain.build(), chain


def random_profile(rng: random.Random) -> CapabilityProfile:
    return CapabilityProfile(
        max_speed_kmh=rng.choice((15, 40, 80, 150)),
        yieldable=frozenset(p for p in PARTICIPANTS if rng.random() < 0.5),
        supported_conditions=frozenset(k for k in ConditionKind if rng.random() < 0.5),
        may_enter_externally_reserved=rng.random() < 0.2,
        may_cross_conditional=rng.random() < 0.6,
    )


def enlarge_profile(rng: random.Random, profile: CapabilityProfile) -> CapabilityProfile:
    return CapabilityProfile(
        max_speed_kmh=profile.max_speed_kmh + rng.choice((0, 20, 100)),
        yieldable=profile.yieldable | frozenset(p for p in PARTICIPANTS if rng.random() < 0.3),
        supported_conditions=profile.supported_conditions | frozenset(k for k in ConditionKind if rng.random() < 0.3),
        may_enter_externally_reserved=profile.may_enter_externally_reserved or rng.random() < 0.2,
        may_cross_conditional=profile.may_cross_conditional or rng.random() < 0.3,
    )


def random_graph(rng: random.Random, max_vertices: int = 12) -> BehaviorGraph:
    """Graph over random behaviors with random edges; lateral kinds mixed in"""
    count = rng.randint(1, max_vertices)
    vertices: List[Vertex] = []
    for i in range(count):
        space_id = str(2001 + i // 2)
        direction = Direction.ALONG if i % 2 == 0 else Direction.AGAINST
        vertices.append((space_id, direction))
    behaviors = {v: random_spec(rng).to_behavior(v[1]) for v in vertices}
    lane_kinds = {v: frozenset({rng.choice((LaneKind.VEHICLE_LANE, LaneKind.VEHICLE_LANE, LaneKind.BICYCLE_LANE))})
                  for v in vertices}
    edges = []
    for source in vertices:
        for target in vertices:
            if source[0] == target[0] or rng.random() > 0.3:
                continue
            kind = rng.choice((EdgeKind.LONGITUDINAL, EdgeKind.LONGITUDINAL, EdgeKind.LATERAL_LEFT,
                               EdgeKind.LATERAL_RIGHT))
            demands = (behaviors[target].boundary_long.demands if kind is EdgeKind.LONGITUDINAL
                       else random_boundary(rng).demands)
            edges.append(Edge(source, target, kind, demands))
    return BehaviorGraph(behaviors, edges, lane_kinds)
