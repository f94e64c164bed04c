"""Decoding OSM documents into sealed scenery maps and encoding BSSD relations back."""
import math
from dataclasses import replace
from pathlib import Path
from types import MappingProxyType
from typing import Dict, List, Optional, Tuple, Union

from loguru import logger

from ..core.errors import InvariantViolation, UnknownRoleError
from ..core.model import (AreaKind, AtomicBehaviorSpace, Behavior, BoundaryAttribute, Condition,
                          CrossingDemand, CrossingPermission, Direction, LaneElement, LaneKind,
                          LinkRole, NetworkNode, NonRegularMotionSpace, OvertakeAttribute,
                          OvertakeDemand, ReservationAttribute, ReservationDemand, ReservationKind,
                          ReservationLink, Segment, SpeedAttribute, SpeedDemand, SpeedLimitKind,
                          Way, participants)
from ..core.scenery import Diagnostic, SceneryMap
from . import schema
from .document import (DocumentEditor, Member, OsmDocument, OsmRelation, OsmWay, parse_document,
                       serialize_document)

Source = Union[str, Path, bytes]

NON_REGULAR_LANELET_SUBTYPES = {'walkway': AreaKind.SIDEWALK, 'stairs': AreaKind.SIDEWALK}


def _distance(document: OsmDocument, a: str, b: str) -> float:
    na, nb = document.nodes[a], document.nodes[b]
    return math.hypot(na.lat - nb.lat, na.lon - nb.lon)


def oriented_bound_nodes(document: OsmDocument, left_id: str, right_id: str) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """Node sequences of both bounds, the left one inverted if it runs against the right one"""
    left = document.ways[left_id].nodes if left_id in document.ways else ()
    right = document.ways[right_id].nodes if right_id in document.ways else ()
    if len(left) < 2 or len(right) < 2 or not all(n in document.nodes for n in (left[0], left[-1], right[0], right[-1])):
        return left, right
    straight = _distance(document, left[0], right[0]) + _distance(document, left[-1], right[-1])
    crossed = _distance(document, left[-1], right[0]) + _distance(document, left[0], right[-1])
    if crossed < straight:
        left = tuple(reversed(left))
    return left, right


def _condition(token: Optional[str]) -> Optional[Condition]:
    return Condition.parse(token) if token is not None else None


class _Decoder:
    def __init__(self, document: OsmDocument):
        self.document = document
        self.diagnostics: List[Diagnostic] = []

    def report(self, code: str, element_id: str, message: str, location: str = "") -> None:
        self.diagnostics.append(Diagnostic(code, element_id, message, location))

    def relations_of_type(self, relation_type: str) -> List[OsmRelation]:
        return [r for r in self.document.relations.values() if r.tags.get(schema.TAG_TYPE) == relation_type]

    def member_relation(self, owner: OsmRelation, member: Member) -> OsmRelation:
        relation = self.document.relations.get(member.ref) if member.type == 'relation' else None
        if relation is None:
            raise InvariantViolation("dangling_ref",
                                     f"member {member.type} {member.ref} with role {member.role!r} does not exist",
                                     owner.id)
        return relation

    def check_roles(self) -> None:
        for relation in self.document.relations.values():
            allowed = schema.ALLOWED_ROLES.get(relation.tags.get(schema.TAG_TYPE))
            if allowed is None:
                continue
            for member in relation.members:
                if member.role not in allowed:
                    raise UnknownRoleError(relation.id, member.role)

    # scenery side

    def lanes_and_areas(self) -> Tuple[List[LaneElement], List[NonRegularMotionSpace]]:
        lanes, areas = [], []
        for relation in self.relations_of_type(schema.TYPE_LANELET):
            subtype = relation.tags.get(schema.TAG_SUBTYPE, 'road')
            if subtype in NON_REGULAR_LANELET_SUBTYPES:
                areas.append(NonRegularMotionSpace(relation.id, NON_REGULAR_LANELET_SUBTYPES[subtype]))
                continue
            lefts = relation.members_with_role('left')
            rights = relation.members_with_role('right')
            if len(lefts) != 1 or len(rights) != 1:
                self.report("invalid_lanelet", relation.id, "lanelet needs exactly one left and one right bound",
                            f"relation {relation.id}")
                continue
            left, right = oriented_bound_nodes(self.document, lefts[0].ref, rights[0].ref)
            kind = schema.LANE_SUBTYPES.get(subtype, LaneKind.OTHER)
            try:
                lanes.append(LaneElement(
                    id=relation.id,
                    left_bound=lefts[0].ref,
                    right_bound=rights[0].ref,
                    kind=kind,
                    one_directional=relation.tags.get(schema.TAG_ONE_WAY) == 'yes',
                    kind_label=subtype if kind is LaneKind.OTHER else "",
                    start_nodes=(left[0], right[0]) if left and right else (),
                    end_nodes=(left[-1], right[-1]) if left and right else (),
                ))
            except InvariantViolation as e:
                self.report(e.rule, relation.id, e.message, f"relation {relation.id}")

        for relation in self.relations_of_type(schema.TYPE_AREA):
            subtype = relation.tags.get(schema.TAG_SUBTYPE, '')
            outer = relation.members_with_role('outer')
            kind = schema.AREA_SUBTYPES.get(subtype, AreaKind.OTHER)
            areas.append(NonRegularMotionSpace(
                id=relation.id,
                kind=kind,
                geometry_ref=outer[0].ref if outer else None,
                kind_label=subtype if kind is AreaKind.OTHER else "",
            ))
        return lanes, areas

    # behavior side

    def speed(self, relation: OsmRelation) -> SpeedAttribute:
        demands = []
        tags = relation.tags
        try:
            if schema.TAG_SPEED_MAX in tags:
                demands.append(SpeedDemand(SpeedLimitKind.MAXIMUM, float(tags[schema.TAG_SPEED_MAX])))
            if schema.TAG_SPEED_MIN in tags:
                demands.append(SpeedDemand(SpeedLimitKind.MINIMUM, float(tags[schema.TAG_SPEED_MIN])))
            for key, value in tags.items():
                if key.startswith(schema.CONDITIONAL_SPEED_MAX):
                    demands.append(SpeedDemand(SpeedLimitKind.MAXIMUM, float(value),
                                               Condition.parse(key[len(schema.CONDITIONAL_SPEED_MAX):])))
                elif key.startswith(schema.CONDITIONAL_SPEED_MIN):
                    demands.append(SpeedDemand(SpeedLimitKind.MINIMUM, float(value),
                                               Condition.parse(key[len(schema.CONDITIONAL_SPEED_MIN):])))
        except ValueError as e:
            raise InvariantViolation("invalid_demand", f"speed value is not a number ({e})")
        return SpeedAttribute(tuple(demands))

    def overtake(self, relation: OsmRelation) -> OvertakeAttribute:
        demands = []
        try:
            if schema.TAG_OVERTAKE in relation.tags:
                demands.append(OvertakeDemand(schema.parse_flag(relation.tags[schema.TAG_OVERTAKE])))
            for key, value in relation.tags.items():
                if key.startswith(schema.CONDITIONAL_OVERTAKE):
                    demands.append(OvertakeDemand(schema.parse_flag(value),
                                                  Condition.parse(key[len(schema.CONDITIONAL_OVERTAKE):])))
        except ValueError as e:
            raise InvariantViolation("invalid_demand", str(e))
        return OvertakeAttribute(tuple(demands))

    def boundary(self, behavior: OsmRelation, role: str) -> BoundaryAttribute:
        members = behavior.members_with_role(role)
        if not members:
            raise InvariantViolation("missing_attribute", f"behavior has no {role}")
        demands, refs = [], []
        for member in members:
            relation = self.member_relation(behavior, member)
            try:
                if schema.TAG_CROSSING not in relation.tags:
                    raise InvariantViolation("missing_crossing_demand", "boundary carries no crossing tag")
                try:
                    permission = CrossingPermission(relation.tags[schema.TAG_CROSSING])
                except ValueError:
                    raise InvariantViolation("invalid_demand",
                                             f"unknown crossing value {relation.tags[schema.TAG_CROSSING]!r}")
                demands.append(CrossingDemand(permission, _condition(relation.tags.get(schema.TAG_CONDITION))))
            except InvariantViolation as e:
                raise e.with_element(relation.id)
            for geometry in relation.members_with_role(schema.ROLE_BOUNDARY):
                if geometry.ref not in refs:
                    refs.append(geometry.ref)
        return BoundaryAttribute(tuple(demands), tuple(refs))

    def reservation(self, behavior: OsmRelation) -> ReservationAttribute:
        members = behavior.members_with_role(schema.ROLE_RESERVATION)
        if not members:
            raise InvariantViolation("missing_attribute", "behavior has no reservation")
        demands = []
        for member in members:
            relation = self.member_relation(behavior, member)
            try:
                try:
                    kind = ReservationKind(relation.tags.get(schema.TAG_RESERVATION, ''))
                except ValueError:
                    raise InvariantViolation("invalid_demand",
                                             f"unknown reservation value {relation.tags.get(schema.TAG_RESERVATION)!r}")
                objects = relation.tags.get(schema.TAG_OBJECT, '')
                links = [ReservationLink(m.ref, LinkRole.ORIGIN if m.role == schema.ROLE_LINK else LinkRole.DESTINATION)
                         for m in relation.members]
                demands.append(ReservationDemand(kind, participants(objects.split(';')), tuple(links),
                                                 _condition(relation.tags.get(schema.TAG_CONDITION))))
            except InvariantViolation as e:
                raise e.with_element(relation.id)
        return ReservationAttribute(tuple(demands))

    def behavior(self, relation: OsmRelation, direction: Direction) -> Behavior:
        if relation.tags.get(schema.TAG_TYPE) != schema.TYPE_BEHAVIOR:
            raise InvariantViolation("invalid_member", f"relation {relation.id} is not a behavior", relation.id)
        try:
            speed = self.speed(relation)
            overtake = self.overtake(relation)
        except InvariantViolation as e:
            raise e.with_element(relation.id)
        try:
            return Behavior(
                direction=direction,
                speed=speed,
                boundary_long=self.boundary(relation, schema.ROLE_BOUNDARY_LONG),
                boundary_left=self.boundary(relation, schema.ROLE_BOUNDARY_LEFT),
                boundary_right=self.boundary(relation, schema.ROLE_BOUNDARY_RIGHT),
                reservation=self.reservation(relation),
                overtake=overtake,
            )
        except InvariantViolation as e:
            raise e.with_element(relation.id)

    def space(self, relation: OsmRelation) -> AtomicBehaviorSpace:
        lanelets = [m.ref for m in relation.members_with_role(schema.ROLE_LANELET)]
        alongs = relation.members_with_role(schema.ROLE_ALONG)
        againsts = relation.members_with_role(schema.ROLE_AGAINST)
        if not lanelets:
            raise InvariantViolation("missing_attribute", "behavior space references no lanelet", relation.id)
        if len(alongs) != 1 or len(againsts) > 1:
            raise InvariantViolation("missing_attribute",
                                     "behavior space needs one along and at most one against behavior", relation.id)
        along = self.behavior(self.member_relation(relation, alongs[0]), Direction.ALONG)
        against = None
        if againsts:
            against = self.behavior(self.member_relation(relation, againsts[0]), Direction.AGAINST)
        return AtomicBehaviorSpace(
            id=relation.id,
            lane=lanelets[0],
            along=along,
            against=against,
            extra_lanes=tuple(lanelets[1:]),
            name=relation.tags.get(schema.TAG_NAME),
        )

    def spaces(self) -> Tuple[List[AtomicBehaviorSpace], Dict[str, Tuple[str, ...]]]:
        spaces, coverage = [], {}
        for relation in self.relations_of_type(schema.TYPE_BEHAVIOR_SPACE):
            coverage[relation.id] = tuple(m.ref for m in relation.members_with_role(schema.ROLE_LANELET))
            try:
                spaces.append(self.space(relation))
            except InvariantViolation as e:
                element = e.element_id or relation.id
                self.report(e.rule, element, e.message, f"behavior_space {relation.id}")
        return spaces, coverage

    def topology(self) -> Tuple[List[Segment], List[Way], List[NetworkNode]]:
        segments, ways, nodes = [], [], []
        for relation in self.relations_of_type(schema.TYPE_SEGMENT):
            try:
                segments.append(Segment(relation.id, tuple(m.ref for m in relation.members)))
            except InvariantViolation as e:
                self.report(e.rule, relation.id, e.message, f"relation {relation.id}")
        for relation in self.relations_of_type(schema.TYPE_WAY):
            ways.append(Way(relation.id, tuple(m.ref for m in relation.members)))
        for relation in self.relations_of_type(schema.TYPE_NODE):
            try:
                nodes.append(NetworkNode(
                    relation.id,
                    incoming_ways=tuple(m.ref for m in relation.members_with_role(schema.ROLE_INCOMING)),
                    outgoing_ways=tuple(m.ref for m in relation.members_with_role(schema.ROLE_OUTGOING)),
                    internal_ways=tuple(m.ref for m in relation.members_with_role(schema.ROLE_INTERNAL)),
                ))
            except InvariantViolation as e:
                self.report(e.rule, relation.id, e.message, f"relation {relation.id}")
        return segments, ways, nodes


def _unique(diagnostics: List[Diagnostic]) -> List[Diagnostic]:
    seen, unique = set(), []
    for diagnostic in diagnostics:
        key = (diagnostic.code, diagnostic.element_id)
        if key not in seen:
            seen.add(key)
            unique.append(diagnostic)
    return unique


def decode_document(document: OsmDocument) -> SceneryMap:
    decoder = _Decoder(document)
    decoder.check_roles()
    decoder.diagnostics.extend(document.dangling_refs())
    lanes, areas = decoder.lanes_and_areas()
    spaces, coverage = decoder.spaces()
    segments, ways, nodes = decoder.topology()
    scenery = SceneryMap.seal(lanes, areas, spaces, coverage, segments, ways, nodes,
                              diagnostics=decoder.diagnostics, document=document)
    # sealing may add diagnostics of its own; keep one per (code, element)
    return replace(scenery, diagnostics=tuple(_unique(list(scenery.diagnostics))))


def read_source(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    return Path(source).read_bytes()


def load_map(source: Source) -> Tuple[SceneryMap, List[Diagnostic]]:
    document = parse_document(read_source(source))
    scenery = decode_document(document)
    if not isinstance(source, bytes):
        logger.info("loaded {}: {} lanelets, {} behavior spaces, {} diagnostics",
                    source, len(scenery.lanes), len(scenery.spaces), len(scenery.diagnostics))
    return scenery, list(scenery.diagnostics)


def save_map(scenery: SceneryMap) -> bytes:
    document = scenery.document if scenery.document is not None else encode_map(scenery)
    return serialize_document(document)


# encoding

def _condition_tags(condition: Optional[Condition]) -> Dict[str, str]:
    return {schema.TAG_CONDITION: condition.token()} if condition else {}


def write_behavior(editor: DocumentEditor, behavior: Behavior) -> str:
    members: List[Member] = []
    for role in schema.BOUNDARY_ROLES:
        attribute: BoundaryAttribute = getattr(behavior, role)
        for demand in attribute.demands:
            tags = {schema.TAG_TYPE: schema.TYPE_BOUNDARY, schema.TAG_CROSSING: demand.permission.value}
            tags.update(_condition_tags(demand.condition))
            geometry = [Member('way', ref, schema.ROLE_BOUNDARY) for ref in attribute.geometry_refs]
            members.append(Member('relation', editor.add_relation(geometry, tags), role))

    for demand in behavior.reservation.demands:
        tags = {schema.TAG_TYPE: schema.TYPE_RESERVATION, schema.TAG_RESERVATION: demand.kind.value}
        if demand.entitled:
            tags[schema.TAG_OBJECT] = ";".join(demand.entitled_tokens())
        tags.update(_condition_tags(demand.condition))
        links = [Member('relation', link.target,
                        schema.ROLE_LINK if link.role is LinkRole.ORIGIN else schema.ROLE_LINK_DESTINATION)
                 for link in demand.links]
        members.append(Member('relation', editor.add_relation(links, tags), schema.ROLE_RESERVATION))

    tags = {schema.TAG_TYPE: schema.TYPE_BEHAVIOR}
    tags.update(behavior_tags(behavior))
    return editor.add_relation(members, tags)


def behavior_tags(behavior: Behavior) -> Dict[str, str]:
    """Speed and overtake demands as behavior relation tags"""
    tags = {}
    for demand in behavior.speed.demands:
        if demand.condition is None:
            key = schema.TAG_SPEED_MAX if demand.limit_kind is SpeedLimitKind.MAXIMUM else schema.TAG_SPEED_MIN
        else:
            prefix = (schema.CONDITIONAL_SPEED_MAX if demand.limit_kind is SpeedLimitKind.MAXIMUM
                      else schema.CONDITIONAL_SPEED_MIN)
            key = prefix + demand.condition.token()
        tags[key] = schema.format_speed(demand.value)
    for demand in behavior.overtake.demands:
        key = schema.TAG_OVERTAKE if demand.condition is None else schema.CONDITIONAL_OVERTAKE + demand.condition.token()
        tags[key] = schema.format_flag(demand.permitted)
    return tags


def write_space(editor: DocumentEditor, lanelet_ids: List[str], along: Behavior,
                against: Optional[Behavior] = None, name: Optional[str] = None,
                relation_id: Optional[str] = None) -> str:
    members = [Member('relation', lanelet_id, schema.ROLE_LANELET) for lanelet_id in lanelet_ids]
    members.append(Member('relation', write_behavior(editor, along), schema.ROLE_ALONG))
    if against is not None:
        members.append(Member('relation', write_behavior(editor, against), schema.ROLE_AGAINST))
    tags = {schema.TAG_TYPE: schema.TYPE_BEHAVIOR_SPACE}
    if name:
        tags[schema.TAG_NAME] = name
    return editor.add_relation(members, tags, relation_id=relation_id)


AREA_KIND_SUBTYPE = {kind: subtype for subtype, kind in schema.AREA_SUBTYPES.items()}


def encode_map(scenery: SceneryMap) -> OsmDocument:
    """Write a geometry-free map as an OSM document; bounds become node-less ways"""
    ids = list(scenery.lanes) + list(scenery.areas) + list(scenery.spaces)
    editor = DocumentEditor(OsmDocument(nodes={}, ways={}, relations={}))
    editor.reserve_ids(ids)
    for lane in scenery.lanes.values():
        for bound in (lane.left_bound, lane.right_bound):
            editor.ways.setdefault(bound, OsmWay(bound, ()))
        tags = {schema.TAG_TYPE: schema.TYPE_LANELET,
                schema.TAG_SUBTYPE: schema.LANE_KIND_SUBTYPE.get(lane.kind, lane.kind_label or 'road')}
        if lane.one_directional:
            tags[schema.TAG_ONE_WAY] = 'yes'
        editor.relations[lane.id] = OsmRelation(
            lane.id, (Member('way', lane.left_bound, 'left'), Member('way', lane.right_bound, 'right')),
            MappingProxyType(tags))
    for area in scenery.areas.values():
        subtype = AREA_KIND_SUBTYPE.get(area.kind, area.kind_label or 'other')
        members = (Member('way', area.geometry_ref, 'outer'),) if area.geometry_ref else ()
        editor.relations[area.id] = OsmRelation(
            area.id, members, MappingProxyType({schema.TAG_TYPE: schema.TYPE_AREA, schema.TAG_SUBTYPE: subtype}))
    for space in scenery.spaces.values():
        write_space(editor, list(space.lanes), space.along, space.against, space.name, relation_id=space.id)
    return editor.freeze()
