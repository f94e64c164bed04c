"""Geometry-level edits on the OSM document behind a map: lanelet splits and longitudinal boundaries."""
import math
from collections import defaultdict
from dataclasses import replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from ..core.errors import InvalidCutError, UnknownElementError
from ..core.scenery import Diagnostic, SceneryMap, element_sort_key
from . import schema
from .codec import decode_document, encode_map, oriented_bound_nodes
from .document import DocumentEditor, Member, OsmDocument, OsmRelation, OsmWay


class BoundaryEnd(Enum):
    START = "start"
    END = "end"


def _document(scenery: SceneryMap) -> OsmDocument:
    return scenery.document if scenery.document is not None else encode_map(scenery)


def _lanelet_relation(document: OsmDocument, lanelet_id: str) -> OsmRelation:
    relation = document.relations.get(lanelet_id)
    if relation is None or relation.tags.get(schema.TAG_TYPE) != schema.TYPE_LANELET:
        raise UnknownElementError("lanelet", lanelet_id)
    return relation


def _bound_refs(relation: OsmRelation) -> Tuple[str, str]:
    lefts = relation.members_with_role('left')
    rights = relation.members_with_role('right')
    if len(lefts) != 1 or len(rights) != 1:
        raise UnknownElementError("lanelet", relation.id)
    return lefts[0].ref, rights[0].ref


def _coordinates(document: OsmDocument, node_ids: Sequence[str]) -> List[Tuple[float, float]]:
    return [(document.nodes[n].lat, document.nodes[n].lon) for n in node_ids]


def _polyline_length(points: Sequence[Tuple[float, float]]) -> float:
    return sum(math.dist(a, b) for a, b in zip(points, points[1:]))


def _cut_point(points: List[Tuple[float, float]], fraction: float) -> Tuple[int, Tuple[float, float], bool]:
    """Where ``fraction`` of the polyline's length falls.

    Returns the index of the vertex after the cut and the cut point. When the
    cut lands on an interior vertex the flag is set and the index is that vertex.
    """
    lengths = [math.dist(a, b) for a, b in zip(points, points[1:])]
    target = fraction * sum(lengths)
    walked = 0.0
    for index, length in enumerate(lengths):
        if walked + length >= target and length > 0:
            t = (target - walked) / length
            if t > 1 - 1e-9 and index + 1 < len(points) - 1:
                return index + 1, points[index + 1], True
            if t < 1e-9 and index > 0:
                return index, points[index], True
            (lat1, lon1), (lat2, lon2) = points[index], points[index + 1]
            return index + 1, (lat1 + t * (lat2 - lat1), lon1 + t * (lon2 - lon1)), False
        walked += length
    raise InvalidCutError("cannot cut a bound of zero length")


def _midpoint(document: OsmDocument, a: str, b: str) -> Tuple[float, float]:
    na, nb = document.nodes[a], document.nodes[b]
    return (na.lat + nb.lat) / 2, (na.lon + nb.lon) / 2


def centerline_chord_length(scenery: SceneryMap, lanelet_id: str) -> float:
    """Distance between the midpoints of the lanelet's entry and exit node pairs, in degrees"""
    document = _document(scenery)
    left, right = oriented_bound_nodes(document, *_bound_refs(_lanelet_relation(document, lanelet_id)))
    if not left or not right:
        raise InvalidCutError(f"lanelet {lanelet_id} has no bound geometry")
    return math.dist(_midpoint(document, left[0], right[0]), _midpoint(document, left[-1], right[-1]))


def _bound_geometry(document: OsmDocument, lanelet_id: str):
    """Bound way ids and oriented node sequences of a lanelet, or None when it cannot be cut"""
    relation = document.relations[lanelet_id]
    lefts, rights = relation.members_with_role('left'), relation.members_with_role('right')
    if len(lefts) != 1 or len(rights) != 1 or lefts[0].ref == rights[0].ref:
        return None
    refs = (lefts[0].ref, rights[0].ref)
    bounds = oriented_bound_nodes(document, *refs)
    for nodes in bounds:
        if len(nodes) < 2 or not all(n in document.nodes for n in nodes):
            return None
        if _polyline_length(_coordinates(document, nodes)) == 0:
            return None
    return refs, bounds


class _WaySplitter:
    """Cuts each bound way once, so lanelets sharing a bound also share its halves"""

    def __init__(self, document: OsmDocument, editor: DocumentEditor):
        self.document = document
        self.editor = editor
        # way id -> (cut node, half holding the way's first node, other half)
        self.cuts: Dict[str, Tuple[str, Tuple[str, ...], Tuple[str, ...]]] = {}
        self.halves: Dict[str, Tuple[str, str]] = {}

    def _points(self, node_ids: Sequence[str]) -> List[Tuple[float, float]]:
        return [(self.editor.nodes[n].lat, self.editor.nodes[n].lon) for n in node_ids]

    def _same_direction(self, way_id: str, oriented: Sequence[str]) -> bool:
        return oriented[0] == self.document.ways[way_id].nodes[0]

    def fraction(self, way_id: str, oriented: Sequence[str]) -> float:
        """Share of the oriented bound's length lying before its cut"""
        _, first, second = self.cuts[way_id]
        before = first if self._same_direction(way_id, oriented) else tuple(reversed(second))
        return _polyline_length(self._points(before)) / _polyline_length(self._points(oriented))

    def cut(self, way_id: str, oriented: Sequence[str], fraction: float) -> str:
        if way_id not in self.cuts:
            raw = self.document.ways[way_id].nodes
            index, (lat, lon), on_vertex = _cut_point(self._points(oriented), fraction)
            if not self._same_direction(way_id, oriented):
                index = len(raw) - 1 - index if on_vertex else len(raw) - index
            if on_vertex:
                node = raw[index]
                first, second = raw[:index + 1], raw[index:]
            else:
                node = self.editor.add_node(lat, lon)
                first, second = raw[:index] + (node,), (node,) + raw[index:]
            tags = dict(self.document.ways[way_id].tags)
            self.cuts[way_id] = (node, first, second)
            self.halves[way_id] = (self.editor.add_way(first, tags), self.editor.add_way(second, tags))
        return self.cuts[way_id][0]

    def half(self, way_id: str, oriented: Sequence[str], position: int) -> str:
        """The half at the lanelet's start (position 0) or end (position 1)"""
        first, second = self.halves[way_id]
        if self._same_direction(way_id, oriented):
            return (first, second)[position]
        return (second, first)[position]


def _segment_sides(editor: DocumentEditor, lanes: Sequence[str],
                   split: Dict[str, Tuple[str, str, str]]) -> Optional[Tuple[List[str], List[str]]]:
    """A segment's split lanes regrouped into the cross sections either side of the cut"""
    if not lanes or not all(lane in split for lane in lanes):
        return None

    def bounds(lanelet_id):
        return {m.ref for m in editor.relations[lanelet_id].members if m.type == 'way'}

    near, far = [split[lanes[0]][0]], [split[lanes[0]][1]]
    for lane in lanes[1:]:
        first, second, _ = split[lane]
        if bounds(first) & bounds(near[-1]):
            near.append(first)
            far.append(second)
        elif bounds(second) & bounds(near[-1]):
            near.append(second)
            far.append(first)
        else:
            return None
    return near, far


def split_lanelet(scenery: SceneryMap, lanelet_id: str,
                  cut: float) -> Tuple[SceneryMap, Tuple[str, str], str]:
    """Replace a lanelet by two halves meeting at a new cut linestring.

    Lanelets sharing a cut bound are split at the same node, and the cut carries
    on across their other bound, so lateral neighbors stay neighbors. Every
    relation that referenced a split lanelet now references both halves in its
    place; a covering behavior space becomes a two-lanelet chain and is reported
    with ``behavior_space_needs_reassignment``. Segments whose lanes were all
    split become two segments, one per side of the cut.
    """
    document = _document(scenery)
    relation = _lanelet_relation(document, lanelet_id)
    if not 0 < cut < 1:
        raise InvalidCutError(f"cut {cut} outside (0, 1)")
    _bound_refs(relation)
    if _bound_geometry(document, lanelet_id) is None:
        raise InvalidCutError(f"lanelet {lanelet_id} needs two resolvable nodes per bound")

    by_bound: Dict[str, List[str]] = defaultdict(list)
    for other in document.relations.values():
        if other.tags.get(schema.TAG_TYPE) == schema.TYPE_LANELET:
            for member in other.members:
                if member.type == 'way' and member.role in ('left', 'right'):
                    by_bound[member.ref].append(other.id)

    editor = DocumentEditor(document)
    splitter = _WaySplitter(document, editor)
    split: Dict[str, Tuple[str, str, str]] = {}
    pending = [lanelet_id]
    while pending:
        current = pending.pop(0)
        geometry = _bound_geometry(document, current) if current not in split else None
        if geometry is None:
            continue
        refs, bounds = geometry
        done = [(ref, nodes) for ref, nodes in zip(refs, bounds) if ref in splitter.cuts]
        fraction = splitter.fraction(*done[0]) if done else cut
        cut_nodes = [splitter.cut(ref, nodes, fraction) for ref, nodes in zip(refs, bounds)]
        cut_way = editor.add_way(cut_nodes, {schema.TAG_TYPE: schema.VIRTUAL_LINE})
        tags = dict(document.relations[current].tags)
        halves = [editor.add_relation([Member('way', splitter.half(refs[0], bounds[0], position), 'left'),
                                       Member('way', splitter.half(refs[1], bounds[1], position), 'right')], tags)
                  for position in (0, 1)]
        del editor.relations[current]
        split[current] = (halves[0], halves[1], cut_way)
        pending.extend(sorted((n for ref in refs for n in by_bound[ref] if n not in split), key=element_sort_key))

    diagnostics = []
    new_segments: Dict[str, str] = {}
    for owner in document.relations.values():
        touched = [m.ref for m in owner.members if m.type == 'relation' and m.ref in split]
        if owner.id in split or not touched:
            continue
        owner_type = owner.tags.get(schema.TAG_TYPE)
        sides = None
        if owner_type == schema.TYPE_SEGMENT:
            sides = _segment_sides(editor, [m.ref for m in owner.members], split)
        if sides is not None:
            near, far = sides
            editor.replace_members(owner.id, [Member('relation', lane, schema.ROLE_LANE) for lane in near])
            new_segments[owner.id] = editor.add_relation(
                [Member('relation', lane, schema.ROLE_LANE) for lane in far], dict(owner.tags))
            continue
        members = []
        for member in owner.members:
            if member.type == 'relation' and member.ref in split:
                first, second, _ = split[member.ref]
                members.extend((Member('relation', first, member.role), Member('relation', second, member.role)))
            else:
                members.append(member)
        editor.replace_members(owner.id, members)
        if owner_type == schema.TYPE_BEHAVIOR_SPACE:
            first, second, _ = split[touched[0]]
            diagnostics.append(Diagnostic(
                "behavior_space_needs_reassignment", owner.id,
                f"lanelet {touched[0]} was split into {first} and {second}",
                f"behavior_space {owner.id}"))

    for owner_id, owner in list(editor.relations.items()):
        if any(m.type == 'relation' and m.ref in new_segments for m in owner.members):
            members = []
            for member in owner.members:
                members.append(member)
                if member.type == 'relation' and member.ref in new_segments:
                    members.append(Member('relation', new_segments[member.ref], member.role))
            editor.replace_members(owner_id, members)

    still_used = {m.ref for r in editor.relations.values() for m in r.members if m.type == 'way'}
    for way_ref in splitter.cuts:
        if way_ref not in still_used:
            del editor.ways[way_ref]

    first, second, cut_way = split[lanelet_id]
    logger.debug("split lanelet {} at {:g} into {} and {} (cut way {}), {} lanelet(s) split in all",
                 lanelet_id, cut, first, second, cut_way, len(split))
    result = decode_document(editor.freeze())
    result = replace(result, diagnostics=result.diagnostics + tuple(diagnostics))
    return result, (first, second), cut_way


def _bound_endpoints(document: OsmDocument, lanelet_id: str, at: BoundaryEnd) -> Tuple[str, str]:
    left_ref, right_ref = _bound_refs(_lanelet_relation(document, lanelet_id))
    left, right = oriented_bound_nodes(document, left_ref, right_ref)
    if not left or not right:
        raise InvalidCutError(f"lanelet {lanelet_id} has no bound geometry")
    if at is BoundaryEnd.START:
        return left[0], right[0]
    return left[-1], right[-1]


def find_longitudinal_boundary(document: OsmDocument, lanelet_id: str, at: BoundaryEnd):
    """Id of an existing linestring joining the two bound endpoints at ``at``, or None"""
    relation = _lanelet_relation(document, lanelet_id)
    bounds = set(_bound_refs(relation))
    endpoints = set(_bound_endpoints(document, lanelet_id, at))
    candidates: List[OsmWay] = [
        way for way in document.ways.values()
        if way.id not in bounds and len(way.nodes) >= 2 and {way.nodes[0], way.nodes[-1]} == endpoints
    ]
    if not candidates:
        return None
    # stop lines first, then the smallest id
    candidates.sort(key=lambda w: (w.tags.get(schema.TAG_TYPE) not in schema.LONGITUDINAL_LINE_TYPES,
                                   element_sort_key(w.id)))
    return candidates[0].id


def add_longitudinal_boundary(scenery: SceneryMap, lanelet_id: str,
                              at: BoundaryEnd = BoundaryEnd.START) -> Tuple[SceneryMap, str]:
    """Reuse or create the linestring closing a lanelet at its start or end"""
    document = _document(scenery)
    existing = find_longitudinal_boundary(document, lanelet_id, at)
    if existing is not None:
        return scenery, existing
    editor = DocumentEditor(document)
    way_id = editor.add_way(_bound_endpoints(document, lanelet_id, at), {schema.TAG_TYPE: schema.VIRTUAL_LINE})
    logger.debug("added longitudinal boundary {} at the {} of lanelet {}", way_id, at.value, lanelet_id)
    result = decode_document(editor.freeze())
    return replace(result, diagnostics=scenery.diagnostics), way_id
