"""Attaching behavior spaces to bare lanelets, and heuristic defaults for them."""
from typing import Dict, List, Optional, Sequence

from loguru import logger

from ..core.errors import AlreadyCoveredError, InvariantViolation, UnknownElementError
from ..core.model import (BoundaryAttribute, CrossingDemand, CrossingPermission, Direction, LaneElement,
                          OvertakeAttribute, OvertakeDemand, ReservationAttribute, ReservationDemand,
                          ReservationKind, SpeedAttribute, SpeedDemand, SpeedLimitKind)
from ..core.scenery import SceneryMap
from ..osm import schema
from ..osm.codec import decode_document, encode_map, write_space
from ..osm.document import DocumentEditor
from ..osm.editing import BoundaryEnd, add_longitudinal_boundary
from .spec_text import BehaviorSpec


def _geometry(lanes: List[LaneElement], direction: Direction, long_ref: Optional[str]) -> Dict[str, List[str]]:
    lefts = [lane.left_bound for lane in lanes]
    rights = [lane.right_bound for lane in lanes]
    if direction is Direction.AGAINST:
        lefts, rights = list(reversed(rights)), list(reversed(lefts))
    return {
        'boundary_long': [long_ref] if long_ref else [],
        'boundary_left': lefts,
        'boundary_right': rights,
    }


def annotate(scenery: SceneryMap, lanelet_ids: Sequence[str], along: BehaviorSpec,
             against: Optional[BehaviorSpec] = None, name: Optional[str] = None) -> SceneryMap:
    """New map with one behavior space over the given lanelet chain.

    The along behavior's longitudinal boundary is the linestring closing the
    first lanelet's start, the against behavior's the one closing the last
    lanelet's end; both are reused when present and created otherwise.
    """
    if not lanelet_ids:
        raise UnknownElementError("lanelet", "(none)")
    lanes = [scenery.lane(lanelet_id) for lanelet_id in lanelet_ids]
    for lanelet_id in lanelet_ids:
        covering = scenery.covering_spaces(lanelet_id)
        if covering:
            raise AlreadyCoveredError(lanelet_id, covering[0])
    if against is None and not all(lane.one_directional for lane in lanes):
        raise InvariantViolation("missing_against_behavior",
                                 "two-directional lanelets need an against behavior", lanelet_ids[0])

    current = scenery if scenery.document is not None else decode_document(encode_map(scenery))
    long_refs: Dict[Direction, Optional[str]] = {Direction.ALONG: None, Direction.AGAINST: None}
    if lanes[0].start_nodes:
        current, long_refs[Direction.ALONG] = add_longitudinal_boundary(current, lanelet_ids[0], BoundaryEnd.START)
    if against is not None and lanes[-1].end_nodes:
        current, long_refs[Direction.AGAINST] = add_longitudinal_boundary(current, lanelet_ids[-1], BoundaryEnd.END)

    along_behavior = along.to_behavior(Direction.ALONG, _geometry(lanes, Direction.ALONG, long_refs[Direction.ALONG]))
    against_behavior = None
    if against is not None:
        against_behavior = against.to_behavior(
            Direction.AGAINST, _geometry(lanes, Direction.AGAINST, long_refs[Direction.AGAINST]))

    editor = DocumentEditor(current.document)
    space_id = write_space(editor, list(lanelet_ids), along_behavior, against_behavior, name)
    logger.debug("annotated lanelet(s) {} with behavior space {}", ", ".join(lanelet_ids), space_id)
    return decode_document(editor.freeze())


def _line_crossing(tags) -> CrossingPermission:
    line_type = tags.get(schema.TAG_TYPE, '')
    subtype = tags.get(schema.TAG_SUBTYPE, '')
    if line_type in schema.BARRIER_LINE_TYPES or subtype in schema.BARRIER_LINE_TYPES:
        return CrossingPermission.NOT_POSSIBLE
    if schema.LINE_DASHED in subtype:
        return CrossingPermission.ALLOWED
    if schema.LINE_SOLID in subtype:
        return CrossingPermission.PROHIBITED
    return CrossingPermission.ALLOWED


def derive_defaults(scenery: SceneryMap, lanelet_id: str, zone_speed_kmh: float,
                    direction: Direction = Direction.ALONG) -> BehaviorSpec:
    """Provisional behavior spec from local map tags only; never conditional"""
    lane = scenery.lane(lanelet_id)
    document = scenery.document
    left, right = lane.left_bound, lane.right_bound
    if direction is Direction.AGAINST:
        left, right = right, left

    def crossing(bound: str) -> BoundaryAttribute:
        tags = document.ways[bound].tags if document is not None and bound in document.ways else {}
        return BoundaryAttribute((CrossingDemand(_line_crossing(tags)),))

    return BehaviorSpec(
        speed=SpeedAttribute((SpeedDemand(SpeedLimitKind.MAXIMUM, zone_speed_kmh),)),
        boundary_long=BoundaryAttribute((CrossingDemand(CrossingPermission.ALLOWED),)),
        boundary_left=crossing(left),
        boundary_right=crossing(right),
        reservation=ReservationAttribute((ReservationDemand(ReservationKind.OWN),)),
        overtake=OvertakeAttribute((OvertakeDemand(True),)),
        provisional=True,
    )
