"""GeoJSON views of a map for web viewers: lanelet centerlines and route overlays."""
from typing import Dict, Iterable, List, Optional, Tuple

import geojson
from geojson import Feature, FeatureCollection, LineString
from loguru import logger

from ..config import get_config
from ..core.demands import describe_boundary, describe_reservation
from ..core.model import Behavior, Direction
from ..core.scenery import SceneryMap
from .codec import behavior_tags, oriented_bound_nodes

Coordinate = Tuple[float, float]


def flatten_behavior(behavior: Behavior) -> Dict[str, str]:
    """Demand tags of one behavior, keys prefixed with its direction"""
    prefix = behavior.direction.value
    flat = {f"{prefix}:{key}": value for key, value in behavior_tags(behavior).items()}
    for name in ('boundary_long', 'boundary_left', 'boundary_right'):
        flat[f"{prefix}:{name}"] = describe_boundary(behavior.attribute(name))
    flat[f"{prefix}:reservation"] = describe_reservation(behavior.reservation)
    return flat


def lanelet_centerline(scenery: SceneryMap, lanelet_id: str) -> List[Coordinate]:
    """Centerline as [lon, lat] pairs, pairing bound vertices by index; empty without geometry"""
    document = scenery.document
    lane = scenery.lanes.get(lanelet_id)
    if document is None or lane is None:
        return []
    left, right = oriented_bound_nodes(document, lane.left_bound, lane.right_bound)
    if not left or not right or not all(n in document.nodes for n in left + right):
        return []

    def at(nodes, i, count):
        # resample the shorter bound onto the longer one's vertex count
        position = i * (len(nodes) - 1) / max(count - 1, 1)
        low = int(position)
        high = min(low + 1, len(nodes) - 1)
        t = position - low
        a, b = document.nodes[nodes[low]], document.nodes[nodes[high]]
        return a.lat + t * (b.lat - a.lat), a.lon + t * (b.lon - a.lon)

    count = max(len(left), len(right))
    line = []
    for i in range(count):
        (lat1, lon1), (lat2, lon2) = at(left, i, count), at(right, i, count)
        line.append(((lon1 + lon2) / 2, (lat1 + lat2) / 2))
    return line


def lanelet_features(scenery: SceneryMap) -> List[Feature]:
    features = []
    for lane in scenery.lanes.values():
        properties = {'lanelet': lane.id, 'kind': lane.kind.value}
        covering = [s for s in scenery.covering_spaces(lane.id) if s in scenery.spaces]
        if covering:
            space = scenery.spaces[covering[0]]
            properties['behavior_space'] = space.id
            for direction in space.directions():
                properties.update(flatten_behavior(space.behavior(direction)))
        line = lanelet_centerline(scenery, lane.id)
        # a LineString needs two positions; lanelets without geometry get a null one
        geometry = LineString(line) if len(line) >= 2 else None
        features.append(Feature(id=lane.id, geometry=geometry, properties=properties))
    return features


def export_geojson(scenery: SceneryMap, indent: Optional[int] = None) -> str:
    """One LineString Feature per lanelet with the covering space's demands as properties"""
    collection = FeatureCollection(lanelet_features(scenery))
    logger.debug("exporting {} lanelet features", len(collection['features']))
    if indent is None:
        indent = get_config().geojson_indent
    return geojson.dumps(collection, indent=indent, sort_keys=True)


def route_overlay(scenery: SceneryMap, steps: Iterable[Tuple[str, Direction]]) -> Optional[Feature]:
    """A LineString through the centerlines of a route's spaces, or None when the map has no geometry"""
    steps = list(steps)
    coordinates: List[Coordinate] = []
    for space_id, direction in steps:
        lanes = scenery.space(space_id).lanes
        if direction is Direction.AGAINST:
            lanes = tuple(reversed(lanes))
        for lanelet_id in lanes:
            line = lanelet_centerline(scenery, lanelet_id)
            if direction is Direction.AGAINST:
                line = list(reversed(line))
            for point in line:
                if not coordinates or coordinates[-1] != point:
                    coordinates.append(point)
    if len(coordinates) < 2:
        return None
    return Feature(geometry=LineString(coordinates), properties={'route': [s for s, _ in steps]})
