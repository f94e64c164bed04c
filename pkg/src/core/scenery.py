from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from loguru import logger

from .errors import MissingDirectionError, UnknownElementError
from .model import (AtomicBehaviorSpace, Behavior, Direction, LaneElement, NetworkNode,
                    NonRegularMotionSpace, Segment, Way)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    element_id: str
    message: str
    location: str = ""

    def __str__(self) -> str:
        where = f" ({self.location})" if self.location else ""
        return f"{self.code} {self.element_id}{where}: {self.message}"


def _sorted_mapping(items: Iterable[Tuple[str, Any]]) -> Mapping[str, Any]:
    return MappingProxyType(dict(sorted(items, key=lambda kv: element_sort_key(kv[0]))))


def element_sort_key(element_id: str) -> Tuple[int, int, str]:
    """Numeric OSM ids sort numerically, anything else after them by text"""
    try:
        return (0, int(element_id), "")
    except (TypeError, ValueError):
        return (1, 0, str(element_id))


@dataclass(frozen=True)
class SceneryMap:
    """A sealed map: scenery elements plus the behavior spaces laid over them.

    ``coverage`` lists the lanelets of every behavior space relation found in
    the source, including those whose content was rejected, so that coverage
    checks stay independent of attribute defects.
    """
    lanes: Mapping[str, LaneElement]
    areas: Mapping[str, NonRegularMotionSpace]
    spaces: Mapping[str, AtomicBehaviorSpace]
    coverage: Mapping[str, Tuple[str, ...]]
    segments: Mapping[str, Segment] = field(default_factory=lambda: MappingProxyType({}))
    ways: Mapping[str, Way] = field(default_factory=lambda: MappingProxyType({}))
    nodes: Mapping[str, NetworkNode] = field(default_factory=lambda: MappingProxyType({}))
    diagnostics: Tuple[Diagnostic, ...] = ()
    document: Optional[Any] = None

    @classmethod
    def seal(cls,
             lanes: Iterable[LaneElement],
             areas: Iterable[NonRegularMotionSpace] = (),
             spaces: Iterable[AtomicBehaviorSpace] = (),
             coverage: Optional[Dict[str, Tuple[str, ...]]] = None,
             segments: Iterable[Segment] = (),
             ways: Iterable[Way] = (),
             nodes: Iterable[NetworkNode] = (),
             diagnostics: Iterable[Diagnostic] = (),
             document: Optional[Any] = None) -> 'SceneryMap':
        lane_index = {lane.id: lane for lane in lanes}
        area_index = {area.id: area for area in areas}
        diagnostics = list(diagnostics)
        coverage = dict(coverage or {})

        accepted: Dict[str, AtomicBehaviorSpace] = {}
        for space in spaces:
            coverage.setdefault(space.id, space.lanes)
            problem = _space_context_problem(space, lane_index)
            if problem:
                diagnostics.append(Diagnostic(problem[0], space.id, problem[1]))
                continue
            accepted[space.id] = space

        logger.debug("sealed map: {} lanes, {} areas, {} spaces ({} rejected)",
                     len(lane_index), len(area_index), len(accepted), len(coverage) - len(accepted))
        return cls(
            lanes=_sorted_mapping(lane_index.items()),
            areas=_sorted_mapping(area_index.items()),
            spaces=_sorted_mapping(accepted.items()),
            coverage=_sorted_mapping(coverage.items()),
            segments=_sorted_mapping((s.id, s) for s in segments),
            ways=_sorted_mapping((w.id, w) for w in ways),
            nodes=_sorted_mapping((n.id, n) for n in nodes),
            diagnostics=tuple(diagnostics),
            document=document,
        )

    def lane(self, lane_id: str) -> LaneElement:
        try:
            return self.lanes[lane_id]
        except KeyError:
            raise UnknownElementError("lanelet", lane_id)

    def space(self, space_id: str) -> AtomicBehaviorSpace:
        try:
            return self.spaces[space_id]
        except KeyError:
            raise UnknownElementError("space", space_id)

    def find_space(self, key: str) -> AtomicBehaviorSpace:
        """Look a space up by relation id, falling back to its name tag"""
        if key in self.spaces:
            return self.spaces[key]
        named = [s for s in self.spaces.values() if s.name == key]
        if len(named) == 1:
            return named[0]
        raise UnknownElementError("space", key)

    def behavior(self, space_id: str, direction: Direction) -> Behavior:
        behavior = self.space(space_id).behavior(direction)
        if behavior is None:
            raise MissingDirectionError(space_id, direction.value)
        return behavior

    def covering_spaces(self, lanelet_id: str) -> List[str]:
        return [space_id for space_id, lanelets in self.coverage.items() if lanelet_id in lanelets]

    def lane_chain(self, space: AtomicBehaviorSpace) -> List[LaneElement]:
        return [self.lanes[lane_id] for lane_id in space.lanes if lane_id in self.lanes]

    def resolves(self, element_id: str) -> bool:
        return element_id in self.lanes or element_id in self.areas

    @property
    def is_empty(self) -> bool:
        return not self.lanes and not self.areas and not self.coverage


def _space_context_problem(space: AtomicBehaviorSpace,
                           lanes: Mapping[str, LaneElement]) -> Optional[Tuple[str, str]]:
    missing = [lane_id for lane_id in space.lanes if lane_id not in lanes]
    if missing:
        return "dangling_ref", f"lanelet {', '.join(missing)} does not exist"
    if space.against is None and not all(lanes[lane_id].one_directional for lane_id in space.lanes):
        return "missing_against_behavior", "two-directional lane without against behavior"
    return None
