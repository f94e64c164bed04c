"""The navigable graph of atomic behavior spaces.

Vertices are (space id, direction) pairs. Longitudinal edges connect a vertex
to every vertex entered where it exits; lateral edges connect vertices whose
driver-relative bounds are the same linestring.
"""
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

import networkx as nx
from loguru import logger

from ..core.errors import NonAdjacentStepsError, UnknownElementError
from ..core.model import AtomicBehaviorSpace, Behavior, CrossingDemand, Direction, LaneKind
from ..core.scenery import SceneryMap, element_sort_key

Vertex = Tuple[str, Direction]


class EdgeKind(Enum):
    LONGITUDINAL = "longitudinal_successor"
    LATERAL_LEFT = "lateral_left"
    LATERAL_RIGHT = "lateral_right"


def vertex_key(vertex: Vertex) -> Tuple:
    space_id, direction = vertex
    return element_sort_key(space_id), 0 if direction is Direction.ALONG else 1


def format_vertex(vertex: Vertex) -> str:
    return f"{vertex[0]}:{vertex[1].value}"


def parse_vertex(text: str, default: Direction = Direction.ALONG) -> Vertex:
    space_id, _, direction = text.partition(":")
    return space_id, Direction(direction) if direction else default


@dataclass(frozen=True)
class Edge:
    source: Vertex
    target: Vertex
    kind: EdgeKind
    # crossing demands of the boundary passed on this step
    demands: Tuple[CrossingDemand, ...]

    def sort_key(self) -> Tuple:
        return vertex_key(self.source), vertex_key(self.target), self.kind.value

    def format(self) -> str:
        return f"{format_vertex(self.source)} {format_vertex(self.target)} {self.kind.value}"


@dataclass(frozen=True)
class Step:
    space_id: str
    direction: Direction
    behavior: Behavior
    entry: Tuple[CrossingDemand, ...]
    via: Optional[EdgeKind] = None


class BehaviorGraph:
    """Immutable directed graph over directional behaviors, backed by networkx"""

    def __init__(self, behaviors: Mapping[Vertex, Behavior], edges: Iterable[Edge],
                 lane_kinds: Optional[Mapping[Vertex, FrozenSet[LaneKind]]] = None):
        lane_kinds = lane_kinds or {}
        self._graph = nx.DiGraph()
        for vertex in sorted(behaviors, key=vertex_key):
            self._graph.add_node(vertex, behavior=behaviors[vertex],
                                 lane_kinds=frozenset(lane_kinds.get(vertex, ())))
        for edge in sorted(edges, key=Edge.sort_key):
            if self._graph.has_edge(edge.source, edge.target):
                continue
            self._graph.add_edge(edge.source, edge.target, edge=edge)
        nx.freeze(self._graph)

    def vertices(self) -> List[Vertex]:
        return sorted(self._graph.nodes, key=vertex_key)

    def edges(self, kind: Optional[EdgeKind] = None) -> List[Edge]:
        edges = [data['edge'] for _, _, data in self._graph.edges(data=True)]
        if kind is not None:
            edges = [e for e in edges if e.kind is kind]
        return sorted(edges, key=Edge.sort_key)

    def require(self, vertex: Vertex) -> None:
        if vertex not in self._graph:
            raise UnknownElementError("vertex", format_vertex(vertex))

    def behavior(self, vertex: Vertex) -> Behavior:
        self.require(vertex)
        return self._graph.nodes[vertex]['behavior']

    def lane_kinds(self, vertex: Vertex) -> FrozenSet[LaneKind]:
        self.require(vertex)
        return self._graph.nodes[vertex]['lane_kinds']

    def edge(self, source: Vertex, target: Vertex) -> Optional[Edge]:
        data = self._graph.get_edge_data(source, target)
        return data['edge'] if data else None

    def out_edges(self, vertex: Vertex) -> List[Edge]:
        self.require(vertex)
        return sorted((data['edge'] for _, _, data in self._graph.out_edges(vertex, data=True)),
                      key=Edge.sort_key)

    def degree(self, vertex: Vertex) -> int:
        return self._graph.degree(vertex)

    def dump(self) -> str:
        return "\n".join(edge.format() for edge in self.edges())

    def __len__(self) -> int:
        return self._graph.number_of_nodes()


def successors(graph: BehaviorGraph, vertex: Vertex) -> List[Vertex]:
    return [e.target for e in graph.out_edges(vertex) if e.kind is EdgeKind.LONGITUDINAL]


def lateral_neighbors(graph: BehaviorGraph, vertex: Vertex) -> Dict[str, Optional[Vertex]]:
    neighbors: Dict[str, Optional[Vertex]] = {'left': None, 'right': None}
    for edge in graph.out_edges(vertex):
        if edge.kind is EdgeKind.LATERAL_LEFT:
            neighbors['left'] = edge.target
        elif edge.kind is EdgeKind.LATERAL_RIGHT:
            neighbors['right'] = edge.target
    return neighbors


def sequence_demands(graph: BehaviorGraph, path: List[Vertex]) -> List[Step]:
    """The demand bundle met on each step of a path, with the boundary crossed to get there"""
    steps: List[Step] = []
    for index, vertex in enumerate(path):
        behavior = graph.behavior(vertex)
        if index == 0:
            steps.append(Step(vertex[0], vertex[1], behavior, behavior.boundary_long.demands))
            continue
        edge = graph.edge(path[index - 1], vertex)
        if edge is None:
            raise NonAdjacentStepsError(format_vertex(path[index - 1]), format_vertex(vertex))
        steps.append(Step(vertex[0], vertex[1], behavior, edge.demands, edge.kind))
    return steps


# construction from a sealed map

@dataclass(frozen=True)
class _Extent:
    entry: Tuple[str, ...]
    exit: Tuple[str, ...]
    left: frozenset
    right: frozenset


def _extent(scenery: SceneryMap, space: AtomicBehaviorSpace, direction: Direction) -> _Extent:
    chain = scenery.lane_chain(space)
    first, last = chain[0], chain[-1]
    if direction is Direction.ALONG:
        return _Extent(first.start_nodes, last.end_nodes,
                       frozenset(l.left_bound for l in chain), frozenset(l.right_bound for l in chain))
    return _Extent(tuple(reversed(last.end_nodes)), tuple(reversed(first.start_nodes)),
                   frozenset(l.right_bound for l in chain), frozenset(l.left_bound for l in chain))


def build_graph(scenery: SceneryMap) -> BehaviorGraph:
    behaviors: Dict[Vertex, Behavior] = {}
    extents: Dict[Vertex, _Extent] = {}
    for space in scenery.spaces.values():
        for direction in space.directions():
            vertex = (space.id, direction)
            behaviors[vertex] = space.behavior(direction)
            extents[vertex] = _extent(scenery, space, direction)
    ordered = sorted(behaviors, key=vertex_key)

    by_entry: Dict[Tuple[str, ...], List[Vertex]] = defaultdict(list)
    by_right: Dict[str, List[Vertex]] = defaultdict(list)
    by_left: Dict[str, List[Vertex]] = defaultdict(list)
    for vertex in ordered:
        extent = extents[vertex]
        if extent.entry:
            by_entry[extent.entry].append(vertex)
        for bound in extent.right:
            by_right[bound].append(vertex)
        for bound in extent.left:
            by_left[bound].append(vertex)

    edges: List[Edge] = []
    for vertex in ordered:
        extent = extents[vertex]
        if extent.exit:
            for target in by_entry.get(extent.exit, ()):
                if target[0] != vertex[0]:
                    edges.append(Edge(vertex, target, EdgeKind.LONGITUDINAL,
                                      behaviors[target].boundary_long.demands))
        for kind, bounds, index, attribute in (
                (EdgeKind.LATERAL_LEFT, extent.left, by_right, 'boundary_left'),
                (EdgeKind.LATERAL_RIGHT, extent.right, by_left, 'boundary_right')):
            candidates = {w for bound in bounds for w in index.get(bound, ()) if w[0] != vertex[0]}
            if candidates:
                target = min(candidates, key=vertex_key)
                edges.append(Edge(vertex, target, kind, behaviors[vertex].attribute(attribute).demands))

    lane_kinds = {v: frozenset(lane.kind for lane in scenery.lane_chain(scenery.spaces[v[0]])) for v in ordered}
    graph = BehaviorGraph(behaviors, edges, lane_kinds)
    logger.debug("built behavior graph: {} vertices, {} edges", len(graph), len(graph.edges()))
    return graph
