"""Capability-filtered route planning over the behavior graph."""
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import networkx as nx
from loguru import logger

from ..graph.network import BehaviorGraph, Vertex, format_vertex, vertex_key
from .capability import CapabilityProfile, admissible_edge


@dataclass(frozen=True)
class BlockedStep:
    vertex: Vertex
    demand: str
    reason: str

    def to_dict(self) -> dict:
        return {'space': self.vertex[0], 'direction': self.vertex[1].value,
                'demand': self.demand, 'reason': self.reason}


@dataclass(frozen=True)
class RouteResult:
    source: Vertex
    target: Vertex
    path: Tuple[Vertex, ...] = ()
    blocked_alternatives: Tuple[BlockedStep, ...] = field(default_factory=tuple)

    @property
    def found(self) -> bool:
        return bool(self.path)

    @property
    def hops(self) -> Optional[int]:
        return len(self.path) - 1 if self.path else None

    def to_dict(self) -> dict:
        return {
            'from': format_vertex(self.source),
            'to': format_vertex(self.target),
            'found': self.found,
            'hops': self.hops,
            'path': [{'space': s, 'direction': d.value} for s, d in self.path],
            'blocked_alternatives': [b.to_dict() for b in self.blocked_alternatives],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def admissible_subgraph(graph: BehaviorGraph, profile: CapabilityProfile) -> Tuple[nx.DiGraph, Dict]:
    """Graph of the steps the profile may take, plus the rejected steps keyed by edge"""
    allowed = nx.DiGraph()
    allowed.add_nodes_from(graph.vertices())
    rejected = {}
    for edge in graph.edges():
        verdict = admissible_edge(graph, edge, profile)
        if verdict.ok:
            allowed.add_edge(edge.source, edge.target)
        else:
            rejected[(edge.source, edge.target)] = verdict
    return allowed, rejected


def plan_route(graph: BehaviorGraph, source: Vertex, target: Vertex,
               profile: CapabilityProfile) -> RouteResult:
    """Fewest-hop admissible path; among equals the lexicographically smallest vertex sequence.

    The start vertex itself is not checked. ``blocked_alternatives`` lists the
    inadmissible steps leaving vertices explored before the target was reached
    (all reachable vertices when there is no route).
    """
    graph.require(source)
    graph.require(target)
    if source == target:
        return RouteResult(source, target, (source,))

    allowed, rejected = admissible_subgraph(graph, profile)
    to_target = nx.single_source_shortest_path_length(allowed.reverse(copy=False), target)
    from_source = nx.single_source_shortest_path_length(allowed, source)

    path: Tuple[Vertex, ...] = ()
    if source in to_target:
        current, steps = source, [source]
        while current != target:
            current = min((w for w in allowed.successors(current) if to_target.get(w) == to_target[current] - 1),
                          key=vertex_key)
            steps.append(current)
        path = tuple(steps)

    horizon = len(path) - 1 if path else None
    explored = {v for v, depth in from_source.items() if horizon is None or depth < horizon}
    blocked = {}
    for (edge_source, edge_target), verdict in rejected.items():
        if edge_source in explored:
            key = (edge_target, f"{verdict.attribute}: {verdict.demand}")
            blocked.setdefault(key, verdict.reason)
    blocked_steps = tuple(BlockedStep(vertex, demand, reason) for (vertex, demand), reason
                          in sorted(blocked.items(), key=lambda item: (vertex_key(item[0][0]), item[0][1])))

    logger.debug("route {} -> {}: {} ({} blocked)", format_vertex(source), format_vertex(target),
                 f"{len(path) - 1} hops" if path else "no route", len(blocked_steps))
    return RouteResult(source, target, path, blocked_steps)
