"""The validation rules, one class per rule id.

Every rule reads the sealed map and its graph and returns findings; none of
them mutates anything, so the validator may run them side by side.
"""
from abc import ABC, abstractmethod
from collections import defaultdict
from functools import cached_property
from typing import Dict, FrozenSet, List, Set, Tuple

from ..core.demands import attribute_content, behavior_space_fingerprint
from ..core.model import Direction, LaneElement
from ..core.scenery import SceneryMap
from ..graph.network import BehaviorGraph, EdgeKind, Vertex, format_vertex
from ..osm import schema
from .findings import Finding, Severity

# load diagnostics that do not belong to the attribute rule
DIAGNOSTIC_RULES = {
    'behavior_space_needs_reassignment': ('V-RQ1', Severity.WARNING),
    'invalid_lanelet': ('V-RQ5', Severity.WARNING),
    'identical_bounds': ('V-RQ5', Severity.WARNING),
}

KNOWN_RELATION_TYPES = {schema.TYPE_LANELET, schema.TYPE_AREA, 'regulatory_element'} | set(schema.BSSD_TYPES)


def lane_entry(lane: LaneElement, direction: Direction) -> Tuple[str, ...]:
    return lane.start_nodes if direction is Direction.ALONG else tuple(reversed(lane.end_nodes))


def lane_exit(lane: LaneElement, direction: Direction) -> Tuple[str, ...]:
    return lane.end_nodes if direction is Direction.ALONG else tuple(reversed(lane.start_nodes))


class ValidationContext:
    def __init__(self, scenery: SceneryMap, graph: BehaviorGraph):
        self.scenery = scenery
        self.graph = graph

    @property
    def document(self):
        return self.scenery.document

    @cached_property
    def topology_lanes(self) -> Dict[str, str]:
        """Lanelet -> space for lanelets covered by exactly one accepted space"""
        owners = {}
        for lane_id in self.scenery.lanes:
            covering = self.scenery.covering_spaces(lane_id)
            if len(covering) == 1 and covering[0] in self.scenery.spaces:
                owners[lane_id] = covering[0]
        return owners

    @cached_property
    def lane_neighbors(self) -> Dict[str, Set[str]]:
        """Lanelets touching each other through a shared bound or a shared end node pair"""
        by_key: Dict[object, List[str]] = defaultdict(list)
        for lane in self.scenery.lanes.values():
            for bound in (lane.left_bound, lane.right_bound):
                by_key[('bound', bound)].append(lane.id)
            for pair in (lane.start_nodes, lane.end_nodes):
                if pair:
                    by_key[('pair', frozenset(pair))].append(lane.id)
        neighbors: Dict[str, Set[str]] = defaultdict(set)
        for lanes in by_key.values():
            for lane_id in lanes:
                neighbors[lane_id].update(other for other in lanes if other != lane_id)
        return neighbors


class BaseRule(ABC):
    """Base class for validation rules"""

    rule_id: str = ""
    description: str = ""

    def finding(self, severity: Severity, subjects, code: str, message: str) -> Finding:
        return Finding(self.rule_id, severity, tuple(subjects), message, code)

    @abstractmethod
    def check(self, context: ValidationContext) -> List[Finding]:
        pass


class CoverageRule(BaseRule):
    rule_id = "V-RQ1"
    description = "every lanelet belongs to exactly one behavior space"

    def check(self, context):
        findings = []
        for lane_id in context.scenery.lanes:
            covering = context.scenery.covering_spaces(lane_id)
            if not covering:
                findings.append(self.finding(Severity.ERROR, [lane_id], "uncovered_lanelet",
                                             f"lanelet {lane_id} is not part of any behavior space"))
            elif len(covering) > 1:
                findings.append(self.finding(Severity.ERROR, [lane_id] + covering, "duplicated_coverage",
                                             f"lanelet {lane_id} is covered by {', '.join(covering)}"))
        return findings


class AttributeRule(BaseRule):
    rule_id = "V-RQ2"
    description = "every behavior carries complete, well-formed attributes"

    def check(self, context):
        findings = []
        for diagnostic in context.scenery.diagnostics:
            if diagnostic.code in DIAGNOSTIC_RULES:
                continue
            findings.append(self.finding(Severity.ERROR, [diagnostic.element_id], diagnostic.code,
                                         diagnostic.message))
        findings.extend(self._link_findings(context))
        return findings

    def _link_findings(self, context):
        findings = []
        document = context.document
        for space in context.scenery.spaces.values():
            for direction in space.directions():
                for demand in space.behavior(direction).reservation.demands:
                    for link in demand.links:
                        if context.scenery.resolves(link.target):
                            continue
                        # missing elements are already reported as dangling_ref
                        if document is not None and not document.has('relation', link.target):
                            continue
                        findings.append(self.finding(
                            Severity.ERROR, [space.id, link.target], "dangling_reservation_link",
                            f"{direction.value} reservation links {link.target}, which is neither lanelet nor area"))
        return findings


class DiagnosticRoutingRule(BaseRule):
    """Load diagnostics filed under rules other than V-RQ2"""

    def check(self, context):
        findings = []
        for diagnostic in context.scenery.diagnostics:
            rule, severity = DIAGNOSTIC_RULES.get(diagnostic.code, (None, None))
            if rule != self.rule_id:
                continue
            findings.append(self.finding(severity, [diagnostic.element_id], self.code_for(diagnostic.code),
                                         diagnostic.message))
        return findings

    def code_for(self, code: str) -> str:
        return code


class ReassignmentRule(DiagnosticRoutingRule):
    rule_id = "V-RQ1"
    description = "behavior spaces left on split lanelets"


class NetworkRule(BaseRule):
    rule_id = "V-RQ3"
    description = "the behavior graph mirrors the lanelet topology"

    def check(self, context):
        return (self._chain_findings(context) + self._succession_findings(context)
                + self._witness_findings(context) + self._dangling_findings(context))

    def _chain_findings(self, context):
        findings = []
        for space in context.scenery.spaces.values():
            chain = context.scenery.lane_chain(space)
            for a, b in zip(chain, chain[1:]):
                if a.end_nodes and b.start_nodes and a.end_nodes != b.start_nodes:
                    findings.append(self.finding(Severity.ERROR, [space.id, a.id, b.id], "discontinuous_lanelet_chain",
                                                 f"lanelet {b.id} does not start where {a.id} ends"))
        return findings

    def _succession_findings(self, context):
        owners = context.topology_lanes
        scenery = context.scenery
        entries: Dict[Tuple[str, ...], List[Tuple[str, Vertex]]] = defaultdict(list)
        exits: List[Tuple[Tuple[str, ...], str, Vertex]] = []
        for lane_id, space_id in owners.items():
            lane = scenery.lanes[lane_id]
            for direction in scenery.spaces[space_id].directions():
                vertex = (space_id, direction)
                if lane_entry(lane, direction):
                    entries[lane_entry(lane, direction)].append((lane_id, vertex))
                if lane_exit(lane, direction):
                    exits.append((lane_exit(lane, direction), lane_id, vertex))

        findings, seen = [], set()
        for pair, lane_id, source in exits:
            for other_lane, target in entries.get(pair, ()):
                if target[0] == source[0] or context.graph.edge(source, target) is not None:
                    continue
                if (source, target) in seen:
                    continue
                seen.add((source, target))
                findings.append(self.finding(
                    Severity.ERROR, [source[0], target[0]], "missing_succession",
                    f"lanelet {lane_id} leads into {other_lane} but {format_vertex(source)} "
                    f"has no edge to {format_vertex(target)}"))
        return findings

    def _witness_findings(self, context):
        document = context.document
        if document is None:
            return []
        findings = []
        for edge in context.graph.edges(EdgeKind.LONGITUDINAL):
            target = context.scenery.space(edge.target[0])
            refs = target.behavior(edge.target[1]).boundary_long.geometry_refs
            if not refs:
                continue
            lane = context.scenery.lanes[target.lanes[0] if edge.target[1] is Direction.ALONG else target.lanes[-1]]
            shared = frozenset(lane_entry(lane, edge.target[1]))
            witnessed = any(ref in document.ways and len(document.ways[ref].nodes) >= 2
                            and frozenset((document.ways[ref].nodes[0], document.ways[ref].nodes[-1])) == shared
                            for ref in refs)
            if not witnessed:
                findings.append(self.finding(
                    Severity.ERROR, [edge.source[0], edge.target[0]], "unwitnessed_edge",
                    f"{format_vertex(edge.source)} -> {format_vertex(edge.target)} has no entry linestring "
                    f"at nodes {', '.join(sorted(shared))}"))
        return findings

    def _dangling_findings(self, context):
        graph = context.graph
        if len(context.scenery.spaces) < 2:
            return []
        findings = []
        for vertex in graph.vertices():
            if graph.degree(vertex):
                continue
            lanes = set(context.scenery.space(vertex[0]).lanes)
            touching = set().union(*(context.lane_neighbors.get(l, set()) for l in lanes)) - lanes
            if touching:
                continue
            findings.append(self.finding(Severity.ERROR, [vertex[0]], "dangling_vertex",
                                         f"{format_vertex(vertex)} is not connected to the route network"))
        return findings


class EquivalenceRule(BaseRule):
    rule_id = "V-RQ4"
    description = "equal demands are recognizable as equal behavior spaces"

    def check(self, context):
        findings = []
        classes: Dict[str, List[str]] = defaultdict(list)
        for space in context.scenery.spaces.values():
            classes[behavior_space_fingerprint(space)].append(space.id)
        for fingerprint, members in classes.items():
            if len(members) > 1:
                findings.append(self.finding(Severity.INFO, members, "equivalent_demands",
                                             f"{len(members)} behavior spaces share fingerprint {fingerprint[:12]}"))
        findings.extend(self._asymmetry_findings(context))
        return findings

    def _asymmetry_findings(self, context):
        findings, seen = [], set()
        graph = context.graph
        for edge in graph.edges():
            if edge.kind is EdgeKind.LONGITUDINAL:
                continue
            back_kind = EdgeKind.LATERAL_RIGHT if edge.kind is EdgeKind.LATERAL_LEFT else EdgeKind.LATERAL_LEFT
            back = graph.edge(edge.target, edge.source)
            if back is None or back.kind is not back_kind:
                continue
            pair = frozenset((edge.source, edge.target))
            if pair in seen:
                continue
            seen.add(pair)
            side, other_side = (('boundary_left', 'boundary_right') if edge.kind is EdgeKind.LATERAL_LEFT
                                else ('boundary_right', 'boundary_left'))
            mine = attribute_content(graph.behavior(edge.source), side)
            theirs = attribute_content(graph.behavior(edge.target), other_side)
            if mine != theirs:
                findings.append(self.finding(
                    Severity.WARNING, [edge.source[0], edge.target[0]], "asymmetric_lateral_demand",
                    f"{side} of {format_vertex(edge.source)} and {other_side} of {format_vertex(edge.target)} "
                    f"disagree on the shared bound"))
        return findings


class UniversalityRule(DiagnosticRoutingRule):
    rule_id = "V-RQ5"
    description = "coverage report and constructs the toolkit cannot interpret"

    def code_for(self, code):
        return "unknown_construct"

    def check(self, context):
        findings = super().check(context)
        scenery = context.scenery
        if scenery.lanes:
            complete = len(context.topology_lanes)
            total = len(scenery.lanes)
            findings.append(self.finding(Severity.INFO, [], "coverage",
                                         f"{complete}/{total} lanelets carry a complete behavior space "
                                         f"({100.0 * complete / total:.1f}%)"))
        if context.document is not None:
            findings.extend(self._construct_findings(context))
        return findings

    def _construct_findings(self, context):
        document = context.document
        referenced: Set[str] = {m.ref for r in document.relations.values() for m in r.members if m.type == 'relation'}
        findings = []
        for relation in document.relations.values():
            relation_type = relation.tags.get(schema.TAG_TYPE, '')
            if relation_type not in KNOWN_RELATION_TYPES:
                findings.append(self.finding(Severity.WARNING, [relation.id], "unknown_construct",
                                             f"relation type {relation_type or '(none)'!r} is not interpreted"))
            elif (relation_type in (schema.TYPE_BEHAVIOR, schema.TYPE_BOUNDARY, schema.TYPE_RESERVATION)
                  and relation.id not in referenced):
                findings.append(self.finding(Severity.WARNING, [relation.id], "unknown_construct",
                                             f"{relation_type} relation is not part of any behavior space"))
        return findings


class MixedKindsRule(BaseRule):
    rule_id = "V-W01"
    description = "behavior spaces spanning lanelets of different kinds"

    def check(self, context):
        findings = []
        for space in context.scenery.spaces.values():
            kinds = sorted({lane.kind.value for lane in context.scenery.lane_chain(space)})
            if len(kinds) > 1:
                findings.append(self.finding(Severity.WARNING, [space.id], "mixed_lane_kinds",
                                             f"lanelets of kinds {', '.join(kinds)} share one behavior space"))
        return findings


class DegenerateNodeRule(BaseRule):
    rule_id = "V-W02"
    description = "network nodes joining only two ways"

    def check(self, context):
        return [self.finding(Severity.WARNING, [node.id], "degenerate_node",
                             "node joins exactly two ways, likely a segmentation artifact")
                for node in context.scenery.nodes.values() if node.degenerate]


class SegmentOrderRule(BaseRule):
    rule_id = "V-W03"
    description = "segment lanes listed left to right share their bounds"

    def check(self, context):
        findings = []
        lanes = context.scenery.lanes
        for segment in context.scenery.segments.values():
            for a, b in zip(segment.lanes, segment.lanes[1:]):
                if a not in lanes or b not in lanes:
                    continue
                if not {lanes[a].left_bound, lanes[a].right_bound} & {lanes[b].left_bound, lanes[b].right_bound}:
                    findings.append(self.finding(Severity.WARNING, [segment.id, a, b], "segment_order_mismatch",
                                                 f"lanes {a} and {b} are listed side by side but share no bound"))
        return findings


class RuleRegistry:
    def __init__(self):
        self.rules: Dict[str, List[BaseRule]] = {}
        self._initialize_rules()

    def add_rule(self, rule: BaseRule):
        self.rules.setdefault(rule.rule_id, []).append(rule)

    def get_rules(self, rule_id: str) -> List[BaseRule]:
        return self.rules.get(rule_id, [])

    def all_rules(self) -> List[BaseRule]:
        return [rule for rule_id in sorted(self.rules) for rule in self.rules[rule_id]]

    def rule_ids(self) -> FrozenSet[str]:
        return frozenset(self.rules)

    def _initialize_rules(self):
        for rule in (CoverageRule(), ReassignmentRule(), AttributeRule(), NetworkRule(), EquivalenceRule(),
                     UniversalityRule(), MixedKindsRule(), DegenerateNodeRule(), SegmentOrderRule()):
            self.add_rule(rule)
