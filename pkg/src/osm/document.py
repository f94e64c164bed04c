"""Plain OSM XML documents: nodes, ways and relations, read and written with lxml."""
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from loguru import logger
from lxml import etree

from ..core.errors import DuplicateIdError, MalformedXmlError
from ..core.scenery import Diagnostic, element_sort_key

ELEMENT_TYPES = ('node', 'way', 'relation')


def _frozen_mapping(items) -> Mapping[str, str]:
    return MappingProxyType(dict(items))


@dataclass(frozen=True)
class Member:
    type: str
    ref: str
    role: str


@dataclass(frozen=True)
class OsmNode:
    id: str
    lat: float
    lon: float
    tags: Mapping[str, str] = field(default_factory=lambda: _frozen_mapping({}))
    attrs: Mapping[str, str] = field(default_factory=lambda: _frozen_mapping({}))


@dataclass(frozen=True)
class OsmWay:
    id: str
    nodes: Tuple[str, ...]
    tags: Mapping[str, str] = field(default_factory=lambda: _frozen_mapping({}))
    attrs: Mapping[str, str] = field(default_factory=lambda: _frozen_mapping({}))


@dataclass(frozen=True)
class OsmRelation:
    id: str
    members: Tuple[Member, ...]
    tags: Mapping[str, str] = field(default_factory=lambda: _frozen_mapping({}))
    attrs: Mapping[str, str] = field(default_factory=lambda: _frozen_mapping({}))

    def members_with_role(self, role: str) -> List[Member]:
        return [m for m in self.members if m.role == role]


@dataclass(frozen=True)
class OsmDocument:
    nodes: Mapping[str, OsmNode]
    ways: Mapping[str, OsmWay]
    relations: Mapping[str, OsmRelation]
    root_attrs: Mapping[str, str] = field(default_factory=lambda: _frozen_mapping({'version': '0.6'}))
    # top-level elements we do not model (bounds, changesets, ...), kept as raw XML
    extras: Tuple[bytes, ...] = ()

    def collection(self, element_type: str) -> Mapping:
        return {'node': self.nodes, 'way': self.ways, 'relation': self.relations}[element_type]

    def has(self, element_type: str, element_id: str) -> bool:
        return element_id in self.collection(element_type)

    def element_count(self) -> int:
        return len(self.nodes) + len(self.ways) + len(self.relations)

    def next_id(self) -> int:
        numeric = [element_sort_key(i)[1] for c in (self.nodes, self.ways, self.relations)
                   for i in c if element_sort_key(i)[0] == 0]
        return max(numeric, default=0) + 1

    def dangling_refs(self) -> List[Diagnostic]:
        diagnostics = []
        for way in self.ways.values():
            missing = [ref for ref in way.nodes if ref not in self.nodes]
            if missing:
                diagnostics.append(Diagnostic("dangling_ref", way.id, f"way references missing node(s) {', '.join(missing)}",
                                              f"way {way.id}"))
        for relation in self.relations.values():
            for member in relation.members:
                if member.type in ELEMENT_TYPES and not self.has(member.type, member.ref):
                    diagnostics.append(Diagnostic(
                        "dangling_ref", relation.id,
                        f"member {member.type} {member.ref} with role {member.role!r} does not exist",
                        f"relation {relation.id}"))
        return diagnostics


def _parse_attrs(element, skip: Iterable[str]) -> Mapping[str, str]:
    return _frozen_mapping((k, v) for k, v in element.attrib.items() if k not in skip)


def _required(element, attribute: str) -> str:
    value = element.get(attribute)
    if value is None:
        raise MalformedXmlError(f"malformed-xml: <{element.tag}> without {attribute} (line {element.sourceline})")
    return value


def _parse_tags(element) -> Mapping[str, str]:
    return _frozen_mapping((_required(tag, 'k'), tag.get('v', '')) for tag in element.iterchildren('tag'))


def parse_document(data: bytes) -> OsmDocument:
    parser = etree.XMLParser(remove_blank_text=True, resolve_entities=False, no_network=True)
    try:
        root = etree.fromstring(data, parser)
    except etree.XMLSyntaxError as e:
        raise MalformedXmlError(f"malformed-xml: {e}")
    if root.tag != 'osm':
        raise MalformedXmlError(f"malformed-xml: root element is <{root.tag}>, expected <osm>")

    nodes: Dict[str, OsmNode] = {}
    ways: Dict[str, OsmWay] = {}
    relations: Dict[str, OsmRelation] = {}
    extras: List[bytes] = []

    for element in root:
        if not isinstance(element.tag, str):
            continue
        if element.tag not in ELEMENT_TYPES:
            extras.append(etree.tostring(element))
            continue
        element_id = _required(element, 'id')
        if element.tag == 'node':
            if element_id in nodes:
                raise DuplicateIdError('node', element_id)
            try:
                lat, lon = float(element.get('lat')), float(element.get('lon'))
            except (TypeError, ValueError):
                raise MalformedXmlError(f"malformed-xml: node {element_id} has no valid lat/lon "
                                        f"(line {element.sourceline})")
            nodes[element_id] = OsmNode(element_id, lat, lon, _parse_tags(element),
                                        _parse_attrs(element, ('id', 'lat', 'lon')))
        elif element.tag == 'way':
            if element_id in ways:
                raise DuplicateIdError('way', element_id)
            refs = tuple(_required(nd, 'ref') for nd in element.iterchildren('nd'))
            ways[element_id] = OsmWay(element_id, refs, _parse_tags(element), _parse_attrs(element, ('id',)))
        else:
            if element_id in relations:
                raise DuplicateIdError('relation', element_id)
            members = tuple(Member(_required(m, 'type'), _required(m, 'ref'), m.get('role', ''))
                            for m in element.iterchildren('member'))
            relations[element_id] = OsmRelation(element_id, members, _parse_tags(element),
                                                _parse_attrs(element, ('id',)))

    logger.debug("parsed OSM document: {} nodes, {} ways, {} relations", len(nodes), len(ways), len(relations))
    return OsmDocument(
        nodes=_frozen_mapping(nodes),
        ways=_frozen_mapping(ways),
        relations=_frozen_mapping(relations),
        root_attrs=_parse_attrs(root, ()),
        extras=tuple(extras),
    )


def _append_tags(element, tags: Mapping[str, str]) -> None:
    for key, value in tags.items():
        etree.SubElement(element, 'tag', k=key, v=value)


def serialize_document(document: OsmDocument) -> bytes:
    root = etree.Element('osm')
    for key, value in document.root_attrs.items():
        root.set(key, value)
    for raw in document.extras:
        root.append(etree.fromstring(raw))

    for node in document.nodes.values():
        element = etree.SubElement(root, 'node', id=node.id)
        for key, value in node.attrs.items():
            element.set(key, value)
        element.set('lat', repr(node.lat))
        element.set('lon', repr(node.lon))
        _append_tags(element, node.tags)
    for way in document.ways.values():
        element = etree.SubElement(root, 'way', id=way.id)
        for key, value in way.attrs.items():
            element.set(key, value)
        for ref in way.nodes:
            etree.SubElement(element, 'nd', ref=ref)
        _append_tags(element, way.tags)
    for relation in document.relations.values():
        element = etree.SubElement(root, 'relation', id=relation.id)
        for key, value in relation.attrs.items():
            element.set(key, value)
        for member in relation.members:
            etree.SubElement(element, 'member', type=member.type, ref=member.ref, role=member.role)
        _append_tags(element, relation.tags)

    return etree.tostring(root, xml_declaration=True, encoding='UTF-8', pretty_print=True)


class DocumentEditor:
    """Mutable working copy of a document.

    Edits are collected here and turned back into an immutable document with
    ``freeze``.
    """

    def __init__(self, document: OsmDocument):
        self.nodes: Dict[str, OsmNode] = dict(document.nodes)
        self.ways: Dict[str, OsmWay] = dict(document.ways)
        self.relations: Dict[str, OsmRelation] = dict(document.relations)
        self.root_attrs = dict(document.root_attrs)
        self.extras = document.extras
        self._next_id = document.next_id()

    def allocate_id(self) -> str:
        allocated = self._next_id
        self._next_id += 1
        return str(allocated)

    def add_node(self, lat: float, lon: float, tags: Optional[Dict[str, str]] = None) -> str:
        node_id = self.allocate_id()
        self.nodes[node_id] = OsmNode(node_id, lat, lon, _frozen_mapping(tags or {}))
        return node_id

    def add_way(self, nodes: Iterable[str], tags: Optional[Dict[str, str]] = None) -> str:
        way_id = self.allocate_id()
        self.ways[way_id] = OsmWay(way_id, tuple(nodes), _frozen_mapping(tags or {}))
        return way_id

    def reserve_ids(self, element_ids: Iterable[str]) -> None:
        for element_id in element_ids:
            kind, number, _ = element_sort_key(element_id)
            if kind == 0 and number >= self._next_id:
                self._next_id = number + 1

    def add_relation(self, members: Iterable[Member], tags: Dict[str, str],
                     relation_id: Optional[str] = None) -> str:
        relation_id = relation_id or self.allocate_id()
        self.relations[relation_id] = OsmRelation(relation_id, tuple(members), _frozen_mapping(tags))
        return relation_id

    def replace_members(self, relation_id: str, members: Iterable[Member]) -> None:
        self.relations[relation_id] = replace(self.relations[relation_id], members=tuple(members))

    def freeze(self) -> OsmDocument:
        return OsmDocument(
            nodes=_frozen_mapping(self.nodes),
            ways=_frozen_mapping(self.ways),
            relations=_frozen_mapping(self.relations),
            root_attrs=_frozen_mapping(self.root_attrs),
            extras=self.extras,
        )
