"""The normative BSSD tag and role vocabulary layered on Lanelet2 OSM maps.

behavior_space  members: lanelet (relation, repeatable, ordered chain), along, against (behavior relations)
behavior        tags: speed:max, speed:min, overtake, condition:speed:max:<token>,
                      condition:speed:min:<token>, condition:overtake:<token>
                members: boundary_long, boundary_left, boundary_right (boundary relations, repeatable),
                         reservation (reservation relations, repeatable)
boundary        tags: crossing, condition   members: boundary (linestrings)
reservation     tags: reservation, object (';'-separated), condition
                members: link (origin), link_destination (destination)

The against behavior's longitudinal boundary is anchored at the lanelet end,
where travel against the reference direction enters.
"""
from ..core.model import AreaKind, LaneKind

TYPE_LANELET = 'lanelet'
TYPE_AREA = 'multipolygon'
TYPE_BEHAVIOR_SPACE = 'behavior_space'
TYPE_BEHAVIOR = 'behavior'
TYPE_BOUNDARY = 'boundary'
TYPE_RESERVATION = 'reservation'
TYPE_SEGMENT = 'bssd_segment'
TYPE_WAY = 'bssd_way'
TYPE_NODE = 'bssd_node'

BSSD_TYPES = (TYPE_BEHAVIOR_SPACE, TYPE_BEHAVIOR, TYPE_BOUNDARY, TYPE_RESERVATION,
              TYPE_SEGMENT, TYPE_WAY, TYPE_NODE)

ROLE_LANELET = 'lanelet'
ROLE_ALONG = 'along'
ROLE_AGAINST = 'against'
ROLE_BOUNDARY_LONG = 'boundary_long'
ROLE_BOUNDARY_LEFT = 'boundary_left'
ROLE_BOUNDARY_RIGHT = 'boundary_right'
ROLE_RESERVATION = 'reservation'
ROLE_BOUNDARY = 'boundary'
ROLE_LINK = 'link'
ROLE_LINK_DESTINATION = 'link_destination'
ROLE_LANE = 'lane'
ROLE_SEGMENT = 'segment'
ROLE_INCOMING = 'incoming'
ROLE_OUTGOING = 'outgoing'
ROLE_INTERNAL = 'internal'

BOUNDARY_ROLES = (ROLE_BOUNDARY_LONG, ROLE_BOUNDARY_LEFT, ROLE_BOUNDARY_RIGHT)

ALLOWED_ROLES = {
    TYPE_BEHAVIOR_SPACE: {ROLE_LANELET, ROLE_ALONG, ROLE_AGAINST},
    TYPE_BEHAVIOR: set(BOUNDARY_ROLES) | {ROLE_RESERVATION},
    TYPE_BOUNDARY: {ROLE_BOUNDARY},
    TYPE_RESERVATION: {ROLE_LINK, ROLE_LINK_DESTINATION},
    TYPE_SEGMENT: {ROLE_LANE},
    TYPE_WAY: {ROLE_SEGMENT},
    TYPE_NODE: {ROLE_INCOMING, ROLE_OUTGOING, ROLE_INTERNAL},
}

TAG_TYPE = 'type'
TAG_SUBTYPE = 'subtype'
TAG_NAME = 'name'
TAG_ONE_WAY = 'one_way'
TAG_SPEED_MAX = 'speed:max'
TAG_SPEED_MIN = 'speed:min'
TAG_OVERTAKE = 'overtake'
TAG_CROSSING = 'crossing'
TAG_CONDITION = 'condition'
TAG_RESERVATION = 'reservation'
TAG_OBJECT = 'object'

CONDITIONAL_SPEED_MAX = 'condition:speed:max:'
CONDITIONAL_SPEED_MIN = 'condition:speed:min:'
CONDITIONAL_OVERTAKE = 'condition:overtake:'

LANE_SUBTYPES = {
    'road': LaneKind.VEHICLE_LANE,
    'highway': LaneKind.VEHICLE_LANE,
    'bicycle_lane': LaneKind.BICYCLE_LANE,
    'crosswalk': LaneKind.CROSSWALK,
}
LANE_KIND_SUBTYPE = {
    LaneKind.VEHICLE_LANE: 'road',
    LaneKind.BICYCLE_LANE: 'bicycle_lane',
    LaneKind.CROSSWALK: 'crosswalk',
}

AREA_SUBTYPES = {
    'walkway': AreaKind.SIDEWALK,
    'parking': AreaKind.PARKING_AREA,
    'keepout': AreaKind.KEEPOUT,
}

# linestring type/subtype -> lateral crossing heuristic
LINE_SOLID = 'solid'
LINE_DASHED = 'dashed'
LINE_CURB = 'curbstone'
LONGITUDINAL_LINE_TYPES = ('stop_line',)
VIRTUAL_LINE = 'virtual'


def format_speed(value: float) -> str:
    return f"{value:g}"


def format_flag(value: bool) -> str:
    return "yes" if value else "no"


def parse_flag(value: str) -> bool:
    value = value.strip().lower()
    if value in ("yes", "true", "1"):
        return True
    if value in ("no", "false", "0"):
        return False
    raise ValueError(f"not a yes/no value: {value!r}")

# bound line types a vehicle physically cannot cross
BARRIER_LINE_TYPES = (LINE_CURB, 'road_border', 'guard_rail', 'wall', 'fence')
