"""Command line entry point: ``bssd <command> <map.osm> ...``.

Exit status: 0 clean, 1 validation errors, 2 usage, I/O or parse failure.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from loguru import logger

from .builder.annotate import annotate, derive_defaults
from .builder.spec_text import format_behavior_spec, parse_annotation_block
from .config import configure_logging, load_config, set_config
from .core.demands import compare_demands, demand_rows
from .core.errors import BssdError
from .core.model import Direction
from .graph.network import build_graph
from .osm.codec import load_map, save_map
from .osm.geojson_export import export_geojson, route_overlay
from .routing.capability import parse_profile
from .routing.router import plan_route
from .validation.findings import errors, findings_to_json, format_findings
from .validation.validator import validate

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_FAILURE = 2

DIRECTIONS = [d.value for d in Direction]


def cmd_validate(args) -> int:
    scenery, _ = load_map(args.map)
    findings = validate(scenery)
    if args.json:
        print(findings_to_json(findings))
    elif findings:
        print(format_findings(findings))
    return EXIT_FINDINGS if errors(findings) else EXIT_OK


def cmd_inspect(args) -> int:
    scenery, _ = load_map(args.map)
    space = scenery.find_space(args.space)
    rows = demand_rows(scenery.behavior(space.id, Direction(args.direction)))
    if args.json:
        print(json.dumps(dict(rows), indent=2))
    else:
        for key, value in rows:
            print(f"{key}: {value}")
    return EXIT_OK


def cmd_compare(args) -> int:
    scenery, _ = load_map(args.map)
    other = load_map(args.other_map)[0] if args.other_map else scenery
    diff = compare_demands(scenery.find_space(args.a), other.find_space(args.b), Direction(args.direction))
    print(json.dumps(diff.to_dict(), indent=2) if args.json else diff.format())
    return EXIT_OK


def cmd_route(args) -> int:
    scenery, _ = load_map(args.map)
    profile = parse_profile(Path(args.profile).read_text(encoding='utf-8'))
    source = (scenery.find_space(args.source).id, Direction(args.from_direction))
    target = (scenery.find_space(args.target).id, Direction(args.to_direction))
    result = plan_route(build_graph(scenery), source, target, profile)
    print(result.to_json())
    if args.geojson and result.found:
        overlay = route_overlay(scenery, result.path)
        if overlay is not None:
            Path(args.geojson).write_text(json.dumps(overlay, sort_keys=True), encoding='utf-8')
    return EXIT_OK


def cmd_export(args) -> int:
    scenery, _ = load_map(args.map)
    Path(args.geojson).write_text(export_geojson(scenery), encoding='utf-8')
    logger.info("wrote {}", args.geojson)
    return EXIT_OK


def cmd_graph(args) -> int:
    scenery, _ = load_map(args.map)
    dump = build_graph(scenery).dump()
    if dump:
        print(dump)
    return EXIT_OK


def cmd_annotate(args) -> int:
    scenery, _ = load_map(args.map)
    along, against = parse_annotation_block(Path(args.spec).read_text(encoding='utf-8'))
    result = annotate(scenery, args.lanelet, along, against, name=args.name)
    Path(args.out).write_bytes(save_map(result))
    logger.info("wrote {}", args.out)
    return EXIT_OK


def cmd_derive(args) -> int:
    scenery, _ = load_map(args.map)
    spec = derive_defaults(scenery, args.lanelet, args.zone, Direction(args.direction))
    print(format_behavior_spec(spec), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bssd", description="Behavior-semantic scenery description toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="run all validation rules")
    p.add_argument("map")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("inspect", help="print the demand table of one behavior space")
    p.add_argument("map")
    p.add_argument("--space", required=True, help="behavior space id or name")
    p.add_argument("--direction", choices=DIRECTIONS, default="along")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_inspect)

    p = sub.add_parser("compare", help="compare the demands of two behavior spaces")
    p.add_argument("map")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--other-map", help="map holding space b, if not the same file")
    p.add_argument("--direction", choices=DIRECTIONS, default="along")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("route", help="plan a route a capability profile can drive")
    p.add_argument("map")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--from-direction", choices=DIRECTIONS, default="along")
    p.add_argument("--to-direction", choices=DIRECTIONS, default="along")
    p.add_argument("--geojson", help="also write the route as a GeoJSON LineString")
    p.set_defaults(handler=cmd_route)

    p = sub.add_parser("export", help="write lanelets and demands as GeoJSON")
    p.add_argument("map")
    p.add_argument("--geojson", required=True)
    p.set_defaults(handler=cmd_export)

    p = sub.add_parser("graph", help="print the behavior graph edge list")
    p.add_argument("map")
    p.set_defaults(handler=cmd_graph)

    p = sub.add_parser("annotate", help="add a behavior space over bare lanelets")
    p.add_argument("map")
    p.add_argument("--lanelet", nargs="+", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--name")
    p.set_defaults(handler=cmd_annotate)

    p = sub.add_parser("derive", help="print provisional demands derived from map tags")
    p.add_argument("map")
    p.add_argument("--lanelet", required=True)
    p.add_argument("--zone", type=float, required=True, help="zone speed in km/h")
    p.add_argument("--direction", choices=DIRECTIONS, default="along")
    p.set_defaults(handler=cmd_derive)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_FAILURE if e.code else EXIT_OK

    try:
        config = load_config()
    except BssdError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    set_config(config)
    configure_logging(config.log_level)

    try:
        return args.handler(args)
    except (BssdError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
