"""Runs the registered rules over a sealed map and merges their findings."""
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from loguru import logger

from ..core.scenery import SceneryMap
from ..graph.network import BehaviorGraph, build_graph
from .findings import Finding, sort_findings
from .rules import BaseRule, RuleRegistry, ValidationContext


def _run_rule(rule: BaseRule, context: ValidationContext) -> List[Finding]:
    started = time.perf_counter()
    findings = rule.check(context)
    logger.debug("rule {} ({}): {} findings in {:.1f} ms", rule.rule_id, type(rule).__name__,
                 len(findings), (time.perf_counter() - started) * 1000)
    return findings


def validate(scenery: SceneryMap, graph: Optional[BehaviorGraph] = None,
             registry: Optional[RuleRegistry] = None, max_workers: int = 4) -> List[Finding]:
    """All findings of all rules, in (rule, subjects, code) order"""
    graph = graph if graph is not None else build_graph(scenery)
    registry = registry or RuleRegistry()
    context = ValidationContext(scenery, graph)
    # shared lazy views are filled before the rules fan out
    context.topology_lanes, context.lane_neighbors

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = list(pool.map(lambda rule: _run_rule(rule, context), registry.all_rules()))

    findings = sort_findings(f for result in results for f in result)
    logger.info("validation finished: {} findings ({} errors)", len(findings),
                sum(1 for f in findings if f.is_error))
    return findings
