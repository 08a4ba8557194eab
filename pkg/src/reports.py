"""
Structured report records.

Text records are line oriented: a `schema=1 kind=<kind>` header followed by
`key=value` lines in insertion order; list values get one `key[i]=value` line
per item. JSON output carries the same fields.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple, Union

try:
    from .abelian import GroupStructure, render_weight
    from .eigen import CocycleTable, EvStructure, GradedElement, Presentation, TorsionBlock, WeightedTower
    from .tower import Element, GoodConstructionReport
    from .verify import SuiteResult
except ImportError:
    from abelian import GroupStructure, render_weight
    from eigen import CocycleTable, EvStructure, GradedElement, Presentation, TorsionBlock, WeightedTower
    from tower import Element, GoodConstructionReport
    from verify import SuiteResult

logger = logging.getLogger(__name__)

SCHEMA = 1

Value = Union[str, int, bool, List[str]]


@dataclass
class Report:
    kind: str
    fields: List[Tuple[str, Value]] = field(default_factory=list)

    def add(self, key: str, value: Any) -> "Report":
        if isinstance(value, (list, tuple)):
            value = [str(v) for v in value]
        elif not isinstance(value, (bool, int)):
            value = str(value)
        self.fields.append((key, value))
        return self

    def get(self, key: str) -> Value:
        for k, v in self.fields:
            if k == key:
                return v
        raise KeyError(key)

    def render_text(self) -> str:
        lines = [f"schema={SCHEMA} kind={self.kind}"]
        for key, value in self.fields:
            if isinstance(value, list):
                lines.append(f"{key}.count={len(value)}")
                lines.extend(f"{key}[{i}]={item}" for i, item in enumerate(value))
            elif isinstance(value, bool):
                lines.append(f"{key}={'true' if value else 'false'}")
            else:
                lines.append(f"{key}={value}")
        return "\n".join(lines)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"schema": SCHEMA, "kind": self.kind}
        out.update(self.fields)
        return out

    def render_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def emit(reports: Sequence[Report], as_json: bool = False) -> str:
    """All reports as one document: text records separated by blank lines, or a JSON list."""
    if as_json:
        if len(reports) == 1:
            return reports[0].render_json()
        return json.dumps([r.to_dict() for r in reports], indent=2, ensure_ascii=False)
    return "\n\n".join(r.render_text() for r in reports)


def group_report(group: GroupStructure, kind: str = "group") -> Report:
    report = Report(kind)
    report.add("ambient", group.ambient.describe())
    report.add("generators", [render_weight(g) for g in group.generators])
    report.add("rank", group.rank)
    report.add("invariant_factors", [str(d) for d in group.invariant_factors])
    report.add("torsion_order", group.torsion_order)
    report.add("free_basis", [render_weight(b) for b in group.free_basis])
    report.add("torsion_generators", [render_weight(t) for t in group.torsion_generators])
    report.add("structure", group.render())
    return report


def weights_report(wt: WeightedTower) -> Report:
    report = Report("weights")
    report.add("tower", wt.tower.name or wt.tower.describe())
    report.add("maps", [m.name for m in wt.maps])
    report.add("map_kind", wt.kind.value)
    report.add("weights", [f"{g} -> {w}" for g, w in wt.weight_table()])
    return report


def ev_report(wt: WeightedTower, ev: EvStructure) -> Report:
    report = Report("ev")
    report.add("tower", wt.tower.name or wt.tower.describe())
    report.add("maps", [m.name for m in wt.maps])
    report.add("weights", [f"{g} -> {w}" for g, w in wt.weight_table()])
    report.add("monoid_generators", [render_weight(w) for w in ev.monoid_generators])
    report.add("rank", ev.group.rank)
    report.add("invariant_factors", [str(d) for d in ev.group.invariant_factors])
    report.add("structure", ev.group.render())
    return report


def components_report(wt: WeightedTower, element: Element, graded: GradedElement) -> Report:
    report = Report("components")
    report.add("tower", wt.tower.name or wt.tower.describe())
    report.add("maps", [m.name for m in wt.maps])
    report.add("element", element.render())
    report.add("components", [f"{render_weight(w)}: {e.render()}" for w, e in graded.components.items()])
    return report


def presentation_report(wt: WeightedTower, pres: Presentation, table: CocycleTable = None) -> Report:
    report = Report("presentation")
    report.add("tower", wt.tower.name or wt.tower.describe())
    report.add("structure", pres.group.render())
    report.add("basis", [f"{render_weight(v)} -> {u.render()}" for v, u in zip(pres.free_basis, pres.representatives)])
    report.add("sigma_actions", [m.name for m in pres.sigma_actions])
    report.add("lambda", [f"lambda_{i}{j} = {c.render()}" for (i, j), c in sorted(pres.commutation_scalars.items())])
    report.add("torsion", [f"{render_weight(t)} -> {u.render()}"
                           for t, u in zip(pres.torsion, pres.torsion_representatives)])
    report.add("constants", [m.render() for m in pres.constants.monomials])
    report.add("constants_commutative", pres.constants.commutative)
    report.add("relations_hold", pres.relations_hold)
    report.add("action_preserves_constants", pres.action_preserves_constants)
    if table is not None:
        report.add("cocycle_entries", len(table.entries))
        report.add("cocycle_coherent", table.coherent)
        report.add("cocycle_associative", table.associative)
    return report


def torsion_report(block: TorsionBlock) -> Report:
    report = Report("torsion")
    report.add("torsion", [render_weight(t) for t in block.torsion])
    report.add("basis", [u.render() for u in block.basis])
    report.add("dimension", block.dimension)
    report.add("constants", [m.render() for m in block.constants.monomials])
    if block.matrix is not None:
        report.add("matrix", ["[" + ", ".join(e.render() for e in row) + "]" for row in block.matrix])
        report.add("determinant", block.determinant.render())
    report.add("division_check", block.division_check)
    return report


def good_report(good: GoodConstructionReport) -> Report:
    report = Report("good")
    report.add("tower", good.tower)
    report.add("kind", good.kind)
    report.add("opposite_valid", good.opposite_valid)
    report.add("opposite_kind", good.opposite_kind)
    report.add("tensor_square_valid", good.tensor_square_valid)
    report.add("opposite_levels", [f"{lv['level']}: sigma {lv['sigma']}; delta {lv['delta']}" for lv in good.levels])
    report.add("problems", good.problems)
    report.add("good", good.good)
    return report


def verify_reports(results: Sequence[SuiteResult], seed: int, samples: int) -> List[Report]:
    """One record per suite plus a summary record."""
    out = []
    for result in results:
        report = Report("suite")
        report.add("suite", result.suite)
        report.add("status", "PASS" if result.passed else "FAIL")
        lines = []
        for check in result.checks:
            line = f"{check.status} {check.name} ({check.checked})"
            if check.skipped:
                line += f": {check.skipped}"
            elif check.witness:
                line += f": witness {check.witness}"
            lines.append(line)
        report.add("checks", lines)
        out.append(report)
    summary = Report("verify")
    summary.add("seed", seed)
    summary.add("samples", samples)
    summary.add("suites", [r.suite for r in results])
    summary.add("failed", [c.name for r in results for c in r.failures])
    summary.add("status", "PASS" if all(r.passed for r in results) else "FAIL")
    out.append(summary)
    return out
