"""
Render workload queries as XQuery FLWOR text for external XML databases.

The rendered query first builds one <row> per (fact, category binding) that
passes the restriction, carrying the grouping values and the fact's measure
elements, then groups those rows with distinct-values over a composite key
(XQuery 1.0 has no grouping clause). Rendering is deterministic.
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

from xwebbench.errors import RenderError
from xwebbench.model import CATEGORY_ATTRIBUTE, AttributeBinding, WarehouseModel, model_vocabulary, rollup_path
from xwebbench.warehouse import INTEGER_ATTRIBUTES, MONEY_ATTRIBUTES
from xwebbench.workload.queries import Comparison, QuerySpec, WorkloadConfig, build_workload, conjuncts

logger = logging.getLogger(__name__)

_FUNCTIONS = {"Min": "min", "Max": "max", "Sum": "sum", "Avg": "avg"}
_OPERATORS = {"=": "=", "!=": "!=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def _var(level: str) -> str:
    return "$" + level.lower()


def _literal(value) -> str:
    if isinstance(value, str):
        return '"' + value.replace('"', '""') + '"'
    return str(value)


class _Plan:
    """Variables and clauses needed to reach the attributes of one query."""

    def __init__(self, q: QuerySpec, m: WarehouseModel):
        self.q = q
        self.m = m
        vocabulary = model_vocabulary(m)
        missing = sorted(a for a in q.attributes() if a not in vocabulary)
        if missing:
            raise RenderError(f"{q.id}: unknown attribute(s) {', '.join(missing)}")
        self.bindings: Dict[str, AttributeBinding] = {a: vocabulary[a] for a in q.attributes()}
        self.clauses: List[str] = []
        self.uses_categories = CATEGORY_ATTRIBUTE in q.attributes()
        self._bind_dimensions()

    def _bind_dimensions(self) -> None:
        needed: Dict[str, List[str]] = {}
        for attribute, binding in self.bindings.items():
            if binding.dimension == self.m.fact.id or attribute == CATEGORY_ATTRIBUTE:
                continue
            needed.setdefault(binding.dimension, []).append(binding.level)
        if self.uses_categories:
            part = self.bindings[CATEGORY_ATTRIBUTE].dimension
            needed.setdefault(part, []).append(self.m.dimension(part).finest.id)

        for ref in self.m.fact.dimrefs:
            if ref.dimension not in needed:
                continue
            dimension = self.m.dimension(ref.dimension)
            deepest: List[str] = []
            for level in needed[ref.dimension]:
                path = rollup_path(dimension, level)
                if len(path) > len(deepest):
                    deepest = path
            document = f'doc("{dimension.path}")/dimension/Level'
            previous: Optional[str] = None
            for level in deepest:
                if previous is None:
                    key = f"$f/{ref.attribute}"
                else:
                    key = f'{_var(previous)}/rollup[@level="{level}"]/@ref'
                self.clauses.append(f'for {_var(level)} in {document}[@id="{level}"]/instance[@key = {key}]')
                previous = level

        if self.uses_categories:
            part_level = _var(self.m.dimension(self.bindings[CATEGORY_ATTRIBUTE].dimension).finest.id)
            categories = f'{part_level}/rollup[@level="Category"]/@ref/string()'
            if self.q.category_depth == 0:
                self.clauses.append(f"for $t_name in {categories}")
            else:
                self.clauses.append(
                    f"for $t_name in distinct-values(for $c in {categories} return local:supercategories($c))"
                )

    def value(self, attribute: str) -> str:
        """Expression yielding the atomic value of `attribute`, typed for comparison."""
        if attribute == CATEGORY_ATTRIBUTE:
            return "$t_name"
        binding = self.bindings[attribute]
        if binding.dimension == self.m.fact.id:
            raw = f"$f/{attribute}"
        else:
            raw = f'{_var(binding.level)}/attribute[@name="{attribute}"]/@value'
        return _typed(raw, attribute)

    def condition(self, term: Comparison) -> str:
        left = self.value(term.attribute)
        if term.derived == "quarter":
            left = f"xs:integer(ceiling({left} div 3))"
        return f"{left} {_OPERATORS[term.op]} {_literal(term.value)}"


_SUPERCATEGORIES = '''declare function local:supercategories($name as xs:string) as xs:string* {{
  let $parents := doc("{path}")/dimension/Level[@id="Category"]/instance[@key = $name]/rollup[@level="Category"]/@ref/string()
  return if (empty($parents)) then $name
         else distinct-values(for $p in $parents return local:supercategories($p))
}};
'''


def render_xquery(q: QuerySpec, m: WarehouseModel) -> str:
    """
    Render `q` as a self-contained XQuery over the warehouse documents of `m`.

    Raises:
        RenderError: the query references an attribute the model does not declare
    """
    plan = _Plan(q, m)
    lines: List[str] = [f"(: {q.id} {q.block.value}: {q.description} :)"]
    if plan.uses_categories and q.category_depth > 0:
        part = m.dimension(plan.bindings[CATEGORY_ATTRIBUTE].dimension)
        lines.append(_SUPERCATEGORIES.format(path=part.path))

    lines.append("let $rows :=")
    lines.append(f'  for $f in doc("{m.fact.path}")/facts/fact')
    lines.extend("  " + clause for clause in plan.clauses)
    conditions = [plan.condition(term) for term in conjuncts(q.restriction)]
    if conditions:
        lines.append("  where " + "\n    and ".join(conditions))
    key = ", ".join(f"string({plan.value(a)})" for a in q.group_by) or '""'
    children = "".join(f"<{a}>{{{plan.value(a)}}}</{a}>" for a in q.group_by)
    measures = "".join(f"{{$f/{measure}}}" for measure in q.measures)
    lines.append(f'  return <row key="{{string-join(({key}), "|")}}">{children}{measures}</row>')

    lines.append("return <result>{")
    lines.append("  for $key in distinct-values($rows/@key)")
    lines.append("  let $group := $rows[@key = $key]")
    lines.append("  where " + " and ".join(f"exists($group/{measure})" for measure in q.measures))

    order = [_typed_group_value(o.attribute) + (" descending" if o.descending else "") for o in q.ordering]
    ordered = {o.attribute for o in q.ordering}
    order.extend(_typed_group_value(a) for a in q.group_by if a not in ordered)
    if order:
        lines.append("  order by " + ", ".join(order))

    aggregates = "".join(
        f"<{a.column}>{{{_FUNCTIONS[a.function]}({_measure_values(a.measure)})}}</{a.column}>" for a in q.aggregations
    )
    keys = "".join(f"{{$group[1]/{a}}}" for a in q.group_by)
    lines.append(f"  return <row>{keys}{aggregates}</row>")
    lines.append("}</result>")
    return "\n".join(lines) + "\n"


def _typed(raw: str, attribute: str) -> str:
    if attribute in INTEGER_ATTRIBUTES:
        return f"xs:integer({raw})"
    if attribute in MONEY_ATTRIBUTES:
        return f"xs:decimal({raw})"
    return f"string({raw})"


def _typed_group_value(attribute: str) -> str:
    return _typed(f"$group[1]/{attribute}", attribute)


def _measure_values(measure: str) -> str:
    # aggregates see typed values, never untyped element content
    return f"for $v in $group/{measure} return {_typed('$v', measure)}"


def export_workload(directory: Union[str, Path], wc: WorkloadConfig, m: WarehouseModel) -> List[Path]:
    """Write one Qnn.xq file per enabled query."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    written = []
    for q in build_workload(wc):
        path = root / f"{q.id}.xq"
        path.write_text(render_xquery(q, m), encoding="utf-8")
        written.append(path)
    logger.info("exported %d queries to %s", len(written), root)
    return written
