"""
Brute-force query oracle.

Recomputes a workload query the slow way: every fact is joined with every
dimension into one flat record per category binding, the records are
filtered, sorted by group key and scanned for runs. Nothing here is shared
with the reference evaluator, so agreement between the two is evidence that
both are right.
"""
import functools
import math
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Dict, List, Optional, Tuple

from xwebbench.engine.results import QueryResult
from xwebbench.errors import EvaluationError
from xwebbench.model import model_vocabulary
from xwebbench.warehouse import Warehouse
from xwebbench.workload.queries import And, QuerySpec

ORACLE_FACT_LIMIT = 10_000

_CENT = Decimal("0.01")


def _climb(w: Warehouse, dimension_id: str, key: Optional[str]) -> Dict[str, Dict[str, Any]]:
    """Attributes of the member at `key` and every ancestor reached by first-parent links, per level."""
    dimension = w.model.dimension(dimension_id)
    members = w.members.get(dimension_id, {})
    found: Dict[str, Dict[str, Any]] = {}
    if key is None:
        return found
    level = dimension.levels[0]
    member = members.get(level.id, {}).get(key)
    while member is not None:
        found[level.id] = dict(member.attributes)
        targets = [t for t in level.rollup if t != level.id]
        if not targets:
            break
        refs = [p.key for p in member.parents if p.level == targets[0]]
        level = dimension.level(targets[0])
        member = members.get(level.id, {}).get(refs[0]) if refs and level is not None else None
    return found


def _top_categories(w: Warehouse, name: str, seen: Tuple[str, ...] = ()) -> List[str]:
    categories = w.members.get("PartDim", {}).get("Category", {})
    member = categories.get(name)
    if member is None or name in seen:
        return []
    parents = [p.key for p in member.parents if p.level == "Category" and p.key in categories]
    if not parents:
        return [name]
    out: List[str] = []
    for parent in parents:
        for top in _top_categories(w, parent, seen + (name,)):
            if top not in out:
                out.append(top)
    return out


def _satisfies(record: Dict[str, Any], q: QuerySpec) -> bool:
    if q.restriction is None:
        return True
    terms = q.restriction.terms if isinstance(q.restriction, And) else (q.restriction,)
    for term in terms:
        value = record.get(term.attribute)
        if value is None:
            return False
        if term.derived == "quarter":
            if not isinstance(value, int) or value < 1 or value > 12:
                return False
            value = math.ceil(value / 3)
        literal = term.value
        if isinstance(value, str) or isinstance(literal, str):
            value, literal = str(value), str(literal)
        ok = {
            "=": value == literal, "!=": value != literal,
            "<": value < literal, "<=": value <= literal,
            ">": value > literal, ">=": value >= literal,
        }[term.op]
        if not ok:
            return False
    return True


def oracle_evaluate(q: QuerySpec, w: Warehouse) -> QueryResult:
    """
    Evaluate `q` by exhaustive join and scan.

    Raises:
        EvaluationError: more than ORACLE_FACT_LIMIT facts, or an attribute
            the model does not declare
    """
    if len(w.facts) > ORACLE_FACT_LIMIT:
        raise EvaluationError(f"oracle refuses {len(w.facts)} facts (limit {ORACLE_FACT_LIMIT})")
    vocabulary = model_vocabulary(w.model)
    for attribute in q.attributes():
        if attribute not in vocabulary:
            raise EvaluationError(f"{q.id}: attribute {attribute} not in the warehouse vocabulary")

    # 1. materialize the join: one flat record per fact and category binding
    records: List[Tuple[int, Dict[str, Any]]] = []
    for index, fact in enumerate(w.facts):
        record: Dict[str, Any] = {}
        part_key = None
        for ref in w.model.fact.dimrefs:
            value = getattr(fact, ref.attribute, None)
            key = None if value is None else str(value)
            if ref.dimension == "PartDim":
                part_key = key
            for level, attributes in _climb(w, ref.dimension, key).items():
                for name, attr_value in attributes.items():
                    if vocabulary.get(name) == (ref.dimension, level):
                        record[name] = attr_value
        for measure in w.model.fact.measure_attributes:
            record[measure] = getattr(fact, measure, None)

        if "t_name" not in q.attributes():
            records.append((index, record))
            continue
        part = w.members.get("PartDim", {}).get("Part", {}).get(part_key) if part_key else None
        if part is None:
            continue
        known = w.members.get("PartDim", {}).get("Category", {})
        names = [p.key for p in part.parents if p.level == "Category" and p.key in known]
        if q.category_depth == 1:
            expanded: List[str] = []
            for name in names:
                for top in _top_categories(w, name):
                    if top not in expanded:
                        expanded.append(top)
            names = expanded
        for name in names:
            records.append((index, dict(record, t_name=name)))

    # 2. filter and project onto (group key, fact index)
    keyed: List[Tuple[Tuple, int]] = []
    for index, record in records:
        if not _satisfies(record, q):
            continue
        key = tuple(record.get(a) for a in q.group_by)
        if None in key:
            continue
        keyed.append((key, index))

    # 3. sort, then scan runs of equal keys; a fact counts once per key
    keyed.sort(key=lambda pair: (pair[0], pair[1]))
    rows = []
    position = 0
    while position < len(keyed):
        key = keyed[position][0]
        members: List[int] = []
        while position < len(keyed) and keyed[position][0] == key:
            if not members or members[-1] != keyed[position][1]:
                members.append(keyed[position][1])
            position += 1
        row = _aggregate(q, key, [w.facts[i] for i in members])
        if row is not None:
            rows.append(row)

    # 4. order
    rows.sort(key=functools.cmp_to_key(lambda a, b: _compare_rows(q, a, b)))
    return QueryResult(columns=q.columns, rows=rows)


def _aggregate(q: QuerySpec, key: Tuple, facts: List[Any]) -> Optional[Tuple]:
    cells = []
    present = {}
    for measure in dict.fromkeys(a.measure for a in q.aggregations):
        present[measure] = [getattr(f, measure) for f in facts if getattr(f, measure) is not None]
        if not present[measure]:
            return None
    for aggregation in q.aggregations:
        values = present[aggregation.measure]
        if aggregation.function == "Min":
            cells.append(min(values))
        elif aggregation.function == "Max":
            cells.append(max(values))
        elif aggregation.function == "Sum":
            cells.append(sum(values))
        else:
            mean = Decimal(sum(values)) / Decimal(len(values))
            cells.append(mean.quantize(_CENT, rounding=ROUND_HALF_UP))
    return key + tuple(cells)


def _compare_rows(q: QuerySpec, a: Tuple, b: Tuple) -> int:
    for order in q.ordering:
        i = q.group_by.index(order.attribute)
        if a[i] != b[i]:
            result = -1 if a[i] < b[i] else 1
            return -result if order.descending else result
    for i in range(len(q.group_by)):
        if a[i] != b[i]:
            return -1 if a[i] < b[i] else 1
    return 0
