"""
Reference evaluator for workload queries over an in-memory warehouse.

This module defines what a correct answer is:

* a fact contributes to a query only if every dimension reference the query
  needs is present and resolves, up to the levels the query reads;
* aggregates skip facts whose measure is missing; a group exists only when
  every aggregated measure has at least one value in it;
* a t_name query evaluates once per category binding of the fact's part
  (after rolling the catset up to the query's depth), and a fact counts once
  per distinct group key it reaches;
* Avg is rounded half-up to cents;
* rows follow the query ordering, ties broken by ascending group keys.
"""
import logging
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from xwebbench.datagen.taxonomy import CategoryTaxonomy
from xwebbench.engine.results import QueryResult
from xwebbench.errors import EvaluationError
from xwebbench.model import CATEGORY_ATTRIBUTE, AttributeBinding, WarehouseModel, model_vocabulary, rollup_path
from xwebbench.warehouse import AttributeValue, Warehouse
from xwebbench.workload.queries import Comparison, QuerySpec, conjuncts, quarter

logger = logging.getLogger(__name__)

CATEGORY_LEVEL = "Category"

Resolved = Dict[str, AttributeValue]


def rollup_categories(catset: Iterable[str], tax: CategoryTaxonomy, depth: int) -> FrozenSet[str]:
    """
    Categories a catset stands for at the given depth.

    Depth 0 is the catset itself. Depth 1 replaces each category by the
    level-1 supercategories it rolls up to; level-1 categories stand for
    themselves.

    Raises:
        EvaluationError: unknown category, or depth other than 0 and 1
    """
    if depth not in (0, 1):
        raise EvaluationError(f"category depth must be 0 or 1, got {depth}")
    names = list(catset)
    for name in names:
        if name not in tax:
            raise EvaluationError(f"unknown category {name}")
    if depth == 0:
        return frozenset(names)
    result: Set[str] = set()
    for name in names:
        result |= _supercategories(name, tax)
    return frozenset(result)


def _supercategories(name: str, tax: CategoryTaxonomy) -> Set[str]:
    parents = tax.parents(name)
    if not parents:
        return {name}
    result: Set[str] = set()
    for parent in parents:
        result |= _supercategories(parent, tax)
    return result


@dataclass
class _Accumulator:
    count: int = 0
    total: AttributeValue = 0
    low: Optional[AttributeValue] = None
    high: Optional[AttributeValue] = None

    def add(self, value: AttributeValue) -> None:
        self.count += 1
        self.total += value
        if self.low is None or value < self.low:
            self.low = value
        if self.high is None or value > self.high:
            self.high = value

    def result(self, function: str) -> AttributeValue:
        if function == "Min":
            return self.low
        if function == "Max":
            return self.high
        if function == "Sum":
            return self.total
        return average(self.total, self.count)


def average(total: AttributeValue, count: int) -> Decimal:
    """total / count rounded half-up (away from zero) to cents, computed exactly."""
    exact = Fraction(Decimal(total)) * 100 / count
    cents = math.floor(abs(exact) + Fraction(1, 2))
    return Decimal(-cents if exact < 0 else cents).scaleb(-2)


def _compare(value: AttributeValue, op: str, literal) -> bool:
    if isinstance(value, str) != isinstance(literal, str):
        value, literal = str(value), str(literal)
    if op == "=":
        return value == literal
    if op == "!=":
        return value != literal
    if op == "<":
        return value < literal
    if op == "<=":
        return value <= literal
    if op == ">":
        return value > literal
    return value >= literal


def _holds(term: Comparison, value: Optional[AttributeValue]) -> bool:
    if value is None:
        return False
    if term.derived == "quarter":
        if not isinstance(value, int) or not 1 <= value <= 12:
            return False
        value = quarter(value)
    return _compare(value, term.op, term.value)


def _resolve_dimension(w: Warehouse, dimension_id: str, levels: Iterable[str]) -> Dict[str, Optional[Resolved]]:
    """
    Finest-level key -> attributes of the member and of its ancestors up to
    the coarsest requested level; None when the chain is broken.
    """
    dimension = w.model.dimension(dimension_id)
    path: List[str] = [dimension.finest.id]
    for level in levels:
        candidate = rollup_path(dimension, level)
        if len(candidate) > len(path):
            path = candidate

    tables = w.members.get(dimension_id, {})
    resolved: Dict[str, Optional[Resolved]] = {}
    for key, member in tables.get(path[0], {}).items():
        values: Resolved = dict(member.attributes)
        current = member
        for level in path[1:]:
            parents = current.parent_keys(level)
            parent = tables.get(level, {}).get(parents[0]) if parents else None
            if parent is None:
                values = None
                break
            for name, value in parent.attributes:
                values.setdefault(name, value)
            current = parent
        resolved[key] = values
    return resolved


class _Plan:
    def __init__(self, q: QuerySpec, model: WarehouseModel):
        vocabulary = model_vocabulary(model)
        unknown = sorted(a for a in q.attributes() if a not in vocabulary)
        if unknown:
            raise EvaluationError(f"{q.id}: attribute(s) {', '.join(unknown)} not in the warehouse vocabulary")
        self.bindings: Dict[str, AttributeBinding] = {a: vocabulary[a] for a in q.attributes()}
        self.uses_categories = CATEGORY_ATTRIBUTE in self.bindings
        self.levels: Dict[str, Set[str]] = {}
        self.attributes_of: Dict[str, List[str]] = {}
        for attribute, binding in sorted(self.bindings.items()):
            if binding.dimension == model.fact.id:
                continue
            if attribute == CATEGORY_ATTRIBUTE:
                self.attributes_of.setdefault(binding.dimension, [])
                self.levels.setdefault(binding.dimension, set()).add(model.dimension(binding.dimension).finest.id)
            else:
                self.levels.setdefault(binding.dimension, set()).add(binding.level)
                self.attributes_of.setdefault(binding.dimension, []).append(attribute)
        self.category_dimension = self.bindings[CATEGORY_ATTRIBUTE].dimension if self.uses_categories else None
        # (dimension id, fact slot holding its reference)
        self.references: List[Tuple[str, str]] = [
            (ref.dimension, ref.attribute) for ref in model.fact.dimrefs if ref.dimension in self.levels
        ]
        missing = [d for d in self.levels if d not in {r[0] for r in self.references}]
        if missing:
            raise EvaluationError(f"{q.id}: the fact does not reference dimension(s) {', '.join(missing)}")


def evaluate(q: QuerySpec, w: Warehouse, tax: CategoryTaxonomy) -> QueryResult:
    """
    Evaluate a workload query.

    Raises:
        EvaluationError: the query reads an attribute the warehouse does not declare
    """
    plan = _Plan(q, w.model)
    tables = {d: _resolve_dimension(w, d, levels) for d, levels in plan.levels.items()}
    categories: Dict[str, List[str]] = {}
    if plan.uses_categories:
        finest = w.model.dimension(plan.category_dimension).finest.id
        for key, member in w.level_members(plan.category_dimension, finest).items():
            catset = [name for name in member.parent_keys(CATEGORY_LEVEL) if name in tax]
            categories[key] = sorted(rollup_categories(catset, tax, q.category_depth))

    terms = conjuncts(q.restriction)
    groups: Dict[Tuple, Dict[str, _Accumulator]] = {}

    for fact in w.facts:
        values: Resolved = {}
        complete = True
        part_key = None
        for dimension_id, slot in plan.references:
            ref = getattr(fact, slot, None)
            row = tables[dimension_id].get(str(ref)) if ref is not None else None
            if row is None:
                complete = False
                break
            for attribute in plan.attributes_of[dimension_id]:
                values[attribute] = row.get(attribute)
            if dimension_id == plan.category_dimension:
                part_key = str(ref)
        if not complete:
            continue
        for measure in q.measures:
            values[measure] = getattr(fact, measure)

        bindings: List[Optional[str]] = categories.get(part_key, []) if plan.uses_categories else [None]
        keys: Set[Tuple] = set()
        for category in bindings:
            if category is not None:
                values[CATEGORY_ATTRIBUTE] = category
            if not all(_holds(term, values.get(term.attribute)) for term in terms):
                continue
            key = tuple(values.get(a) for a in q.group_by)
            if any(v is None for v in key):
                continue
            keys.add(key)

        for key in keys:
            accumulators = groups.setdefault(key, {m: _Accumulator() for m in q.measures})
            for measure in q.measures:
                value = getattr(fact, measure)
                if value is not None:
                    accumulators[measure].add(value)

    rows = []
    for key, accumulators in groups.items():
        if any(acc.count == 0 for acc in accumulators.values()):
            continue
        rows.append(key + tuple(accumulators[a.measure].result(a.function) for a in q.aggregations))

    rows = order_rows(q, rows)
    logger.debug("%s: %d groups from %d facts", q.id, len(rows), len(w.facts))
    return QueryResult(columns=q.columns, rows=rows)


def order_rows(q: QuerySpec, rows: List[Tuple]) -> List[Tuple]:
    """Sort by the query ordering; ties fall back to ascending group keys."""
    width = len(q.group_by)
    rows = sorted(rows, key=lambda r: r[:width])
    for key in reversed(q.ordering):
        index = q.group_by.index(key.attribute)
        rows.sort(key=lambda r: r[index], reverse=key.descending)
    return rows
