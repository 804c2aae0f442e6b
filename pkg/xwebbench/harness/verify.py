import logging
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict

from xwebbench.datagen.taxonomy import CategoryTaxonomy
from xwebbench.drivers.base import Driver
from xwebbench.engine.evaluate import evaluate
from xwebbench.engine.results import QueryResult, canonical_rows
from xwebbench.errors import XWebError
from xwebbench.warehouse import Warehouse
from xwebbench.workload.queries import QuerySpec, WorkloadConfig, build_workload
from xwebbench.workload.xquery import render_xquery

logger = logging.getLogger(__name__)

# Rows listed in a mismatch summary
DIFF_SAMPLE = 3


class Verdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    query_id: str
    status: Literal["match", "mismatch", "incomparable"]
    detail: str = ""


def compare_results(q: QuerySpec, expected: QueryResult, actual: QueryResult) -> Verdict:
    """Order-insensitive comparison at cent precision; a mismatch names the differing group keys."""
    if tuple(actual.columns) != tuple(expected.columns):
        return Verdict(query_id=q.id, status="mismatch",
                       detail=f"columns {list(actual.columns)} != {list(expected.columns)}")
    want = canonical_rows(expected.rows)
    got = canonical_rows(actual.rows)
    if want == got:
        return Verdict(query_id=q.id, status="match", detail=f"{len(want)} rows")

    width = len(q.group_by)
    missing = [r for r in want if r not in got]
    unexpected = [r for r in got if r not in want]
    wrong_keys: List[str] = []
    got_by_key = {r[:width]: r for r in unexpected}
    for row in missing:
        if row[:width] in got_by_key:
            wrong_keys.append(_key_text(row[:width]))
    parts = [f"{len(missing)} expected rows missing", f"{len(unexpected)} unexpected rows"]
    if wrong_keys:
        parts.append("wrong aggregates for " + ", ".join(wrong_keys[:DIFF_SAMPLE]))
    elif missing:
        parts.append("first missing " + _key_text(missing[0][:width]))
    elif unexpected:
        parts.append("first unexpected " + _key_text(unexpected[0][:width]))
    return Verdict(query_id=q.id, status="mismatch", detail=f"{q.id}: " + "; ".join(parts))


def _key_text(key) -> str:
    return "(" + ", ".join(key) + ")" if key else "(all facts)"


def verify_backend(
    drv: Driver,
    w: Warehouse,
    tax: CategoryTaxonomy,
    wc: WorkloadConfig,
) -> Dict[str, Verdict]:
    """
    Compare the backend's answers with the reference evaluator, query by query.

    Backends that cannot return rows get "incomparable" for every query. A
    backend error counts as a mismatch.
    """
    verdicts: Dict[str, Verdict] = {}
    for q in build_workload(wc):
        if not drv.comparable_rows:
            verdicts[q.id] = Verdict(query_id=q.id, status="incomparable", detail=f"{drv.name} returns opaque payloads")
            continue
        expected = evaluate(q, w, tax)
        try:
            outcome = drv.execute_query(q, render_xquery(q, w.model))
        except XWebError as e:
            verdicts[q.id] = Verdict(query_id=q.id, status="mismatch", detail=f"{q.id}: backend error: {e}")
            continue
        actual: Optional[QueryResult] = outcome.result
        if actual is None:
            verdicts[q.id] = Verdict(query_id=q.id, status="incomparable", detail="no rows in response")
            continue
        verdicts[q.id] = compare_results(q, expected, actual)
        if verdicts[q.id].status == "mismatch":
            logger.warning("verification mismatch: %s", verdicts[q.id].detail)
    return verdicts
