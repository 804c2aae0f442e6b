"""
Run reports: the record of one benchmark run, and what can be derived from it.

A report keeps every raw duration next to the statistics computed from
them, so the statistics can always be recomputed and checked.
"""
import csv
import io
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError

from xwebbench import __version__
from xwebbench.errors import ReportError
from xwebbench.harness.stats import Stats, compute_stats
from xwebbench.harness.verify import Verdict
from xwebbench.workload.queries import Block

logger = logging.getLogger(__name__)

COLD_CACHE_CAVEAT = (
    "cold runs are the first execution after loading; the backend's buffer "
    "and cache state is not controlled by the harness"
)

CSV_COLUMNS = ("query_id", "run_kind", "run_index", "duration_ms", "status")


class DocumentLoad(BaseModel):
    name: str
    size: int
    duration_ms: float


class LoadReport(BaseModel):
    total_ms: float = 0.0
    documents: List[DocumentLoad] = Field(default_factory=list)


class Execution(BaseModel):
    kind: Literal["cold", "warm"]
    index: int
    started_ms: float
    duration_ms: Optional[float] = None
    status: Literal["ok", "timed_out", "error"] = "ok"
    error: Optional[str] = None


class QueryRecord(BaseModel):
    query_id: str
    block: Block
    executions: List[Execution] = Field(default_factory=list)
    stats: Optional[Stats] = None

    @property
    def status(self) -> str:
        statuses = {e.status for e in self.executions}
        for status in ("error", "timed_out"):
            if status in statuses:
                return status
        return "ok"

    def durations(self) -> List[float]:
        return [e.duration_ms for e in self.executions if e.status == "ok" and e.duration_ms is not None]


class RunReport(BaseModel):
    version: str = __version__
    driver: str
    started_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    environment: Dict[str, Any] = Field(default_factory=dict)
    fact_count: Optional[int] = None
    load: Optional[LoadReport] = None
    queries: List[QueryRecord] = Field(default_factory=list)
    block_stats: Dict[str, Optional[Stats]] = Field(default_factory=dict)
    overall: Optional[Stats] = None
    verdicts: Dict[str, Verdict] = Field(default_factory=dict)
    caveat: str = COLD_CACHE_CAVEAT

    def durations(self) -> List[float]:
        return [d for q in self.queries for d in q.durations()]

    def record(self, query_id: str) -> Optional[QueryRecord]:
        for q in self.queries:
            if q.query_id == query_id:
                return q
        return None


def _stats_or_none(durations: List[float]) -> Optional[Stats]:
    return compute_stats(durations) if durations else None


def finalize_stats(report: RunReport) -> RunReport:
    """Fill per-query, per-block and overall statistics from the raw durations."""
    blocks: Dict[str, List[float]] = {}
    for q in report.queries:
        q.stats = _stats_or_none(q.durations())
        blocks.setdefault(q.block.value, []).extend(q.durations())
    report.block_stats = {block: _stats_or_none(values) for block, values in blocks.items()}
    report.overall = _stats_or_none(report.durations())
    return report


def stats_consistent(report: RunReport) -> bool:
    """True when the stored statistics equal those recomputed from the raw durations."""
    copy = report.model_copy(deep=True)
    finalize_stats(copy)
    return (
        copy.overall == report.overall
        and copy.block_stats == report.block_stats
        and all(a.stats == b.stats for a, b in zip(copy.queries, report.queries))
    )


def write_report_json(report: RunReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    return path


def read_report_json(path: Union[str, Path]) -> RunReport:
    path = Path(path)
    try:
        return RunReport.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ReportError(str(path), f"cannot read: {e}") from e
    except ValidationError as e:
        raise ReportError(str(path), f"not a run report: {e.error_count()} validation errors") from e


def report_csv(report: RunReport) -> str:
    """Flat CSV: one line per execution."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for q in report.queries:
        for e in q.executions:
            duration = "" if e.duration_ms is None else f"{e.duration_ms:.3f}"
            writer.writerow([q.query_id, e.kind, e.index, duration, e.status])
    return buffer.getvalue()


def write_report_csv(report: RunReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_csv(report), encoding="utf-8")
    return path


def load_reports(paths: Iterable[Union[str, Path]]) -> List[Tuple[Path, RunReport]]:
    """
    Read report files; directories contribute every *.json they hold.

    Raises:
        ReportError: no report found, or a report is corrupt
    """
    paths = list(paths)
    files: List[Path] = []
    for item in map(Path, paths):
        if item.is_dir():
            files.extend(sorted(item.glob("*.json")))
        else:
            files.append(item)
    if not files:
        raise ReportError(", ".join(str(p) for p in paths) or "<none>", "no report files")
    return [(f, read_report_json(f)) for f in files]


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.3f}"


def summarize_reports(reports: Iterable[Tuple[Path, RunReport]]) -> str:
    """Plain-text table of per-block and overall statistics, one section per report."""
    lines: List[str] = []
    header = f"{'block':<8}{'n':>6}{'global_ms':>14}{'avg_ms':>12}{'min_ms':>12}{'max_ms':>12}{'stddev_ms':>12}"
    for path, report in reports:
        load = _fmt(report.load.total_ms) if report.load else "-"
        lines.append(f"{path.name}: driver={report.driver} facts={report.fact_count} load_ms={load}")
        lines.append(header)
        rows = [(block, stats) for block, stats in report.block_stats.items()]
        rows.append(("ALL", report.overall))
        for block, stats in rows:
            if stats is None:
                lines.append(f"{block:<8}{0:>6}{'-':>14}{'-':>12}{'-':>12}{'-':>12}{'-':>12}")
                continue
            lines.append(
                f"{block:<8}{stats.count:>6}{_fmt(stats.global_ms):>14}{_fmt(stats.avg_ms):>12}"
                f"{_fmt(stats.min_ms):>12}{_fmt(stats.max_ms):>12}{_fmt(stats.stddev_ms):>12}"
            )
        failed = [q.query_id for q in report.queries if q.status != "ok"]
        if failed:
            lines.append("not ok: " + ", ".join(failed))
        mismatches = [v.query_id for v in report.verdicts.values() if v.status == "mismatch"]
        if mismatches:
            lines.append("verification mismatches: " + ", ".join(mismatches))
        lines.append("")
    return "\n".join(lines)


def plot_series(reports: Iterable[Tuple[Path, RunReport]]) -> str:
    """
    Response time against warehouse size: one series per block, x = fact count.

    Reports without a fact count are skipped.
    """
    points: List[Tuple[str, int, Stats]] = []
    for path, report in reports:
        if report.fact_count is None:
            logger.warning("%s: no fact count, left out of the plot series", path)
            continue
        for block, stats in report.block_stats.items():
            if stats is not None:
                points.append((block, report.fact_count, stats))
    points.sort(key=lambda p: (p[0], p[1]))

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["block", "fact_count", "global_ms", "avg_ms", "min_ms", "max_ms"])
    for block, facts, stats in points:
        writer.writerow([block, facts, f"{stats.global_ms:.3f}", f"{stats.avg_ms:.3f}",
                         f"{stats.min_ms:.3f}", f"{stats.max_ms:.3f}"])
    return buffer.getvalue()
