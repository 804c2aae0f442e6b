"""
The benchmark protocol: load test, then for every enabled query one cold
execution followed by NRUN warm executions, each timed separately.

Executions are serial. Each one runs on its own daemon worker thread and the
harness stops waiting once the per-query timeout expires; the remaining warm
runs of that query are skipped. Drivers that can abort a call themselves
(HttpDriver bounds its request by the same timeout) end the call there. An
in-process driver that ignores the bound keeps running in the abandoned
worker while the harness moves on to the next query, so its work can overlap
the next execution; abandoned workers are logged at the end of the run.
"""
import logging
import threading
import time
from concurrent.futures import Future, TimeoutError as FuturesTimeoutError
from typing import Any, Callable, Dict, List, Optional, Tuple

from xwebbench.codec.documents import WarehouseDocuments, read_source
from xwebbench.drivers.base import Driver, QueryOutcome
from xwebbench.errors import DriverError, DriverTimeout, XWebError
from xwebbench.harness.report import DocumentLoad, Execution, LoadReport, QueryRecord, RunReport, finalize_stats
from xwebbench.model import WarehouseModel
from xwebbench.workload.queries import QuerySpec, WorkloadConfig, build_workload
from xwebbench.workload.xquery import render_xquery

logger = logging.getLogger(__name__)

Clock = Callable[[], float]


def _ms(seconds: float) -> float:
    return seconds * 1000.0


def load_test(drv: Driver, docs: WarehouseDocuments, clock: Clock = time.perf_counter) -> LoadReport:
    """
    Ship the warehouse documents in load order and time each acknowledgement.

    Raises:
        DriverError: the backend rejected a document; `partial` holds the
            timings of the documents loaded before it
    """
    report = LoadReport()
    for name, source in docs.iter_documents():
        data = read_source(source)
        started = clock()
        try:
            drv.load_document(name, data)
        except DriverError as e:
            raise DriverError(f"load of {name} failed: {e}", partial=report) from e
        elapsed = _ms(clock() - started)
        report.documents.append(DocumentLoad(name=name, size=len(data), duration_ms=elapsed))
        report.total_ms += elapsed
        logger.debug("loaded %s: %d bytes in %.3f ms", name, len(data), elapsed)
    logger.info("load test: %d documents in %.3f ms", len(report.documents), report.total_ms)
    return report


def _timed_call(drv: Driver, q: QuerySpec, text: str, clock: Clock) -> Tuple[QueryOutcome, float]:
    started = clock()
    outcome = drv.execute_query(q, text)
    return outcome, _ms(clock() - started)


def _start(drv: Driver, q: QuerySpec, text: str, clock: Clock) -> Tuple[Future, threading.Thread]:
    future: Future = Future()

    def work() -> None:
        if not future.set_running_or_notify_cancel():
            return
        try:
            future.set_result(_timed_call(drv, q, text, clock))
        except BaseException as e:  # noqa: BLE001
            future.set_exception(e)

    worker = threading.Thread(target=work, name=f"xweb-query-{q.id}", daemon=True)
    worker.start()
    return future, worker


def _execute(
    drv: Driver,
    q: QuerySpec,
    text: str,
    kind: str,
    index: int,
    timeout: float,
    origin: float,
    clock: Clock,
    abandoned: List[threading.Thread],
) -> Execution:
    started_ms = _ms(clock() - origin)
    future, worker = _start(drv, q, text, clock)
    try:
        _, duration = future.result(timeout=timeout)
    except (FuturesTimeoutError, DriverTimeout):
        logger.warning("%s %s run %d exceeded %.3f s", q.id, kind, index, timeout)
        if worker.is_alive():
            abandoned.append(worker)
        return Execution(kind=kind, index=index, started_ms=started_ms, status="timed_out")
    except XWebError as e:
        logger.warning("%s %s run %d failed: %s", q.id, kind, index, e)
        return Execution(kind=kind, index=index, started_ms=started_ms, status="error", error=str(e))
    except Exception as e:  # noqa: BLE001
        logger.warning("%s %s run %d failed unexpectedly: %r", q.id, kind, index, e)
        return Execution(kind=kind, index=index, started_ms=started_ms, status="error", error=repr(e))
    logger.debug("%s %s run %d: %.3f ms", q.id, kind, index, duration)
    return Execution(kind=kind, index=index, started_ms=started_ms, duration_ms=duration)


def performance_test(
    drv: Driver,
    wc: WorkloadConfig,
    m: WarehouseModel,
    environment: Optional[Dict[str, Any]] = None,
    fact_count: Optional[int] = None,
    clock: Clock = time.perf_counter,
) -> RunReport:
    """
    Run the enabled workload blocks: one cold run and wc.nrun warm runs per query.

    Driver faults and timeouts are recorded on the query and the run goes on.

    Args:
        drv: Backend, already loaded
        wc: Blocks, warm-run count and per-query timeout (seconds)
        m: Warehouse model the queries are rendered against
        environment: Parameters echoed into the report
        fact_count: Size of the loaded warehouse, echoed into the report

    Returns:
        RunReport with raw executions and computed statistics (no load section)
    """
    report = RunReport(
        driver=drv.name,
        environment=dict(environment or {}, workload=wc.model_dump()),
        fact_count=fact_count,
    )
    origin = clock()
    abandoned: List[threading.Thread] = []
    drv.set_query_timeout(wc.timeout)
    for q in build_workload(wc):
        record = QueryRecord(query_id=q.id, block=q.block)
        report.queries.append(record)
        try:
            text = render_xquery(q, m)
        except XWebError as e:
            logger.warning("%s cannot be rendered: %s", q.id, e)
            record.executions.append(Execution(kind="cold", index=0, started_ms=_ms(clock() - origin),
                                               status="error", error=str(e)))
            continue
        runs = [("cold", 0)] + [("warm", i) for i in range(1, wc.nrun + 1)]
        for kind, index in runs:
            execution = _execute(drv, q, text, kind, index, wc.timeout, origin, clock, abandoned)
            record.executions.append(execution)
            if execution.status == "timed_out":
                break
    still_running = sum(1 for worker in abandoned if worker.is_alive())
    if still_running:
        logger.warning("%d timed-out calls were still running when the performance test ended", still_running)
    finalize_stats(report)
    logger.info(
        "performance test: %d queries, %d timed executions",
        len(report.queries), len(report.durations()),
    )
    return report
