import threading
import time

import pytest

from xwebbench.codec.emit import emit_documents, emit_facts
from xwebbench.drivers.base import Driver, QueryOutcome
from xwebbench.drivers.reference import ReferenceDriver
from xwebbench.errors import DriverError
from xwebbench.harness.protocol import load_test, performance_test
from xwebbench.harness.report import stats_consistent
from xwebbench.workload.queries import WorkloadConfig


class StepClock:
    """Advances one millisecond per reading."""

    def __init__(self):
        self.now = 0.0
        self._lock = threading.Lock()

    def __call__(self) -> float:
        with self._lock:
            self.now += 0.001
            return self.now


class SlowDriver(Driver):
    name = "slow"

    def __init__(self, delay: float):
        self.delay = delay
        self.calls = []

    def load_document(self, name, data):
        pass

    def execute_query(self, query, text):
        self.calls.append(query.id)
        time.sleep(self.delay)
        return QueryOutcome(payload="done")


class FailingDriver(Driver):
    name = "failing"

    def __init__(self, fail_on: str):
        self.fail_on = fail_on

    def load_document(self, name, data):
        if name == self.fail_on:
            raise DriverError("disk quota exceeded")

    def execute_query(self, query, text):
        if query.id == "Q02":
            raise DriverError("syntax error")
        return QueryOutcome(payload="")


@pytest.fixture
def loaded_reference(small_warehouse):
    drv = ReferenceDriver()
    report = load_test(drv, emit_documents(small_warehouse), clock=StepClock())
    return drv, report


def test_load_ships_documents_in_order(loaded_reference, model):
    drv, report = loaded_reference
    assert [d.name for d in report.documents] == model.document_names
    assert all(d.duration_ms == pytest.approx(1.0) for d in report.documents)
    assert report.total_ms == pytest.approx(6.0)
    assert drv.warehouse is not None


def test_full_workload_timings(loaded_reference, model):
    drv, _ = loaded_reference
    report = performance_test(drv, WorkloadConfig.create(nrun=3), model, environment={"sf": 1}, fact_count=42)
    assert len(report.queries) == 20
    assert len(report.durations()) == 80
    assert stats_consistent(report)
    assert report.overall.count == 80
    assert report.block_stats["CH"].count == 24
    assert report.environment["sf"] == 1
    assert report.environment["workload"]["nrun"] == 3
    assert report.fact_count == 42
    for record in report.queries:
        kinds = [(e.kind, e.index) for e in record.executions]
        assert kinds == [("cold", 0), ("warm", 1), ("warm", 2), ("warm", 3)]
        starts = [e.started_ms for e in record.executions]
        assert starts == sorted(starts)


def test_no_warm_runs(loaded_reference, model):
    drv, _ = loaded_reference
    report = performance_test(drv, WorkloadConfig.from_blocks("RE", nrun=0), model)
    assert [len(q.executions) for q in report.queries] == [1, 1, 1]
    assert all(e.kind == "cold" for q in report.queries for e in q.executions)


def test_timeout_skips_warm_runs(model):
    drv = SlowDriver(delay=0.3)
    report = performance_test(drv, WorkloadConfig.from_blocks("RE", nrun=2, timeout=0.05), model)
    for record in report.queries:
        assert record.status == "timed_out"
        assert [e.status for e in record.executions] == ["timed_out"]
        assert record.stats is None
    assert drv.calls == ["Q01", "Q02", "Q03"]
    assert report.overall is None


def test_driver_errors_are_recorded(model):
    report = performance_test(FailingDriver(fail_on=""), WorkloadConfig.from_blocks("RE", nrun=1), model)
    q02 = report.record("Q02")
    assert q02.status == "error"
    assert all(e.error and "syntax error" in e.error for e in q02.executions)
    assert report.record("Q01").status == "ok"
    assert report.overall.count == 4


def test_load_failure_carries_partial_report(small_warehouse):
    with pytest.raises(DriverError) as excinfo:
        load_test(FailingDriver(fail_on="d_part.xml"), emit_documents(small_warehouse))
    partial = excinfo.value.partial
    assert [d.name for d in partial.documents] == ["dw-model.xml", "d_date.xml"]
    assert "d_part.xml" in str(excinfo.value)


class HangingDriver(Driver):
    name = "hanging"

    def load_document(self, name, data):
        pass

    def execute_query(self, query, text):
        time.sleep(2.0)
        return QueryOutcome(payload="late")


class ThroughputDriver(Driver):
    """Acknowledges a document after a delay proportional to its size."""

    name = "throughput"

    def __init__(self, bytes_per_second: float):
        self.bytes_per_second = bytes_per_second

    def load_document(self, name, data):
        time.sleep(len(data) / self.bytes_per_second)

    def execute_query(self, query, text):
        return QueryOutcome(payload="")


def test_timeout_bounds_wall_time(model):
    started = time.monotonic()
    report = performance_test(HangingDriver(), WorkloadConfig.from_blocks("RE", nrun=0, timeout=0.05), model)
    elapsed = time.monotonic() - started
    assert [q.status for q in report.queries] == ["timed_out"] * 3
    assert elapsed < 1.0


def test_timeout_passed_to_driver(model):
    drv = SlowDriver(delay=0)
    performance_test(drv, WorkloadConfig.from_blocks("RE", nrun=0, timeout=7.5), model)
    assert drv.query_timeout == 7.5


def test_fact_load_time_grows_with_fact_count(small_warehouse):
    docs = emit_documents(small_warehouse)
    doubled = emit_documents(small_warehouse)
    doubled.fact_doc = emit_facts(list(small_warehouse.facts) * 2)
    drv = ThroughputDriver(bytes_per_second=2_000_000)
    single = {d.name: d.duration_ms for d in load_test(drv, docs).documents}
    double = {d.name: d.duration_ms for d in load_test(drv, doubled).documents}
    assert double["f_sale.xml"] > single["f_sale.xml"]
