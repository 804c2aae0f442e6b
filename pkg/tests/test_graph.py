from xwebbench.codec.emit import emit_documents
from xwebbench.drivers.reference import ReferenceDriver
from xwebbench.graph import build_benchmark_graph, route_after_performance
from xwebbench.workload.queries import WorkloadConfig


def _state(warehouse, model, **extra):
    state = {
        "driver": ReferenceDriver(),
        "documents": emit_documents(warehouse),
        "workload_config": WorkloadConfig.from_blocks("RE,1D", nrun=1),
        "model": model,
        "environment": {"label": "graph"},
    }
    state.update(extra)
    return state


def test_routing():
    assert route_after_performance({"verify": True}) == "verify_backend"
    assert route_after_performance({}) != "verify_backend"


def test_pipeline_without_verification(small_warehouse, model):
    result = build_benchmark_graph().invoke(_state(small_warehouse, model))
    report = result["run_report"]
    assert report.load == result["load_report"]
    assert len(report.queries) == 7
    assert report.verdicts == {}
    assert report.fact_count == len(small_warehouse.facts)
    assert report.environment["label"] == "graph"
    assert "verdicts" not in result


def test_pipeline_with_verification(small_warehouse, model):
    result = build_benchmark_graph().invoke(_state(small_warehouse, model, verify=True, fact_count=123))
    report = result["run_report"]
    assert report.fact_count == 123
    assert set(report.verdicts) == {"Q01", "Q02", "Q03", "Q04", "Q05", "Q06", "Q07"}
    assert {v.status for v in result["verdicts"].values()} == {"match"}
    assert result["taxonomy"] is not None


def test_reload_starts_from_scratch(small_warehouse, dirty_warehouse, model):
    driver = ReferenceDriver()
    graph = build_benchmark_graph()
    graph.invoke(_state(small_warehouse, model, driver=driver))
    graph.invoke(_state(dirty_warehouse, model, driver=driver))
    assert len(driver.warehouse.facts) == len(dirty_warehouse.facts)
