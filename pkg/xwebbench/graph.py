import logging
from typing import Any, Dict

from langgraph.graph import END, START, StateGraph

from xwebbench.codec.parse import parse_warehouse
from xwebbench.harness.protocol import load_test, performance_test
from xwebbench.harness.verify import verify_backend
from xwebbench.state import BenchGraphState
from xwebbench.warehouse import taxonomy_from_warehouse

logger = logging.getLogger(__name__)


def load_node(state: BenchGraphState) -> Dict[str, Any]:
    state["driver"].reset()
    return {"load_report": load_test(state["driver"], state["documents"])}


def performance_node(state: BenchGraphState) -> Dict[str, Any]:
    fact_count = state.get("fact_count")
    loaded = getattr(state["driver"], "warehouse", None)
    if fact_count is None and loaded is not None:
        fact_count = len(loaded.facts)
    report = performance_test(
        state["driver"],
        state["workload_config"],
        state["model"],
        environment=state.get("environment"),
        fact_count=fact_count,
    )
    report.load = state["load_report"]
    return {"run_report": report}


def verify_node(state: BenchGraphState) -> Dict[str, Any]:
    warehouse = state.get("warehouse") or getattr(state["driver"], "warehouse", None)
    if warehouse is None:
        warehouse = parse_warehouse(state["documents"])
    taxonomy = state.get("taxonomy") or taxonomy_from_warehouse(warehouse)
    verdicts = verify_backend(state["driver"], warehouse, taxonomy, state["workload_config"])
    report = state["run_report"]
    report.verdicts = verdicts
    return {"warehouse": warehouse, "taxonomy": taxonomy, "verdicts": verdicts, "run_report": report}


def route_after_performance(state: BenchGraphState) -> str:
    return "verify_backend" if state.get("verify") else END


def build_benchmark_graph():
    """
    Build the benchmark pipeline.

    Flow:
    START -> load_test -> performance_test -> verify_backend (only when
    state["verify"] is set) -> END
    """
    workflow = StateGraph(BenchGraphState)

    workflow.add_node("load_test", load_node)
    workflow.add_node("performance_test", performance_node)
    workflow.add_node("verify_backend", verify_node)

    workflow.add_edge(START, "load_test")
    workflow.add_edge("load_test", "performance_test")
    workflow.add_conditional_edges(
        "performance_test",
        route_after_performance,
        {"verify_backend": "verify_backend", END: END},
    )
    workflow.add_edge("verify_backend", END)

    return workflow.compile()


app = build_benchmark_graph()
