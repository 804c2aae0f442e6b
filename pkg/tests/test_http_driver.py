import time

import pytest
from fastapi import FastAPI, Request

from xwebbench.codec.emit import emit_documents
from xwebbench.drivers.http import HttpDriver, HttpDriverConfig
from xwebbench.errors import DriverError, DriverTimeout, ParameterError
from xwebbench.harness.protocol import load_test, performance_test
from xwebbench.harness.verify import verify_backend
from xwebbench.main import create_app
from xwebbench.workload.queries import WorkloadConfig, query_by_id


def test_latency_shows_in_durations(serve, small_warehouse, model):
    base_url = serve(create_app(latency=0.05))
    with HttpDriver(HttpDriverConfig.create(base_url=base_url, comparable_rows=True)) as drv:
        drv.reset()
        load = load_test(drv, emit_documents(small_warehouse))
        assert len(load.documents) == 6
        report = performance_test(drv, WorkloadConfig.from_blocks("RE", nrun=1), model)
    assert report.driver == "http"
    assert len(report.durations()) == 6
    assert min(report.durations()) >= 50.0


def test_wrong_answer_is_caught(serve, small_warehouse, taxonomy):
    base_url = serve(create_app(faulty=["Q02"]))
    with HttpDriver(HttpDriverConfig.create(base_url=base_url, comparable_rows=True)) as drv:
        load_test(drv, emit_documents(small_warehouse))
        verdicts = verify_backend(drv, small_warehouse, taxonomy, WorkloadConfig.from_blocks("RE"))
    assert verdicts["Q01"].status == "match"
    assert verdicts["Q02"].status == "mismatch"
    assert verdicts["Q03"].status == "match"


def test_opaque_answers_are_kept_as_payload(serve, small_warehouse):
    base_url = serve(create_app(comparable=False))
    with HttpDriver(HttpDriverConfig.create(base_url=base_url)) as drv:
        load_test(drv, emit_documents(small_warehouse))
        outcome = drv.execute_query(query_by_id("Q01"), "")
    assert outcome.result is None
    assert outcome.payload.startswith("min_f_quantity,")


def test_auth_header_and_custom_paths(serve):
    seen = {}
    app = FastAPI()

    @app.post("/db/{name}")
    async def store(name: str, request: Request):
        seen["authorization"] = request.headers.get("authorization")
        seen["content_type"] = request.headers.get("content-type")
        seen["body"] = await request.body()
        return {}

    base_url = serve(app)
    config = HttpDriverConfig.create(
        base_url=base_url + "/", load_method="post", load_path="/db/{name}", auth_header="Authorization: Basic eHdlYg==",
    )
    with HttpDriver(config) as drv:
        drv.load_document("d_date.xml", b"<dimension/>")
    assert seen == {
        "authorization": "Basic eHdlYg==", "content_type": "application/xml", "body": b"<dimension/>",
    }


def test_http_errors_become_driver_errors(serve):
    base_url = serve(create_app())
    with HttpDriver(HttpDriverConfig.create(base_url=base_url)) as drv:
        with pytest.raises(DriverError, match="HTTP 400"):
            drv.load_document("f_sale.xml", b"<facts/>")


def test_unreachable_backend():
    drv = HttpDriver(HttpDriverConfig.create(base_url="http://127.0.0.1:9", request_timeout=1))
    with pytest.raises(DriverError):
        drv.load_document("dw-model.xml", b"<xweb-dw-model/>")


def test_config_file(tmp_path):
    path = tmp_path / "basex.env"
    path.write_text(
        "BASE_URL=http://localhost:8984/rest\n"
        "LOAD_PATH=/xweb/{name}\n"
        "QUERY_METHOD=get\n"
        "COMPARABLE_ROWS=true\n"
        "REQUEST_TIMEOUT=5\n"
    )
    config = HttpDriverConfig.from_file(path)
    assert config.base_url == "http://localhost:8984/rest"
    assert config.load_path == "/xweb/{name}"
    assert config.query_method == "GET"
    assert config.comparable_rows is True
    assert config.request_timeout == 5.0
    assert config.headers() == {}


@pytest.mark.parametrize("values", [
    {"base_url": "localhost:8984"},
    {"base_url": "http://h", "load_path": "/documents"},
    {"base_url": "http://h", "query_method": "DELETE"},
    {"base_url": "http://h", "auth_header": "token"},
])
def test_invalid_config(values):
    with pytest.raises(ParameterError):
        HttpDriverConfig.create(**values)


def test_missing_config_file(tmp_path):
    with pytest.raises(ParameterError, match="not found"):
        HttpDriverConfig.from_file(tmp_path / "absent.env")


def test_query_request_is_cut_at_the_workload_timeout(serve, small_warehouse, model):
    base_url = serve(create_app(latency=3.0))
    with HttpDriver(HttpDriverConfig.create(base_url=base_url, comparable_rows=True)) as drv:
        load_test(drv, emit_documents(small_warehouse))
        started = time.monotonic()
        report = performance_test(drv, WorkloadConfig.from_blocks("RE", nrun=2, timeout=0.2), model)
        elapsed = time.monotonic() - started
    assert [q.status for q in report.queries] == ["timed_out"] * 3
    assert all(len(q.executions) == 1 for q in report.queries)
    assert elapsed < 2.0


def test_driver_timeout_is_typed(serve, small_warehouse):
    base_url = serve(create_app(latency=1.0))
    with HttpDriver(HttpDriverConfig.create(base_url=base_url)) as drv:
        load_test(drv, emit_documents(small_warehouse))
        drv.set_query_timeout(0.1)
        with pytest.raises(DriverTimeout, match="no answer within 0.1 s"):
            drv.execute_query(query_by_id("Q01"), "")
