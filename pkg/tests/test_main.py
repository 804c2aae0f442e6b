from decimal import Decimal

from fastapi.testclient import TestClient

from xwebbench.codec.emit import emit_documents
from xwebbench.engine.evaluate import evaluate
from xwebbench.engine.results import QueryResult, canonical_rows, result_from_csv
from xwebbench.main import app_from_environment, create_app, perturb
from xwebbench.workload.queries import query_by_id


def _load(client, warehouse, multipart=False):
    for name, data in emit_documents(warehouse).iter_documents():
        if multipart:
            response = client.put(f"/documents/{name}", files={"file": (name, data, "application/xml")})
        else:
            response = client.put(f"/documents/{name}", content=data)
        assert response.status_code == 200
        assert response.json() == {"name": name, "size": len(data)}


def test_root_and_health(backend_client):
    assert backend_client.get("/").json()["name"] == "XWeB reference backend"
    assert backend_client.get("/health").json() == {"status": "healthy", "warehouse_loaded": False}


def test_raw_upload_then_query(backend_client, small_warehouse, taxonomy):
    _load(backend_client, small_warehouse)
    assert backend_client.get("/health").json()["warehouse_loaded"] is True
    response = backend_client.post("/queries/Q19", content=b"ignored")
    assert response.status_code == 200
    got = QueryResult.from_payload(response.json())
    expected = evaluate(query_by_id("Q19"), small_warehouse, taxonomy)
    assert canonical_rows(got.rows) == canonical_rows(expected.rows)


def test_multipart_upload(backend_client, small_warehouse):
    _load(backend_client, small_warehouse, multipart=True)
    assert backend_client.get("/health").json()["warehouse_loaded"] is True


def test_query_before_load_conflicts(backend_client):
    assert backend_client.post("/queries/Q01").status_code == 409


def test_unknown_query(backend_client):
    assert backend_client.post("/queries/Q42").status_code == 404


def test_document_before_model_is_rejected(backend_client):
    response = backend_client.put("/documents/f_sale.xml", content=b"<facts/>")
    assert response.status_code == 400
    assert "dw-model.xml" in response.json()["detail"]


def test_malformed_model_is_rejected(backend_client):
    assert backend_client.put("/documents/dw-model.xml", content=b"<xweb-dw-model>").status_code == 400


def test_reset(backend_client, small_warehouse):
    _load(backend_client, small_warehouse)
    assert backend_client.post("/reset").json() == {"status": "empty"}
    assert backend_client.get("/health").json()["warehouse_loaded"] is False


def test_faulty_query_and_csv_answers(small_warehouse, taxonomy):
    with TestClient(create_app(faulty=["Q01"], comparable=False)) as client:
        _load(client, small_warehouse)
        response = client.post("/queries/Q01")
        assert response.headers["content-type"].startswith("text/csv")
        got = result_from_csv(response.text)
    (expected,) = evaluate(query_by_id("Q01"), small_warehouse, taxonomy).rows
    assert Decimal(got.rows[0][0]) == expected[0] + 1


def test_perturb_empty_result():
    q = query_by_id("Q04")
    result = perturb(QueryResult(q.columns, []), len(q.group_by))
    assert result.rows == [("0", "0", "0")]


def test_app_from_environment():
    app = app_from_environment({
        "XWEB_MOCK_LATENCY": "0.25", "XWEB_MOCK_FAULTS": "Q01, Q20", "XWEB_MOCK_COMPARABLE": "no",
    })
    assert app.state.latency == 0.25
    assert app.state.faulty == {"Q01", "Q20"}
    assert app.state.comparable is False
