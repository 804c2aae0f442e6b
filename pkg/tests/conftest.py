import socket
import threading
import time
from decimal import Decimal
from typing import Dict, Iterable, Tuple

import pytest
import uvicorn
from fastapi.testclient import TestClient

from xwebbench.datagen.build import generate_warehouse
from xwebbench.datagen.dimensions import DimensionSet
from xwebbench.datagen.facts import Fact
from xwebbench.datagen.params import GenParams
from xwebbench.datagen.taxonomy import CategoryAssignment, build_category_taxonomy
from xwebbench.main import create_app
from xwebbench.model import build_default_model
from xwebbench.warehouse import Member, ParentRef, Warehouse, build_members

# sf=1 over 10_000: 20 parts, 15 customers, 1 supplier, 2557 days
TINY_DIVISOR = 10_000


def tiny_params(**values) -> GenParams:
    values.setdefault("scale_divisor", TINY_DIVISOR)
    values.setdefault("density", 0.002)
    return GenParams.create(**values)


def member(key, attributes: Dict[str, object], parents: Iterable[Tuple[str, object]] = ()) -> Member:
    return Member(
        key=str(key),
        attributes=tuple(attributes.items()),
        parents=tuple(ParentRef(level, str(ref)) for level, ref in parents),
    )


def hand_warehouse(facts, parts=(), customers=(), nations=(), regions=()) -> Warehouse:
    """Warehouse over the default model and taxonomy with hand-written members."""
    members = build_members(DimensionSet(), CategoryAssignment(), build_category_taxonomy())
    for m in parts:
        members["PartDim"]["Part"][m.key] = m
    for m in customers:
        members["CustomerDim"]["Customer"][m.key] = m
    for m in nations:
        members["CustomerDim"]["C_Nation"][m.key] = m
    for m in regions:
        members["CustomerDim"]["C_Region"][m.key] = m
    return Warehouse(model=build_default_model(), members=members, facts=list(facts))


@pytest.fixture(scope="session")
def taxonomy():
    return build_category_taxonomy()


@pytest.fixture(scope="session")
def model():
    return build_default_model()


@pytest.fixture(scope="session")
def small_warehouse():
    return generate_warehouse(tiny_params(seed=42))


@pytest.fixture(scope="session")
def dirty_warehouse():
    return generate_warehouse(tiny_params(seed=7, p_missing=0.3, p_reorder=0.5))


@pytest.fixture
def france_warehouse():
    """Three sales by three customers; only customer 1 is French."""
    nations = [
        member(6, {"n_nationkey": 6, "n_name": "FRANCE"}, [("C_Region", 3)]),
        member(7, {"n_nationkey": 7, "n_name": "GERMANY"}, [("C_Region", 3)]),
        member(2, {"n_nationkey": 2, "n_name": "BRAZIL"}, [("C_Region", 1)]),
    ]
    regions = [
        member(3, {"r_regionkey": 3, "r_name": "EUROPE"}),
        member(1, {"r_regionkey": 1, "r_name": "AMERICA"}),
    ]
    customers = [
        member(1, {"c_custkey": 1, "c_name": "Customer#000000001"}, [("C_Nation", 6)]),
        member(2, {"c_custkey": 2, "c_name": "Customer#000000002"}, [("C_Nation", 7)]),
        member(3, {"c_custkey": 3, "c_name": "Customer#000000003"}, [("C_Nation", 2)]),
    ]
    facts = [
        Fact(c_custkey=1, f_quantity=3, f_totalamount=Decimal("2703.00")),
        Fact(c_custkey=2, f_quantity=5, f_totalamount=Decimal("4510.00")),
        Fact(c_custkey=3, f_quantity=7, f_totalamount=Decimal("6321.00")),
    ]
    return hand_warehouse(facts, customers=customers, nations=nations, regions=regions)


@pytest.fixture
def brushed_warehouse():
    """Part 1 belongs only to BRUSHED, part 2 to BRASS and PROMO; both are large."""
    parts = [
        member(1, {"p_partkey": 1, "p_name": "azure lime", "p_size": 45}, [("Category", "BRUSHED")]),
        member(2, {"p_partkey": 2, "p_name": "plum snow", "p_size": 48},
               [("Category", "BRASS"), ("Category", "PROMO")]),
        member(3, {"p_partkey": 3, "p_name": "tan wheat", "p_size": 12}, [("Category", "BRUSHED")]),
    ]
    facts = [
        Fact(p_partkey=1, f_quantity=10, f_totalamount=Decimal("9000.00")),
        Fact(p_partkey=1, f_quantity=5, f_totalamount=Decimal("4500.00")),
        Fact(p_partkey=2, f_quantity=2, f_totalamount=Decimal("1802.00")),
        Fact(p_partkey=3, f_quantity=99, f_totalamount=Decimal("89100.00")),
    ]
    return hand_warehouse(facts, parts=parts)


@pytest.fixture
def backend_app():
    return create_app()


@pytest.fixture
def backend_client(backend_app):
    with TestClient(backend_app) as client:
        yield client


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture
def serve():
    """Start a FastAPI app on a local port; yields a function app -> base URL."""
    servers = []

    def start(app) -> str:
        port = _free_port()
        server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning"))
        thread = threading.Thread(target=server.run, daemon=True)
        thread.start()
        deadline = time.monotonic() + 10
        while not server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("backend did not start")
            time.sleep(0.01)
        servers.append((server, thread))
        return f"http://127.0.0.1:{port}"

    yield start
    for server, thread in servers:
        server.should_exit = True
        thread.join(timeout=10)
