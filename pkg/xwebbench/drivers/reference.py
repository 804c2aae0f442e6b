import logging
import threading
from typing import Dict, Optional

from xwebbench.codec.documents import WarehouseDocuments
from xwebbench.codec.parse import parse_model, parse_warehouse
from xwebbench.datagen.taxonomy import CategoryTaxonomy
from xwebbench.drivers.base import Driver, QueryOutcome
from xwebbench.engine.evaluate import evaluate
from xwebbench.errors import DocumentParseError, DriverError, TaxonomyError
from xwebbench.model import MODEL_DOCUMENT, WarehouseModel
from xwebbench.warehouse import Warehouse, taxonomy_from_warehouse
from xwebbench.workload.queries import QuerySpec

logger = logging.getLogger(__name__)


class ReferenceDriver(Driver):
    """
    In-process backend answering queries with the reference evaluator.

    Documents are kept as shipped; once the model and every document it
    names have arrived, the warehouse is parsed, so the load of the last
    document (the facts) carries the parsing cost.
    """

    name = "reference"
    comparable_rows = True

    def __init__(self, taxonomy: Optional[CategoryTaxonomy] = None):
        self._fixed_taxonomy = taxonomy
        self._documents: Dict[str, bytes] = {}
        self._model: Optional[WarehouseModel] = None
        self._warehouse: Optional[Warehouse] = None
        self._taxonomy: Optional[CategoryTaxonomy] = None
        self._lock = threading.Lock()

    @property
    def warehouse(self) -> Optional[Warehouse]:
        return self._warehouse

    def load_document(self, name: str, data: bytes) -> None:
        with self._lock:
            try:
                if name == MODEL_DOCUMENT:
                    self._model = parse_model(data)
                elif self._model is None:
                    raise DriverError(f"{name}: load {MODEL_DOCUMENT} first")
                elif name not in self._model.document_names:
                    raise DriverError(f"{name}: not a document of the loaded model")
                self._documents[name] = data
                self._warehouse = None
                if all(n in self._documents for n in self._model.document_names):
                    self._build()
            except DocumentParseError as e:
                raise DriverError(f"{name}: {e}") from e

    def _build(self) -> None:
        docs = WarehouseDocuments(
            model_doc=self._documents[MODEL_DOCUMENT],
            dimension_docs={d.path: self._documents[d.path] for d in self._model.dimensions},
            fact_doc=self._documents[self._model.fact.path],
            fact_name=self._model.fact.path,
        )
        warehouse = parse_warehouse(docs)
        try:
            self._taxonomy = self._fixed_taxonomy or taxonomy_from_warehouse(warehouse)
        except TaxonomyError as e:
            raise DriverError(f"category hierarchy of the loaded warehouse is invalid: {e}") from e
        self._warehouse = warehouse
        logger.debug("reference backend holds %d facts", len(warehouse.facts))

    def execute_query(self, query: QuerySpec, text: str) -> QueryOutcome:
        warehouse, taxonomy = self._warehouse, self._taxonomy
        if warehouse is None:
            raise DriverError(f"{query.id}: no complete warehouse loaded")
        return QueryOutcome(result=evaluate(query, warehouse, taxonomy))

    def reset(self) -> None:
        with self._lock:
            self._documents.clear()
            self._model = None
            self._warehouse = None
            self._taxonomy = None
