from typing import Any, Dict, Optional, TypedDict

from xwebbench.codec.documents import WarehouseDocuments
from xwebbench.datagen.taxonomy import CategoryTaxonomy
from xwebbench.drivers.base import Driver
from xwebbench.harness.report import LoadReport, RunReport
from xwebbench.harness.verify import Verdict
from xwebbench.model import WarehouseModel
from xwebbench.warehouse import Warehouse
from xwebbench.workload.queries import WorkloadConfig


class BenchGraphState(TypedDict, total=False):
    """
    Shared state of one benchmark run.

    The caller fills the inputs; load_test writes load_report,
    performance_test writes run_report and verify_backend writes verdicts.
    """

    # Inputs
    driver: Driver
    documents: WarehouseDocuments
    workload_config: WorkloadConfig
    model: WarehouseModel
    verify: bool
    environment: Dict[str, Any]
    fact_count: Optional[int]

    # Filled when verification parses the warehouse locally
    warehouse: Optional[Warehouse]
    taxonomy: Optional[CategoryTaxonomy]

    # Outputs
    load_report: LoadReport
    run_report: RunReport
    verdicts: Dict[str, Verdict]
