"""
End-to-end warehouse generation: dimension documents first, then the fact
document, streamed straight to disk.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

from xwebbench.codec.emit import FactWriter, write_dimensions
from xwebbench.datagen.dimensions import generate_dimensions
from xwebbench.datagen.facts import Fact, GenerationStats, fact_stream, generate_facts
from xwebbench.datagen.params import GenParams
from xwebbench.datagen.sampling import stream
from xwebbench.datagen.taxonomy import CategoryTaxonomy, assign_categories, build_category_taxonomy
from xwebbench.errors import ParameterError
from xwebbench.model import WarehouseModel, build_default_model
from xwebbench.warehouse import Warehouse, build_warehouse

logger = logging.getLogger(__name__)


@dataclass
class GeneratedWarehouse:
    """What write_warehouse put on disk."""
    directory: Path
    paths: Dict[str, Path]
    dimension_counts: Dict[str, int]
    stats: List[GenerationStats] = field(default_factory=list)

    @property
    def fact_count(self) -> int:
        return sum(s.emitted for s in self.stats)


def _prepare(gp: GenParams, taxonomy: Optional[CategoryTaxonomy]):
    tax = taxonomy or build_category_taxonomy()
    dims = generate_dimensions(gp)
    assign = assign_categories(len(dims.parts), tax, stream(gp.seed, "categories"))
    return tax, dims, assign


def generate_warehouse(
    gp: GenParams,
    taxonomy: Optional[CategoryTaxonomy] = None,
    model: Optional[WarehouseModel] = None,
) -> Warehouse:
    """Generate a whole warehouse in memory (small instances and tests)."""
    tax, dims, assign = _prepare(gp, taxonomy)
    facts: List[Fact] = []
    generate_facts(dims, assign, gp, fact_stream(gp.seed), facts.append)
    return build_warehouse(model or build_default_model(), dims, assign, tax, facts)


def write_warehouse(
    gp: GenParams,
    directory: Union[str, Path],
    taxonomy: Optional[CategoryTaxonomy] = None,
    partitions: int = 1,
) -> GeneratedWarehouse:
    """
    Generate the six warehouse documents into `directory`.

    The fact document is written while facts are generated, one customer
    partition after the other, so memory stays bounded by the dimensions.
    """
    if partitions < 1:
        raise ParameterError(f"partitions must be at least 1, got {partitions}")
    model = build_default_model()
    tax, dims, assign = _prepare(gp, taxonomy)
    w = build_warehouse(model, dims, assign, tax)
    paths = write_dimensions(w, directory)

    fact_path = Path(directory) / model.fact.path
    result = GeneratedWarehouse(
        directory=Path(directory),
        paths=paths,
        dimension_counts=dims.cardinalities(),
    )
    with open(fact_path, "wb") as f, FactWriter(f, model.fact.id) as writer:
        for partition in range(partitions):
            rng = fact_stream(gp.seed, partition, partitions)
            result.stats.append(generate_facts(dims, assign, gp, rng, writer, partitions, partition))
    paths[model.fact.path] = fact_path
    logger.info("wrote %d facts to %s", result.fact_count, fact_path)
    return result
