import io
import logging
from fractions import Fraction
from typing import Dict, Mapping, NamedTuple, Tuple

from lxml import etree
from pydantic import BaseModel, ConfigDict

from xwebbench.codec.documents import WarehouseDocuments, read_source
from xwebbench.datagen.dimensions import (
    CUSTOMER_BASE, FIRST_DAY, LAST_DAY, NATIONS, PART_BASE, REGIONS, SUPPLIER_BASE, cardinality,
)
from xwebbench.datagen.params import GenParams
from xwebbench.datagen.taxonomy import CATEGORY_LEVELS
from xwebbench.errors import ParameterError
from xwebbench.model import WarehouseModel
from xwebbench.warehouse import Warehouse

logger = logging.getLogger(__name__)

# Average serialized size of one dimension instance or one fact, in bytes,
# used when nothing has been measured.
DEFAULT_NODESIZE = 220
DEFAULT_FACT_SIZE = 220


class DimensionCardinality(NamedTuple):
    total: int    # instances over all levels
    finest: int   # instances of the finest level


class SizeEstimate(BaseModel):
    """
    Analytic warehouse size in bytes.

    s_dimensions sums, over dimensions, instance count times node size.
    s_facts multiplies the finest-level cardinalities of every dimension by
    the density and the fact size.
    """
    model_config = ConfigDict(frozen=True)

    s_dimensions: float
    s_facts: float
    total: float
    cardinalities: Dict[str, Tuple[int, int]]
    nodesizes: Dict[str, float]
    fact_size: float
    density: float


def estimate_size(
    gp: GenParams,
    cardinalities: Mapping[str, DimensionCardinality],
    nodesizes: Mapping[str, float],
    fact_size: float,
) -> SizeEstimate:
    """
    Estimate the warehouse size before generating it.

    Args:
        gp: Generation parameters; only the density is used
        cardinalities: dimension id -> (all-level instance count, finest-level count)
        nodesizes: dimension id -> average instance size in bytes
        fact_size: average fact element size in bytes

    Raises:
        ParameterError: a cardinality, node size or the fact size is not positive
    """
    if not cardinalities:
        raise ParameterError("estimate_size: no dimensions")
    if fact_size <= 0:
        raise ParameterError(f"estimate_size: fact_size must be positive, got {fact_size}")
    for dimension, card in cardinalities.items():
        size = nodesizes.get(dimension)
        if size is None or size <= 0:
            raise ParameterError(f"estimate_size: no positive node size for {dimension}")
        if card.total <= 0 or card.finest <= 0:
            raise ParameterError(f"estimate_size: non-positive cardinality for {dimension}")

    s_dimensions = sum(Fraction(card.total) * Fraction(nodesizes[d]) for d, card in cardinalities.items())
    product = 1
    for card in cardinalities.values():
        product *= card.finest
    s_facts = product * Fraction(gp.density) * Fraction(fact_size)

    return SizeEstimate(
        s_dimensions=float(s_dimensions),
        s_facts=float(s_facts),
        total=float(s_dimensions + s_facts),
        cardinalities={d: (c.total, c.finest) for d, c in cardinalities.items()},
        nodesizes={d: float(nodesizes[d]) for d in cardinalities},
        fact_size=float(fact_size),
        density=gp.density,
    )


def expected_cardinalities(gp: GenParams) -> Dict[str, DimensionCardinality]:
    """Cardinalities the generator will produce for `gp`, without generating."""
    days = (LAST_DAY - FIRST_DAY).days + 1
    years = LAST_DAY.year - FIRST_DAY.year + 1
    months = years * 12
    categories = sum(len(names) for names in CATEGORY_LEVELS)
    parts = cardinality(gp, PART_BASE, "parts")
    customers = cardinality(gp, CUSTOMER_BASE, "customers")
    suppliers = cardinality(gp, SUPPLIER_BASE, "suppliers")
    geography = len(NATIONS) + len(REGIONS)
    return {
        "Date": DimensionCardinality(days + months + years, days),
        "PartDim": DimensionCardinality(parts + categories, parts),
        "CustomerDim": DimensionCardinality(customers + geography, customers),
        "SupplierDim": DimensionCardinality(suppliers + geography, suppliers),
    }


def cardinalities_of(w: Warehouse) -> Dict[str, DimensionCardinality]:
    result = {}
    for dimension in w.model.dimensions:
        levels = w.members.get(dimension.id, {})
        result[dimension.id] = DimensionCardinality(
            total=sum(len(members) for members in levels.values()),
            finest=len(levels.get(dimension.finest.id, {})),
        )
    return result


def _count_elements(data: bytes, tag: str) -> int:
    count = 0
    for _, element in etree.iterparse(io.BytesIO(data), events=("end",), tag=tag):
        count += 1
        element.clear()
    return count


def measure_nodesizes(docs: WarehouseDocuments, model: WarehouseModel) -> Tuple[Dict[str, float], float]:
    """
    Measure average instance and fact sizes from emitted documents.

    Returns:
        (dimension id -> bytes per instance, bytes per fact); a document
        without instances falls back to the default size
    """
    by_path = {d.path: d.id for d in model.dimensions}
    nodesizes: Dict[str, float] = {}
    for name, source in docs.dimension_docs.items():
        data = read_source(source)
        count = _count_elements(data, "instance")
        nodesizes[by_path.get(name, name)] = len(data) / count if count else float(DEFAULT_NODESIZE)

    data = read_source(docs.fact_doc)
    facts = _count_elements(data, "fact")
    fact_size = len(data) / facts if facts else float(DEFAULT_FACT_SIZE)
    logger.debug("measured node sizes %s, fact size %.1f", nodesizes, fact_size)
    return nodesizes, fact_size
