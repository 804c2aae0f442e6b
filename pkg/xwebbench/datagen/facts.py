import logging
import random
from dataclasses import dataclass
from decimal import Decimal
from typing import Callable, Dict, Optional, Tuple, Union

from xwebbench.datagen.dimensions import DimensionSet
from xwebbench.datagen.params import GenParams
from xwebbench.datagen.sampling import derive_seed, geometric_gap, skewed_random
from xwebbench.datagen.taxonomy import CategoryAssignment
from xwebbench.errors import ParameterError, SinkError

logger = logging.getLogger(__name__)

# Canonical slot order of a fact: four dimension references, then measures
SLOT_NAMES: Tuple[str, ...] = (
    "c_custkey", "p_partkey", "s_suppkey", "d_datekey", "f_quantity", "f_totalamount",
)
IDENTITY_ORDER: Tuple[int, ...] = (1, 2, 3, 4, 5, 6)

QUANTITY_MIN = 1
QUANTITY_MAX = 10_000

PROGRESS_EVERY = 100_000

SlotValue = Optional[Union[int, Decimal]]


@dataclass
class Fact:
    """
    One sale.

    Every slot may be missing (None). slot_order is a permutation of the
    1-based canonical slot positions giving the element order on output.
    """
    c_custkey: Optional[int] = None
    p_partkey: Optional[int] = None
    s_suppkey: Optional[int] = None
    d_datekey: Optional[int] = None
    f_quantity: Optional[int] = None
    f_totalamount: Optional[Decimal] = None
    slot_order: Tuple[int, ...] = IDENTITY_ORDER

    def values(self) -> Tuple[SlotValue, ...]:
        return tuple(getattr(self, name) for name in SLOT_NAMES)

    def ordered_slots(self):
        """(name, value) pairs of present slots in output order."""
        for position in self.slot_order:
            name = SLOT_NAMES[position - 1]
            value = getattr(self, name)
            if value is not None:
                yield name, value

    @property
    def missing_count(self) -> int:
        return sum(1 for v in self.values() if v is None)

    @property
    def reordered(self) -> bool:
        return self.slot_order != IDENTITY_ORDER


@dataclass
class GenerationStats:
    candidates: int = 0
    emitted: int = 0
    nulled_slots: int = 0
    reordered: int = 0
    partition: int = 0
    partitions: int = 1

    def as_dict(self) -> Dict[str, int]:
        return {
            "candidates": self.candidates,
            "emitted": self.emitted,
            "nulled_slots": self.nulled_slots,
            "reordered": self.reordered,
        }


def fact_stream(seed: int, partition: int = 0, partitions: int = 1) -> random.Random:
    """Generator driving the fact pass (or one partition of it)."""
    label = "facts" if partitions == 1 else f"facts/{partitions}/{partition}"
    return random.Random(derive_seed(seed, label))


def generate_facts(
    dims: DimensionSet,
    assign: CategoryAssignment,
    gp: GenParams,
    rng: random.Random,
    sink: Callable[[Fact], None],
    partitions: int = 1,
    partition: int = 0,
) -> GenerationStats:
    """
    Generate the fact stream.

    Candidates are the customer x part x supplier x day combinations, visited
    in that nesting order. Each one is retained with probability
    gp.density; instead of a Bernoulli draw per candidate, the pass jumps
    straight to the next retained candidate with a geometric gap, which
    keeps the fact count Binomial(N, density).

    For every retained candidate: Quantity is skewed over [1, 10000],
    TotalAmount = Quantity * p_retailprice, each of the six slots is nulled
    with probability p_missing, and with probability p_reorder the slot order
    is replaced by a uniform random permutation.

    Args:
        dims: Dimension members
        assign: Category assignment; must cover every part key
        gp: Generation parameters
        rng: Seeded generator (see fact_stream)
        sink: Called once per fact, serially
        partitions: Number of outer-loop partitions
        partition: Index of the customer partition generated by this call

    Returns:
        GenerationStats describing what was handed to the sink

    Raises:
        SinkError: the sink raised; carries the number of facts emitted so far
    """
    if not 0 <= partition < partitions:
        raise ParameterError(f"partition {partition} outside 0..{partitions - 1}")
    missing_parts = [key for key in dims.parts if key not in assign]
    if missing_parts:
        raise ParameterError(f"category assignment does not cover part {missing_parts[0]}")

    customers = [dims.customers[k] for k in sorted(dims.customers)][partition::partitions]
    parts = [dims.parts[k] for k in sorted(dims.parts)]
    suppliers = [dims.suppliers[k] for k in sorted(dims.suppliers)]
    days = [dims.days[k] for k in sorted(dims.days)]

    n_days = len(days)
    n_sup_days = len(suppliers) * n_days
    n_part_sup_days = len(parts) * n_sup_days
    total = len(customers) * n_part_sup_days

    stats = GenerationStats(candidates=total, partition=partition, partitions=partitions)
    index = geometric_gap(rng, gp.density)
    while index < total:
        c, rest = divmod(index, n_part_sup_days)
        p, rest = divmod(rest, n_sup_days)
        s, d = divmod(rest, n_days)
        fact = _make_fact(rng, gp, customers[c].custkey, parts[p], suppliers[s].suppkey, days[d].datekey, stats)
        try:
            sink(fact)
        except Exception as e:
            raise SinkError(f"fact sink failed: {e}", emitted=stats.emitted) from e
        stats.emitted += 1
        if stats.emitted % PROGRESS_EVERY == 0:
            logger.debug("emitted %d facts (candidate %d of %d)", stats.emitted, index, total)
        index += 1 + geometric_gap(rng, gp.density)

    logger.info(
        "generated %d facts from %d candidates (%d slots nulled, %d facts reordered)",
        stats.emitted, stats.candidates, stats.nulled_slots, stats.reordered,
    )
    return stats


def _make_fact(rng: random.Random, gp: GenParams, custkey: int, part, suppkey: int, datekey: int,
               stats: GenerationStats) -> Fact:
    quantity = skewed_random(rng, QUANTITY_MIN, QUANTITY_MAX, gp.hot_fraction, gp.hot_width)
    val = [custkey, part.partkey, suppkey, datekey, quantity, quantity * part.retailprice]

    for i in range(len(val)):
        if rng.random() < gp.p_missing:
            val[i] = None
            stats.nulled_slots += 1

    order = IDENTITY_ORDER
    if rng.random() < gp.p_reorder:
        shuffled = list(IDENTITY_ORDER)
        rng.shuffle(shuffled)
        order = tuple(shuffled)
        stats.reordered += 1

    return Fact(*val, slot_order=order)
