from decimal import Decimal
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterable, List, Literal, NamedTuple, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from xwebbench.errors import ParameterError
from xwebbench.model import WarehouseModel, model_vocabulary

Value = Union[int, Decimal, str]
Operator = Literal["=", "!=", "<", "<=", ">", ">="]


class Block(str, Enum):
    """Workload blocks, in execution order."""
    RE = "RE"
    D1 = "1D"
    D2 = "2D"
    D3 = "3D"
    CH = "CH"


class Aggregation(NamedTuple):
    function: Literal["Min", "Max", "Sum", "Avg"]
    measure: str

    @property
    def column(self) -> str:
        return f"{self.function.lower()}_{self.measure}"


class OrderKey(NamedTuple):
    attribute: str
    descending: bool = False


class Comparison(BaseModel):
    """
    attribute <op> value.

    With derived="quarter" the attribute value (a month number) is mapped
    to its quarter before comparing.
    """
    model_config = ConfigDict(frozen=True)

    attribute: str
    op: Operator
    value: Value
    derived: Optional[Literal["quarter"]] = None


class And(BaseModel):
    model_config = ConfigDict(frozen=True)

    terms: Tuple[Comparison, ...]


Predicate = Union[Comparison, And]


def conjuncts(restriction: Optional[Predicate]) -> Tuple[Comparison, ...]:
    if restriction is None:
        return ()
    if isinstance(restriction, And):
        return restriction.terms
    return (restriction,)


class QuerySpec(BaseModel):
    """
    One workload query.

    category_depth applies when grouping by t_name: 0 groups facts by the
    categories of their part, 1 by the supercategories those roll up to.
    """
    model_config = ConfigDict(frozen=True)

    id: str
    block: Block
    description: str = ""
    aggregations: Tuple[Aggregation, ...]
    group_by: Tuple[str, ...] = ()
    restriction: Optional[Predicate] = None
    ordering: Tuple[OrderKey, ...] = ()
    category_depth: int = Field(default=0, ge=0, le=1)

    @property
    def columns(self) -> Tuple[str, ...]:
        return self.group_by + tuple(a.column for a in self.aggregations)

    @property
    def measures(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(a.measure for a in self.aggregations))

    def attributes(self) -> FrozenSet[str]:
        """Dimension and measure attributes the query reads."""
        names = set(self.group_by)
        names.update(term.attribute for term in conjuncts(self.restriction))
        names.update(key.attribute for key in self.ordering)
        names.update(a.measure for a in self.aggregations)
        return frozenset(names)


class WorkloadConfig(BaseModel):
    """
    Execution parameters: which blocks run, how many warm runs follow the
    cold run, and the per-query timeout in seconds.
    """
    model_config = ConfigDict(frozen=True)

    re: bool = True
    d1: bool = True
    d2: bool = True
    d3: bool = True
    ch: bool = True
    nrun: int = Field(default=3, ge=0)
    timeout: float = Field(default=60.0, gt=0)

    @classmethod
    def create(cls, **values: Any) -> "WorkloadConfig":
        try:
            return cls(**values)
        except ValidationError as e:
            raise ParameterError("; ".join(f"{'.'.join(map(str, i['loc']))}: {i['msg']}" for i in e.errors())) from e

    @classmethod
    def from_blocks(cls, blocks: Union[str, Iterable[str]], **values: Any) -> "WorkloadConfig":
        """Build a config enabling exactly the named blocks ("RE,1D" or ["RE", "1D"])."""
        names = blocks.split(",") if isinstance(blocks, str) else list(blocks)
        enabled = set()
        for name in (n.strip().upper() for n in names):
            if not name:
                continue
            try:
                enabled.add(Block(name))
            except ValueError:
                raise ParameterError(f"unknown block {name!r}; expected one of RE, 1D, 2D, 3D, CH") from None
        flags = {field: block in enabled for block, field in _BLOCK_FIELDS.items()}
        return cls.create(**flags, **values)

    def enabled(self, block: Block) -> bool:
        return getattr(self, _BLOCK_FIELDS[block])

    @property
    def enabled_blocks(self) -> List[Block]:
        return [b for b in Block if self.enabled(b)]


_BLOCK_FIELDS: Dict[Block, str] = {
    Block.RE: "re", Block.D1: "d1", Block.D2: "d2", Block.D3: "d3", Block.CH: "ch",
}


def quarter(monthkey: int) -> int:
    if not 1 <= monthkey <= 12:
        raise ParameterError(f"month {monthkey} outside 1..12")
    return (monthkey + 2) // 3


def _aggs(functions: str, *measures: str) -> Tuple[Aggregation, ...]:
    return tuple(Aggregation(f, m) for f in functions.split() for m in measures)


def _asc(*attributes: str) -> Tuple[OrderKey, ...]:
    return tuple(OrderKey(a) for a in attributes)


_Q = "f_quantity"
_T = "f_totalamount"
_BRAND = Comparison(attribute="p_brand", op="=", value="Brand#25")
_FIRST_QUARTER = Comparison(attribute="m_monthkey", op="=", value=1, derived="quarter")
_LARGE_PARTS = Comparison(attribute="p_size", op=">", value=40)
_BRUSHED = Comparison(attribute="t_name", op="=", value="BRUSHED")

WORKLOAD: Tuple[QuerySpec, ...] = (
    QuerySpec(id="Q01", block=Block.RE, description="Min, Max, Sum, Avg of f_quantity and f_totalamount",
              aggregations=_aggs("Min Max Sum Avg", _Q, _T)),
    QuerySpec(id="Q02", block=Block.RE, description="f_quantity for each p_partkey",
              aggregations=_aggs("Sum", _Q), group_by=("p_partkey", "p_retailprice"),
              restriction=Comparison(attribute="p_retailprice", op="<=", value=Decimal("1000")),
              ordering=_asc("p_retailprice")),
    QuerySpec(id="Q03", block=Block.RE, description="Sum of f_totalamount",
              aggregations=_aggs("Sum", _T),
              restriction=Comparison(attribute="n_name", op="=", value="FRANCE")),
    QuerySpec(id="Q04", block=Block.D1, description="Sum of f_quantity per p_partkey",
              aggregations=_aggs("Sum", _Q), group_by=("p_partkey", "p_retailprice"),
              restriction=Comparison(attribute="p_retailprice", op=">", value=Decimal("1500")),
              ordering=(OrderKey("p_retailprice", descending=True),)),
    QuerySpec(id="Q05", block=Block.D1, description="Sum of f_quantity and f_totalamount per m_monthname",
              aggregations=_aggs("Sum", _Q, _T), group_by=("m_monthname",),
              restriction=_FIRST_QUARTER, ordering=_asc("m_monthname")),
    QuerySpec(id="Q06", block=Block.D1, description="Sum of f_quantity and f_totalamount per d_dayname",
              aggregations=_aggs("Sum", _Q, _T), group_by=("d_dayname",),
              restriction=_FIRST_QUARTER, ordering=_asc("d_dayname")),
    QuerySpec(id="Q07", block=Block.D1, description="Avg of f_quantity and f_totalamount per r_name",
              aggregations=_aggs("Avg", _Q, _T), group_by=("r_name",),
              restriction=Comparison(attribute="r_name", op="=", value="AMERICA")),
    QuerySpec(id="Q08", block=Block.D2, description="Sum of f_quantity and f_totalamount per c_name and p_name",
              aggregations=_aggs("Sum", _Q, _T), group_by=("c_name", "p_name"),
              restriction=_BRAND, ordering=_asc("c_name", "p_name")),
    QuerySpec(id="Q09", block=Block.D2, description="Sum of f_quantity and f_totalamount per n_name and p_name",
              aggregations=_aggs("Sum", _Q, _T), group_by=("n_name", "p_name"),
              restriction=_BRAND, ordering=_asc("n_name", "p_name")),
    QuerySpec(id="Q10", block=Block.D2, description="Sum of f_quantity and f_totalamount per r_name and p_name",
              aggregations=_aggs("Sum", _Q, _T), group_by=("r_name", "p_name"),
              restriction=_BRAND, ordering=_asc("r_name", "p_name")),
    QuerySpec(id="Q11", block=Block.D2, description="Max of f_quantity and f_totalamount per s_name and p_name",
              aggregations=_aggs("Max", _Q, _T), group_by=("s_name", "p_name"),
              restriction=Comparison(attribute="s_acctbal", op="<", value=Decimal("0")),
              ordering=_asc("s_name", "p_name")),
    QuerySpec(id="Q12", block=Block.D3,
              description="Sum of f_quantity and f_totalamount per c_name, p_name and y_yearkey",
              aggregations=_aggs("Sum", _Q, _T), group_by=("c_name", "p_name", "y_yearkey"),
              ordering=_asc("c_name", "p_name", "y_yearkey")),
    QuerySpec(id="Q13", block=Block.D3,
              description="Sum of f_quantity and f_totalamount per c_name, p_name and y_yearkey",
              aggregations=_aggs("Sum", _Q, _T), group_by=("c_name", "p_name", "y_yearkey"),
              restriction=And(terms=(
                  Comparison(attribute="y_yearkey", op=">", value=2000),
                  Comparison(attribute="c_acctbal", op=">", value=Decimal("5000")),
              )),
              ordering=_asc("c_name", "p_name", "y_yearkey")),
    QuerySpec(id="Q14", block=Block.D3,
              description="Sum of f_quantity and f_totalamount per c_name, p_name and y_yearkey",
              aggregations=_aggs("Sum", _Q, _T), group_by=("c_name", "p_name", "y_yearkey"),
              restriction=And(terms=(
                  Comparison(attribute="c_mktsegment", op="=", value="AUTOMOBILE"),
                  Comparison(attribute="y_yearkey", op="=", value=2002),
              )),
              ordering=_asc("c_name", "p_name", "y_yearkey")),
    QuerySpec(id="Q15", block=Block.CH, description="Avg of f_quantity and f_totalamount per t_name",
              aggregations=_aggs("Avg", _Q, _T), group_by=("t_name",), ordering=_asc("t_name")),
    QuerySpec(id="Q16", block=Block.CH, description="Avg of f_quantity and f_totalamount per t_name",
              aggregations=_aggs("Avg", _Q, _T), group_by=("t_name",),
              restriction=_BRUSHED, ordering=_asc("t_name")),
    QuerySpec(id="Q17", block=Block.CH, description="Avg of f_quantity and f_totalamount per p_name",
              aggregations=_aggs("Avg", _Q, _T), group_by=("p_name",),
              restriction=_BRUSHED, ordering=_asc("p_name")),
    QuerySpec(id="Q18", block=Block.CH, description="Sum of f_quantity and f_totalamount per p_name",
              aggregations=_aggs("Sum", _Q, _T), group_by=("p_name",),
              restriction=_LARGE_PARTS, ordering=_asc("p_name")),
    QuerySpec(id="Q19", block=Block.CH, description="Sum of f_quantity and f_totalamount per category",
              aggregations=_aggs("Sum", _Q, _T), group_by=("t_name",),
              restriction=_LARGE_PARTS, ordering=_asc("t_name")),
    QuerySpec(id="Q20", block=Block.CH, description="Sum of f_quantity and f_totalamount per supercategory",
              aggregations=_aggs("Sum", _Q, _T), group_by=("t_name",),
              restriction=_LARGE_PARTS, ordering=_asc("t_name"), category_depth=1),
)


def build_workload(wc: WorkloadConfig) -> List[QuerySpec]:
    """Queries of the enabled blocks, in Q01..Q20 order."""
    return [q for q in WORKLOAD if wc.enabled(q.block)]


def query_by_id(query_id: str) -> QuerySpec:
    for q in WORKLOAD:
        if q.id == query_id:
            return q
    raise KeyError(query_id)


def unknown_attributes(q: QuerySpec, m: WarehouseModel) -> List[str]:
    vocabulary = model_vocabulary(m)
    return sorted(a for a in q.attributes() if a not in vocabulary)
