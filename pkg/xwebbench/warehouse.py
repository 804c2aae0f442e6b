"""
In-memory warehouse shared by the codec, the query engine and the drivers.

Dimension members are held generically, level by level, exactly as the
dimension documents store them: a key, attribute values, and references to
parent members. Generated data and parsed documents both end up here.
"""
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple, Union

from xwebbench.datagen.dimensions import DimensionSet
from xwebbench.datagen.facts import Fact
from xwebbench.datagen.taxonomy import (
    CATEGORY_LEVELS, DEFAULT_EDGES, CategoryAssignment, CategoryTaxonomy, validate_taxonomy,
)
from xwebbench.model import WarehouseModel

AttributeValue = Union[int, Decimal, str]

INTEGER_ATTRIBUTES = frozenset({
    "d_datekey", "m_monthkey", "y_yearkey", "p_partkey", "p_size", "t_level",
    "c_custkey", "s_suppkey", "n_nationkey", "r_regionkey",
    "f_quantity",
})
MONEY_ATTRIBUTES = frozenset({"p_retailprice", "c_acctbal", "s_acctbal", "f_totalamount"})


def coerce_attribute(name: str, text: str) -> AttributeValue:
    """
    Type an attribute value read from a document.

    Raises:
        ValueError: the text is not a valid value for the attribute
    """
    if name in INTEGER_ATTRIBUTES:
        return int(text)
    if name in MONEY_ATTRIBUTES:
        try:
            value = Decimal(text)
        except InvalidOperation as e:
            raise ValueError(f"{name}: {text!r} is not a decimal") from e
        if not value.is_finite():
            raise ValueError(f"{name}: {text!r} is not finite")
        return value
    return text


def format_attribute(value: AttributeValue) -> str:
    return str(value)


class ParentRef(NamedTuple):
    level: str
    key: str


@dataclass(frozen=True)
class Member:
    key: str
    attributes: Tuple[Tuple[str, AttributeValue], ...]
    parents: Tuple[ParentRef, ...] = ()

    def get(self, name: str) -> Optional[AttributeValue]:
        for attribute, value in self.attributes:
            if attribute == name:
                return value
        return None

    def parent_keys(self, level: str) -> List[str]:
        return [p.key for p in self.parents if p.level == level]


# dimension id -> level id -> member key -> Member
MemberTable = Dict[str, Dict[str, Dict[str, Member]]]


@dataclass
class Warehouse:
    model: WarehouseModel
    members: MemberTable
    facts: List[Fact] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def level_members(self, dimension: str, level: str) -> Dict[str, Member]:
        return self.members.get(dimension, {}).get(level, {})


def _member(key, attributes: Iterable[Tuple[str, AttributeValue]], parents=()) -> Member:
    return Member(key=str(key), attributes=tuple(attributes), parents=tuple(parents))


def build_members(dims: DimensionSet, assign: CategoryAssignment, tax: CategoryTaxonomy) -> MemberTable:
    """
    Lay generated dimension records out level by level, finest first.

    Part members reference one Category member per catset entry; Category
    members reference their rollup parents within the same level.
    """
    date = {
        "Day": {},
        "Month": {},
        "Year": {},
    }
    for day in dims.days.values():
        m = _member(day.datekey, [("d_datekey", day.datekey), ("d_dayname", day.dayname)],
                    [ParentRef("Month", str(day.month))])
        date["Day"][m.key] = m
    for month in dims.months.values():
        m = _member(month.key, [("m_monthkey", month.monthkey), ("m_monthname", month.monthname)],
                    [ParentRef("Year", str(month.yearkey))])
        date["Month"][m.key] = m
    for year in dims.years.values():
        m = _member(year.yearkey, [("y_yearkey", year.yearkey)])
        date["Year"][m.key] = m

    part = {"Part": {}, "Category": {}}
    for p in dims.parts.values():
        m = _member(
            p.partkey,
            [("p_partkey", p.partkey), ("p_name", p.name), ("p_brand", p.brand),
             ("p_retailprice", p.retailprice), ("p_size", p.size)],
            [ParentRef("Category", tag.name) for tag in assign.get(p.partkey, ())],
        )
        part["Part"][m.key] = m
    for level, names in enumerate(tax.levels, start=1):
        for name in names:
            m = _member(name, [("t_name", name), ("t_level", level)],
                        [ParentRef("Category", parent) for parent in tax.parents(name)])
            part["Category"][m.key] = m

    customer = {"Customer": {}, "C_Nation": {}, "C_Region": {}}
    supplier = {"Supplier": {}, "S_Nation": {}, "S_Region": {}}
    for c in dims.customers.values():
        m = _member(c.custkey,
                    [("c_custkey", c.custkey), ("c_name", c.name), ("c_acctbal", c.acctbal),
                     ("c_mktsegment", c.mktsegment)],
                    [ParentRef("C_Nation", str(c.nationkey))])
        customer["Customer"][m.key] = m
    for s in dims.suppliers.values():
        m = _member(s.suppkey, [("s_suppkey", s.suppkey), ("s_name", s.name), ("s_acctbal", s.acctbal)],
                    [ParentRef("S_Nation", str(s.nationkey))])
        supplier["Supplier"][m.key] = m
    for prefix, table in (("C", customer), ("S", supplier)):
        for n in dims.nations.values():
            m = _member(n.nationkey, [("n_nationkey", n.nationkey), ("n_name", n.name)],
                        [ParentRef(f"{prefix}_Region", str(n.regionkey))])
            table[f"{prefix}_Nation"][m.key] = m
        for r in dims.regions.values():
            m = _member(r.regionkey, [("r_regionkey", r.regionkey), ("r_name", r.name)])
            table[f"{prefix}_Region"][m.key] = m

    return {"Date": date, "PartDim": part, "CustomerDim": customer, "SupplierDim": supplier}


def build_warehouse(
    model: WarehouseModel,
    dims: DimensionSet,
    assign: CategoryAssignment,
    tax: CategoryTaxonomy,
    facts: Iterable[Fact] = (),
) -> Warehouse:
    return Warehouse(model=model, members=build_members(dims, assign, tax), facts=list(facts))


def taxonomy_from_warehouse(w: Warehouse) -> CategoryTaxonomy:
    """
    Recover the category taxonomy from the Category level of PartDim.

    Raises:
        TaxonomyError: the stored hierarchy violates a taxonomy invariant
    """
    categories = w.level_members("PartDim", "Category")
    if not categories:
        return validate_taxonomy(CATEGORY_LEVELS, DEFAULT_EDGES)
    by_level: Dict[int, List[str]] = {}
    edges = []
    for member in categories.values():
        level = member.get("t_level")
        by_level.setdefault(int(level) if level is not None else 0, []).append(member.key)
        edges.extend((member.key, parent) for parent in member.parent_keys("Category"))
    levels = []
    for level in sorted(by_level):
        if level < 1:
            continue
        # keep cat-table order when the names match it
        known = CATEGORY_LEVELS[level - 1] if level <= len(CATEGORY_LEVELS) else ()
        names = by_level[level]
        levels.append(tuple(n for n in known if n in names) + tuple(sorted(n for n in names if n not in known)))
    return validate_taxonomy(tuple(levels), edges)
