from typing import Dict, List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict


class LevelDef(BaseModel):
    """
    One hierarchy level of a dimension.

    rollup lists the coarser levels this level aggregates into, drilldown the
    finer ones. The Category level references itself in both lists, which is
    how the category-to-category rollup of the complex hierarchy is encoded.
    attributes names the member attributes carried by instances of the level.
    """
    model_config = ConfigDict(frozen=True)

    id: str
    rollup: Tuple[str, ...] = ()
    drilldown: Tuple[str, ...] = ()
    attributes: Tuple[str, ...] = ()


class DimensionDef(BaseModel):
    """A dimension document and its levels, finest first."""
    model_config = ConfigDict(frozen=True)

    id: str
    path: str
    levels: Tuple[LevelDef, ...]

    @property
    def finest(self) -> LevelDef:
        return self.levels[0]

    def level(self, level_id: str) -> Optional[LevelDef]:
        for level in self.levels:
            if level.id == level_id:
                return level
        return None


class MeasureDef(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    attribute: str


class DimRef(BaseModel):
    model_config = ConfigDict(frozen=True)

    dimension: str
    attribute: str


class FactDef(BaseModel):
    """
    The fact document: its measures and one reference per dimension.

    Measures are named after the logical schema (Quantity, TotalAmount) and
    map to the element names used in the fact document (f_quantity, ...).
    """
    model_config = ConfigDict(frozen=True)

    id: str
    path: str
    measures: Tuple[MeasureDef, ...]
    dimrefs: Tuple[DimRef, ...]

    @property
    def measure_attributes(self) -> Tuple[str, ...]:
        return tuple(m.attribute for m in self.measures)


class WarehouseModel(BaseModel):
    """In-memory twin of dw-model.xml."""
    model_config = ConfigDict(frozen=True)

    fact: FactDef
    dimensions: Tuple[DimensionDef, ...]

    def dimension(self, dimension_id: str) -> Optional[DimensionDef]:
        for dimension in self.dimensions:
            if dimension.id == dimension_id:
                return dimension
        return None

    def dimref(self, dimension_id: str) -> Optional[DimRef]:
        for ref in self.fact.dimrefs:
            if ref.dimension == dimension_id:
                return ref
        return None

    @property
    def document_names(self) -> List[str]:
        """Document names in load order: model, dimensions, facts."""
        return [MODEL_DOCUMENT] + [d.path for d in self.dimensions] + [self.fact.path]


class AttributeBinding(NamedTuple):
    dimension: str
    level: str


MODEL_DOCUMENT = "dw-model.xml"

# Category names are members of the PartDim/Category level.
CATEGORY_ATTRIBUTE = "t_name"

# Dimensions whose attribute names lose ties when several dimensions declare
# the same name (nation and region names bind to the Customer dimension).
_SECONDARY_DIMENSIONS = ("SupplierDim",)


def _level(id: str, rollup: str, drilldown: str, attributes: str) -> LevelDef:
    return LevelDef(
        id=id,
        rollup=tuple(rollup.split()),
        drilldown=tuple(drilldown.split()),
        attributes=tuple(attributes.split()),
    )


def build_default_model() -> WarehouseModel:
    """
    Build the XWeB warehouse schema.

    Sale facts reference the finest level of four dimensions:
    Date (Day -> Month -> Year), PartDim (Part -> Category, with Category
    rolling up to itself), CustomerDim (Customer -> C_Nation -> C_Region)
    and SupplierDim (Supplier -> S_Nation -> S_Region).

    Returns:
        WarehouseModel: a fresh, structurally identical model on every call
    """
    fact = FactDef(
        id="Sale",
        path="f_sale.xml",
        measures=(
            MeasureDef(id="Quantity", attribute="f_quantity"),
            MeasureDef(id="TotalAmount", attribute="f_totalamount"),
        ),
        dimrefs=(
            DimRef(dimension="CustomerDim", attribute="c_custkey"),
            DimRef(dimension="PartDim", attribute="p_partkey"),
            DimRef(dimension="SupplierDim", attribute="s_suppkey"),
            DimRef(dimension="Date", attribute="d_datekey"),
        ),
    )
    dimensions = (
        DimensionDef(id="Date", path="d_date.xml", levels=(
            _level("Day", "Month", "", "d_datekey d_dayname"),
            _level("Month", "Year", "Day", "m_monthkey m_monthname"),
            _level("Year", "", "Month", "y_yearkey"),
        )),
        DimensionDef(id="PartDim", path="d_part.xml", levels=(
            _level("Part", "Category", "", "p_partkey p_name p_brand p_retailprice p_size"),
            _level("Category", "Category", "Part Category", "t_name t_level"),
        )),
        DimensionDef(id="CustomerDim", path="d_customer.xml", levels=(
            _level("Customer", "C_Nation", "", "c_custkey c_name c_acctbal c_mktsegment"),
            _level("C_Nation", "C_Region", "Customer", "n_nationkey n_name"),
            _level("C_Region", "", "C_Nation", "r_regionkey r_name"),
        )),
        DimensionDef(id="SupplierDim", path="d_supplier.xml", levels=(
            _level("Supplier", "S_Nation", "", "s_suppkey s_name s_acctbal"),
            _level("S_Nation", "S_Region", "Supplier", "n_nationkey n_name"),
            _level("S_Region", "", "S_Nation", "r_regionkey r_name"),
        )),
    )
    return WarehouseModel(fact=fact, dimensions=dimensions)


def validate_model(m: WarehouseModel) -> List[str]:
    """
    Check the model invariants.

    Violations are returned, never raised: one message per violation,
    naming the offending dimension, level or reference.

    Args:
        m: The model to check

    Returns:
        List of diagnostic messages, empty when the model is valid
    """
    diagnostics: List[str] = []

    if not m.dimensions:
        diagnostics.append("model declares no dimensions")

    seen_dimensions = set()
    for dimension in m.dimensions:
        if dimension.id in seen_dimensions:
            diagnostics.append(f"duplicate dimension id '{dimension.id}'")
            continue
        seen_dimensions.add(dimension.id)
        diagnostics.extend(_validate_dimension(dimension))

    fact = m.fact
    if not fact.path.endswith(".xml"):
        diagnostics.append(f"fact {fact.id}: path '{fact.path}' does not end in .xml")
    if not fact.measures:
        diagnostics.append(f"fact {fact.id}: no measures declared")

    referenced = set()
    for ref in fact.dimrefs:
        if ref.dimension in referenced:
            diagnostics.append(f"fact {fact.id}: dimension '{ref.dimension}' referenced twice")
            continue
        referenced.add(ref.dimension)
        if ref.dimension not in seen_dimensions:
            diagnostics.append(f"fact {fact.id}: reference to undeclared dimension '{ref.dimension}'")

    return diagnostics


def _validate_dimension(dimension: DimensionDef) -> List[str]:
    diagnostics: List[str] = []
    name = dimension.id

    if not dimension.path.endswith(".xml"):
        diagnostics.append(f"dimension {name}: path '{dimension.path}' does not end in .xml")
    if not dimension.levels:
        diagnostics.append(f"dimension {name}: no levels declared")
        return diagnostics

    levels: Dict[str, LevelDef] = {}
    for level in dimension.levels:
        if not level.id:
            diagnostics.append(f"dimension {name}: level with empty id")
        elif level.id in levels:
            diagnostics.append(f"dimension {name}: duplicate level id '{level.id}'")
        else:
            levels[level.id] = level

    for level in levels.values():
        for target in level.rollup:
            if target not in levels:
                diagnostics.append(f"{name}/{level.id}: rollup target '{target}' is not a level of {name}")
            elif level.id not in levels[target].drilldown:
                diagnostics.append(
                    f"{name}/{level.id}: rolls up to '{target}' but {target} does not drill down to {level.id}"
                )
        for target in level.drilldown:
            if target not in levels:
                diagnostics.append(f"{name}/{level.id}: drilldown target '{target}' is not a level of {name}")
            elif level.id not in levels[target].rollup:
                diagnostics.append(
                    f"{name}/{level.id}: drills down to '{target}' but {target} does not roll up to {level.id}"
                )
    return diagnostics


def model_vocabulary(m: WarehouseModel) -> Dict[str, AttributeBinding]:
    """
    Map every attribute name queries may use to the level that carries it.

    Fact measures bind to the fact itself (dimension and level set to the
    fact id). When several dimensions declare the same attribute name, the
    Supplier dimension yields to the others.
    """
    vocabulary: Dict[str, AttributeBinding] = {}
    ordered = sorted(m.dimensions, key=lambda d: d.id in _SECONDARY_DIMENSIONS)
    for dimension in ordered:
        for level in dimension.levels:
            for attribute in level.attributes:
                vocabulary.setdefault(attribute, AttributeBinding(dimension.id, level.id))
    for measure in m.fact.measures:
        vocabulary[measure.attribute] = AttributeBinding(m.fact.id, m.fact.id)
    return vocabulary


def rollup_path(dimension: DimensionDef, target_level: str) -> List[str]:
    """
    Level ids walked from the finest level up to target_level, inclusive.

    Self-referencing rollups are skipped, so for PartDim the path to
    Category is [Part, Category].
    """
    path = [dimension.finest.id]
    current = dimension.finest
    while current.id != target_level:
        upward = [r for r in current.rollup if r != current.id]
        if not upward:
            raise KeyError(f"{dimension.id}: level '{target_level}' is not reachable from {dimension.finest.id}")
        current = dimension.level(upward[0])
        if current is None:
            raise KeyError(f"{dimension.id}: dangling rollup from {path[-1]}")
        path.append(current.id)
    return path
