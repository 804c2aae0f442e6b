"""
Read warehouse documents back into a Warehouse.

Dimension documents are parsed whole; the fact document is streamed with
iterparse so memory stays bounded by the dimensions. Data problems
(unknown elements, values that do not type-check, dangling references) do
not abort the parse: they become warnings on the returned Warehouse. Only
malformed XML raises.
"""
import io
import logging
from typing import Dict, Iterator, List, Optional, Tuple

from lxml import etree

from xwebbench.codec.documents import Source, WarehouseDocuments, read_source, source_name
from xwebbench.datagen.facts import SLOT_NAMES, Fact
from xwebbench.errors import DocumentParseError
from xwebbench.model import DimensionDef, DimRef, FactDef, LevelDef, MeasureDef, WarehouseModel
from xwebbench.warehouse import Member, ParentRef, Warehouse, coerce_attribute

logger = logging.getLogger(__name__)

MODEL_ROOT = "xweb-dw-model"


def _syntax_error(e: etree.XMLSyntaxError, name: str) -> DocumentParseError:
    line, column = e.position if e.position else (0, 0)
    return DocumentParseError(e.msg or str(e), name, line or 0, column or 0)


def _parse_tree(source: Source) -> Tuple[etree._Element, str]:
    name = source_name(source)
    try:
        return etree.fromstring(read_source(source)), name
    except OSError as e:
        raise DocumentParseError(f"cannot read document: {e.strerror or e}", name) from e
    except etree.XMLSyntaxError as e:
        raise _syntax_error(e, name) from e


def parse_model(source: Source) -> WarehouseModel:
    """
    Parse dw-model.xml.

    A <level> found directly under the root is attached to the dimension
    that precedes it, which tolerates documents whose <dimension> element
    was self-closed before its levels.

    Raises:
        DocumentParseError: malformed XML, wrong root element or missing ids
    """
    root, name = _parse_tree(source)
    if root.tag != MODEL_ROOT:
        raise DocumentParseError(f"root element is <{root.tag}>, expected <{MODEL_ROOT}>", name, root.sourceline or 0)

    fact_def: Optional[FactDef] = None
    dimensions: List[dict] = []
    for node in root:
        if not isinstance(node.tag, str):
            continue
        if node.tag == "fact":
            fact_def = _parse_fact_def(node, name)
        elif node.tag == "dimension":
            dimensions.append({"id": _required(node, "id", name), "path": _required(node, "path", name),
                               "levels": [], "attributes": {}})
            _collect_levels(node, dimensions[-1], name)
        elif node.tag in ("level", "attribute") and dimensions:
            _collect_level_node(node, dimensions[-1], name)
        else:
            logger.debug("%s: ignoring <%s> at line %s", name, node.tag, node.sourceline)

    if fact_def is None:
        raise DocumentParseError("no <fact> element", name, root.sourceline or 0)

    return WarehouseModel(
        fact=fact_def,
        dimensions=tuple(
            DimensionDef(
                id=d["id"],
                path=d["path"],
                levels=tuple(
                    LevelDef(id=lid, rollup=rollup, drilldown=drilldown,
                             attributes=tuple(d["attributes"].get(lid, ())))
                    for lid, rollup, drilldown in d["levels"]
                ),
            )
            for d in dimensions
        ),
    )


def _required(node: etree._Element, attribute: str, name: str) -> str:
    value = node.get(attribute)
    if value is None:
        raise DocumentParseError(f"<{node.tag}> lacks the {attribute} attribute", name, node.sourceline or 0)
    return value


def _parse_fact_def(node: etree._Element, name: str) -> FactDef:
    return FactDef(
        id=_required(node, "id", name),
        path=_required(node, "path", name),
        measures=tuple(
            MeasureDef(id=_required(m, "id", name), attribute=_required(m, "attribute", name))
            for m in node.iterfind("measure")
        ),
        dimrefs=tuple(
            DimRef(dimension=_required(r, "dimension", name), attribute=_required(r, "attribute", name))
            for r in node.iterfind("dimref")
        ),
    )


def _collect_levels(node: etree._Element, dimension: dict, name: str) -> None:
    for child in node:
        if isinstance(child.tag, str):
            _collect_level_node(child, dimension, name)


def _collect_level_node(node: etree._Element, dimension: dict, name: str) -> None:
    if node.tag == "level":
        dimension["levels"].append((
            _required(node, "id", name),
            tuple(node.get("rollup", "").split()),
            tuple(node.get("drilldown", "").split()),
        ))
    elif node.tag == "attribute":
        dimension["attributes"].setdefault(_required(node, "level", name), []).append(_required(node, "id", name))


def parse_dimension(source: Source, warnings: List[str]) -> Tuple[str, Dict[str, Dict[str, Member]]]:
    """
    Parse one dimension document.

    Instance attributes are read from <attribute name value/> children; XML
    attributes on <instance> other than key are accepted as well.

    Returns:
        (dimension id, level id -> member key -> Member)
    """
    root, name = _parse_tree(source)
    if root.tag != "dimension":
        raise DocumentParseError(f"root element is <{root.tag}>, expected <dimension>", name, root.sourceline or 0)

    levels: Dict[str, Dict[str, Member]] = {}
    for level_node in root:
        if not isinstance(level_node.tag, str):
            continue
        if level_node.tag != "Level":
            warnings.append(f"{name}:{level_node.sourceline}: unknown element <{level_node.tag}> ignored")
            continue
        members = levels.setdefault(level_node.get("id", ""), {})
        for instance in level_node.iterfind("instance"):
            member = _parse_instance(instance, name, warnings)
            if member is None:
                continue
            if member.key in members:
                warnings.append(f"{name}:{instance.sourceline}: duplicate instance {member.key} ignored")
                continue
            members[member.key] = member
    return root.get("id", ""), levels


def _parse_instance(node: etree._Element, name: str, warnings: List[str]) -> Optional[Member]:
    key = node.get("key")
    if key is None:
        warnings.append(f"{name}:{node.sourceline}: instance without key ignored")
        return None

    raw: List[Tuple[str, str]] = []
    parents: List[ParentRef] = []
    for child in node:
        if not isinstance(child.tag, str):
            continue
        if child.tag == "attribute":
            value = child.get("value", child.text or "")
            raw.append((child.get("name", ""), value))
        elif child.tag == "rollup":
            parents.append(ParentRef(child.get("level", ""), child.get("ref", "")))
        else:
            warnings.append(f"{name}:{child.sourceline}: unknown element <{child.tag}> in instance {key} ignored")
    raw.extend((attr, value) for attr, value in node.attrib.items() if attr != "key")

    attributes = []
    for attr, text in raw:
        try:
            attributes.append((attr, coerce_attribute(attr, text)))
        except ValueError:
            warnings.append(f"{name}:{node.sourceline}: instance {key}: bad value {text!r} for {attr}")
    return Member(key=key, attributes=tuple(attributes), parents=tuple(parents))


def iter_facts(source: Source, warnings: List[str]) -> Iterator[Fact]:
    """
    Stream <fact> elements.

    Children may appear in any order; slot_order records the order seen,
    with absent slots appended in canonical order.
    """
    name = source_name(source)
    stream = io.BytesIO(source) if isinstance(source, bytes) else str(source)
    number = 0
    try:
        for _, element in etree.iterparse(stream, events=("end",), tag="fact"):
            number += 1
            yield _parse_fact(element, number, name, warnings)
            element.clear()
            while element.getprevious() is not None:
                del element.getparent()[0]
    except OSError as e:
        raise DocumentParseError(f"cannot read document: {e.strerror or e}", name) from e
    except etree.XMLSyntaxError as e:
        raise _syntax_error(e, name) from e


def _parse_fact(element: etree._Element, number: int, name: str, warnings: List[str]) -> Fact:
    values = {}
    seen: List[int] = []
    for child in element:
        if not isinstance(child.tag, str):
            continue
        if child.tag not in SLOT_NAMES:
            warnings.append(f"{name}: fact #{number}: unknown element <{child.tag}> ignored")
            continue
        if child.tag in values:
            warnings.append(f"{name}: fact #{number}: repeated <{child.tag}> ignored")
            continue
        try:
            values[child.tag] = coerce_attribute(child.tag, (child.text or "").strip())
        except ValueError:
            warnings.append(f"{name}: fact #{number}: bad value {child.text!r} for {child.tag}")
            continue
        seen.append(SLOT_NAMES.index(child.tag) + 1)
    order = tuple(seen) + tuple(p for p in range(1, len(SLOT_NAMES) + 1) if p not in seen)
    return Fact(**values, slot_order=order)


def parse_warehouse(documents: WarehouseDocuments) -> Warehouse:
    """
    Parse the model, every dimension document and the fact document.

    Facts whose dimension references do not resolve are kept; each dangling
    reference produces a warning.

    Raises:
        DocumentParseError: a document is not well-formed XML
    """
    model = parse_model(documents.model_doc)
    warnings: List[str] = []

    members = {}
    for doc_name, source in documents.dimension_docs.items():
        dimension_id, levels = parse_dimension(source, warnings)
        declared = model.dimension(dimension_id)
        if declared is None:
            warnings.append(f"{doc_name}: dimension {dimension_id!r} is not declared in the model")
            continue
        _check_references(declared, levels, doc_name, warnings)
        members[dimension_id] = levels

    finest: Dict[str, Dict[str, Member]] = {}
    for ref in model.fact.dimrefs:
        dimension = model.dimension(ref.dimension)
        if dimension is not None:
            finest[ref.attribute] = members.get(dimension.id, {}).get(dimension.finest.id, {})

    facts = []
    for fact in iter_facts(documents.fact_doc, warnings):
        for ref in model.fact.dimrefs:
            value = getattr(fact, ref.attribute, None)
            if value is not None and str(value) not in finest.get(ref.attribute, {}):
                warnings.append(
                    f"{documents.fact_name}: fact #{len(facts) + 1}: {ref.attribute}={value} "
                    f"does not resolve in {ref.dimension}"
                )
        facts.append(fact)

    if warnings:
        logger.warning("parsed warehouse with %d warnings (first: %s)", len(warnings), warnings[0])
        for w in warnings[1:]:
            logger.debug(w)
    logger.info("parsed %d facts, %d dimensions", len(facts), len(members))
    return Warehouse(model=model, members=members, facts=facts, warnings=warnings)


def _check_references(dimension: DimensionDef, levels: Dict[str, Dict[str, Member]], name: str,
                      warnings: List[str]) -> None:
    for level_id, level_members in levels.items():
        if dimension.level(level_id) is None:
            warnings.append(f"{name}: level {level_id!r} is not declared for {dimension.id}")
            continue
        for member in level_members.values():
            for parent in member.parents:
                if parent.key not in levels.get(parent.level, {}):
                    warnings.append(
                        f"{name}: {level_id} instance {member.key} references missing "
                        f"{parent.level} instance {parent.key}"
                    )
