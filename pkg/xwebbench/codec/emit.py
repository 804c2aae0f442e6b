import io
import logging
from contextlib import ExitStack
from pathlib import Path
from typing import BinaryIO, Dict, Iterable, Mapping, Union

from lxml import etree

from xwebbench.codec.documents import WarehouseDocuments
from xwebbench.datagen.facts import Fact
from xwebbench.errors import EmissionError, ModelError
from xwebbench.model import MODEL_DOCUMENT, DimensionDef, WarehouseModel, validate_model
from xwebbench.warehouse import Member, Warehouse, format_attribute

logger = logging.getLogger(__name__)

XML_DECLARATION = b'<?xml version="1.0" encoding="UTF-8"?>\n'


def _element(tag: str, *pairs) -> etree._Element:
    element = etree.Element(tag)
    for name, value in pairs:
        element.set(name, value)
    return element


def _sub(parent: etree._Element, tag: str, *pairs) -> etree._Element:
    element = _element(tag, *pairs)
    parent.append(element)
    return element


def emit_model(m: WarehouseModel) -> bytes:
    """
    Serialize the model as an <xweb-dw-model> document.

    Levels are written as self-closed <level id rollup drilldown/> elements,
    multi-target links space-separated. Member attributes follow the levels
    of their dimension as <attribute level id/> elements; measures and
    dimension references are children of <fact>.

    Raises:
        ModelError: the model does not validate
    """
    diagnostics = validate_model(m)
    if diagnostics:
        raise ModelError(diagnostics)

    root = etree.Element("xweb-dw-model")
    fact = _sub(root, "fact", ("id", m.fact.id), ("path", m.fact.path))
    for measure in m.fact.measures:
        _sub(fact, "measure", ("id", measure.id), ("attribute", measure.attribute))
    for ref in m.fact.dimrefs:
        _sub(fact, "dimref", ("dimension", ref.dimension), ("attribute", ref.attribute))

    for dimension in m.dimensions:
        node = _sub(root, "dimension", ("id", dimension.id), ("path", dimension.path))
        for level in dimension.levels:
            _sub(node, "level",
                 ("id", level.id), ("rollup", " ".join(level.rollup)), ("drilldown", " ".join(level.drilldown)))
        for level in dimension.levels:
            for attribute in level.attributes:
                _sub(node, "attribute", ("level", level.id), ("id", attribute))

    return XML_DECLARATION + etree.tostring(root, pretty_print=True, encoding="UTF-8")


def _check_dimension(d: DimensionDef, data: Mapping[str, Mapping[str, Member]]) -> None:
    for level in d.levels:
        for member in data.get(level.id, {}).values():
            present = {name for name, _ in member.attributes}
            for attribute in level.attributes:
                if attribute not in present:
                    raise EmissionError(f"{d.id}/{level.id} instance {member.key} lacks attribute {attribute}")
            for parent in member.parents:
                if parent.level not in level.rollup:
                    raise EmissionError(
                        f"{d.id}/{level.id} instance {member.key} references level {parent.level}, "
                        f"which {level.id} does not roll up to"
                    )
                if parent.key not in data.get(parent.level, {}):
                    raise EmissionError(
                        f"{d.id}/{level.id} instance {member.key} is an orphan: "
                        f"no {parent.level} instance {parent.key}"
                    )


def _instance(member: Member) -> etree._Element:
    element = _element("instance", ("key", member.key))
    for name, value in member.attributes:
        _sub(element, "attribute", ("name", name), ("value", format_attribute(value)))
    for parent in member.parents:
        _sub(element, "rollup", ("level", parent.level), ("ref", parent.key))
    return element


def write_dimension(d: DimensionDef, data: Mapping[str, Mapping[str, Member]], sink: BinaryIO) -> int:
    """
    Stream a dimension document: one Level element per hierarchy level,
    finest first, each holding its instances.

    Args:
        d: Dimension definition
        data: level id -> member key -> Member
        sink: Binary output

    Returns:
        Number of instances written

    Raises:
        EmissionError: an instance lacks a declared attribute or references
            a parent that does not exist
    """
    _check_dimension(d, data)
    count = 0
    sink.write(XML_DECLARATION)
    with etree.xmlfile(sink, encoding="UTF-8") as xf:
        with xf.element("dimension", id=d.id):
            for level in d.levels:
                xf.write("\n  ")
                with xf.element("Level", id=level.id):
                    for member in data.get(level.id, {}).values():
                        element = _instance(member)
                        etree.indent(element, space="  ", level=2)
                        xf.write("\n    ", element)
                        count += 1
                    xf.write("\n  ")
            xf.write("\n")
    sink.write(b"\n")
    return count


def emit_dimension(d: DimensionDef, data: Mapping[str, Mapping[str, Member]]) -> bytes:
    buffer = io.BytesIO()
    write_dimension(d, data, buffer)
    return buffer.getvalue()


class FactWriter:
    """
    Streaming writer for the fact document.

    Usable as a context manager and as the fact sink of generate_facts.
    Children of each <fact> follow its slot_order; missing slots are omitted.
    """

    def __init__(self, sink: BinaryIO, fact_id: str = "Sale"):
        self.sink = sink
        self.fact_id = fact_id
        self.count = 0
        self._stack = None
        self._xf = None

    def __enter__(self) -> "FactWriter":
        self.sink.write(XML_DECLARATION)
        self._stack = ExitStack()
        self._xf = self._stack.enter_context(etree.xmlfile(self.sink, encoding="UTF-8"))
        self._stack.enter_context(self._xf.element("facts", id=self.fact_id))
        return self

    def write(self, fact: Fact) -> None:
        element = etree.Element("fact")
        for name, value in fact.ordered_slots():
            etree.SubElement(element, name).text = format_attribute(value)
        etree.indent(element, space="  ", level=1)
        self._xf.write("\n  ", element)
        self.count += 1

    __call__ = write

    def __exit__(self, exc_type, exc, tb) -> bool:
        if exc_type is None:
            self._xf.write("\n")
        self._stack.__exit__(exc_type, exc, tb)
        if exc_type is None:
            self.sink.write(b"\n")
        return False


def write_facts(facts: Iterable[Fact], sink: BinaryIO, fact_id: str = "Sale") -> int:
    with FactWriter(sink, fact_id) as writer:
        for fact in facts:
            writer.write(fact)
    return writer.count


def emit_facts(facts: Iterable[Fact], fact_id: str = "Sale") -> bytes:
    buffer = io.BytesIO()
    write_facts(facts, buffer, fact_id)
    return buffer.getvalue()


def emit_documents(w: Warehouse) -> WarehouseDocuments:
    """Serialize a whole in-memory warehouse to document bytes."""
    dimension_docs: Dict[str, bytes] = {}
    for dimension in w.model.dimensions:
        dimension_docs[dimension.path] = emit_dimension(dimension, w.members.get(dimension.id, {}))
    return WarehouseDocuments(
        model_doc=emit_model(w.model),
        dimension_docs=dimension_docs,
        fact_doc=emit_facts(w.facts, w.model.fact.id),
        fact_name=w.model.fact.path,
    )


def write_dimensions(w: Warehouse, directory: Union[str, Path]) -> Dict[str, Path]:
    """Write dw-model.xml and the dimension documents of `w` into `directory`."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    written = {MODEL_DOCUMENT: root / MODEL_DOCUMENT}
    written[MODEL_DOCUMENT].write_bytes(emit_model(w.model))
    for dimension in w.model.dimensions:
        path = root / dimension.path
        with open(path, "wb") as f:
            count = write_dimension(dimension, w.members.get(dimension.id, {}), f)
        logger.debug("wrote %s (%d instances)", path, count)
        written[dimension.path] = path
    return written
