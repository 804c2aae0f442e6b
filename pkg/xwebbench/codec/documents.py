import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, Tuple, Union

from lxml import etree

from xwebbench.errors import DocumentParseError
from xwebbench.model import MODEL_DOCUMENT

Source = Union[bytes, Path]


def read_source(source: Source) -> bytes:
    return source if isinstance(source, bytes) else Path(source).read_bytes()


def source_name(source: Source) -> str:
    return "<bytes>" if isinstance(source, bytes) else str(source)


@dataclass
class WarehouseDocuments:
    """
    The six warehouse documents, as in-memory bytes or files on disk.

    dimension_docs is keyed by document name (d_date.xml, ...) in model order.
    """
    model_doc: Source
    dimension_docs: Dict[str, Source] = field(default_factory=dict)
    fact_doc: Source = b""
    fact_name: str = "f_sale.xml"

    @classmethod
    def from_directory(cls, directory: Union[str, Path]) -> "WarehouseDocuments":
        """
        Locate the documents of a generated warehouse.

        Dimension and fact document names are read from dw-model.xml.
        """
        root = Path(directory)
        model_path = root / MODEL_DOCUMENT
        if not model_path.is_file():
            raise FileNotFoundError(f"{model_path} not found")
        try:
            tree = etree.parse(str(model_path))
        except etree.XMLSyntaxError as e:
            line, column = e.position
            raise DocumentParseError(e.msg, str(model_path), line, column) from e
        fact = tree.getroot().find("fact")
        fact_name = fact.get("path") if fact is not None else "f_sale.xml"
        dimension_docs = {
            d.get("path"): root / d.get("path") for d in tree.getroot().iterfind("dimension")
        }
        return cls(model_doc=model_path, dimension_docs=dimension_docs, fact_doc=root / fact_name, fact_name=fact_name)

    def iter_documents(self) -> Iterator[Tuple[str, Source]]:
        """(name, source) pairs in load order: model, dimensions, facts."""
        yield MODEL_DOCUMENT, self.model_doc
        yield from self.dimension_docs.items()
        yield self.fact_name, self.fact_doc

    def digests(self) -> Dict[str, str]:
        return {name: sha256_of(source) for name, source in self.iter_documents()}


def sha256_of(source: Source) -> str:
    digest = hashlib.sha256()
    if isinstance(source, bytes):
        digest.update(source)
    else:
        with open(source, "rb") as f:
            for chunk in iter(lambda: f.read(1 << 20), b""):
                digest.update(chunk)
    return digest.hexdigest()
