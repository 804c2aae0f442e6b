import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from dotenv import dotenv_values
from pydantic import BaseModel, Field

from xwebbench import __version__
from xwebbench.codec.documents import WarehouseDocuments, sha256_of
from xwebbench.errors import ParameterError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.txt"


class RunManifest(BaseModel):
    """
    Reproducibility record of one generated warehouse.

    Written as KEY=value lines: `gen.<param>`, `count.<table>`, and
    `sha256.<document>` keys next to the plain ones.
    """

    version: str = __version__
    created_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    params: Dict[str, Any] = Field(default_factory=dict)
    taxonomy: str = "built-in"
    partitions: int = 1
    fact_count: int = 0
    counts: Dict[str, int] = Field(default_factory=dict)
    digests: Dict[str, str] = Field(default_factory=dict)

    def to_text(self) -> str:
        lines = [
            f"version={self.version}",
            f"created_at={self.created_at}",
            f"taxonomy={self.taxonomy}",
            f"partitions={self.partitions}",
            f"fact_count={self.fact_count}",
        ]
        lines += [f"gen.{key}={value}" for key, value in self.params.items()]
        lines += [f"count.{key}={value}" for key, value in self.counts.items()]
        lines += [f"sha256.{name}={digest}" for name, digest in self.digests.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunManifest":
        path = Path(path)
        if not path.is_file():
            raise ParameterError(f"manifest {path} not found")
        values = {k: v for k, v in dotenv_values(path).items() if v is not None}
        manifest = cls(
            version=values.get("version", ""),
            created_at=values.get("created_at", ""),
            taxonomy=values.get("taxonomy", "built-in"),
            partitions=int(values.get("partitions", 1)),
            fact_count=int(values.get("fact_count", 0)),
        )
        for key, value in values.items():
            group, _, name = key.partition(".")
            if group == "gen":
                manifest.params[name] = value
            elif group == "count":
                manifest.counts[name] = int(value)
            elif group == "sha256":
                manifest.digests[name] = value
        return manifest


def write_manifest(manifest: RunManifest, directory: Union[str, Path]) -> Path:
    path = Path(directory) / MANIFEST_NAME
    path.write_text(manifest.to_text(), encoding="utf-8")
    return path


def document_digests(directory: Union[str, Path]) -> Dict[str, str]:
    return WarehouseDocuments.from_directory(directory).digests()


def verify_manifest(directory: Union[str, Path], manifest: Optional[RunManifest] = None) -> List[str]:
    """
    Re-hash the documents listed in the manifest.

    Returns:
        Names of documents that are missing or whose digest changed; empty
        when the warehouse is intact
    """
    root = Path(directory)
    manifest = manifest or RunManifest.from_file(root / MANIFEST_NAME)
    tampered = []
    for name, digest in manifest.digests.items():
        path = root / name
        if not path.is_file():
            logger.warning("%s: listed in the manifest but missing", name)
            tampered.append(name)
        elif sha256_of(path) != digest:
            logger.warning("%s: digest differs from the manifest", name)
            tampered.append(name)
    return tampered
