import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Tuple, Union

from xwebbench.errors import TaxonomyError

logger = logging.getLogger(__name__)

# The cat table: category names organized in three levels
CATEGORY_LEVELS: Tuple[Tuple[str, ...], ...] = (
    ("BRASS", "COPPER", "NICKEL", "STEEL", "TIN"),
    ("ANODIZED", "BRUSHED", "BURNISHED", "PLATED", "POLISHED"),
    ("ECONOMY", "LARGE", "MEDIUM", "PROMO", "SMALL", "STANDARD"),
)

# (child, parent) rollup edges of the built-in hierarchy extension.
# BRUSHED -> NICKEL, STEEL and ECONOMY/STANDARD/SMALL -> BRUSHED are fixed.
DEFAULT_EDGES: Tuple[Tuple[str, str], ...] = (
    ("ANODIZED", "BRASS"),
    ("ANODIZED", "TIN"),
    ("BRUSHED", "NICKEL"),
    ("BRUSHED", "STEEL"),
    ("BURNISHED", "COPPER"),
    ("PLATED", "COPPER"),
    ("PLATED", "TIN"),
    ("POLISHED", "BRASS"),
    ("ECONOMY", "BRUSHED"),
    ("LARGE", "ANODIZED"),
    ("LARGE", "PLATED"),
    ("MEDIUM", "BURNISHED"),
    ("PROMO", "PLATED"),
    ("SMALL", "BRUSHED"),
    ("STANDARD", "BRUSHED"),
    ("STANDARD", "POLISHED"),
)

# A part may already hold every category of the drawn level; after this many
# rejected draws the level is redrawn.
MAX_CANDIDATE_DRAWS = 100


@dataclass(frozen=True)
class CategoryTaxonomy:
    """
    Three-level, many-to-many category graph.

    levels[0] is level 1 (the supercategories). rollup_edges holds
    (child, parent) pairs where the parent sits exactly one level above.
    """
    levels: Tuple[Tuple[str, ...], ...]
    rollup_edges: Tuple[Tuple[str, str], ...]

    def level_of(self, name: str) -> int:
        for index, names in enumerate(self.levels):
            if name in names:
                return index + 1
        raise KeyError(name)

    def __contains__(self, name: object) -> bool:
        return any(name in names for names in self.levels)

    @property
    def names(self) -> List[str]:
        return [name for names in self.levels for name in names]

    def parents(self, name: str) -> Tuple[str, ...]:
        return tuple(sorted(parent for child, parent in self.rollup_edges if child == name))

    def children(self, name: str) -> Tuple[str, ...]:
        return tuple(sorted(child for child, parent in self.rollup_edges if parent == name))

    def to_edges(self) -> List[Tuple[str, str]]:
        return list(self.rollup_edges)


class CategoryTag(NamedTuple):
    name: str
    level: int


class CategoryAssignment(dict):
    """part key -> tuple of CategoryTag, in selection order."""

    def catset(self, partkey: int) -> FrozenSet[str]:
        return frozenset(tag.name for tag in self.get(partkey, ()))


def validate_taxonomy(levels: Tuple[Tuple[str, ...], ...], edges: Iterable[Tuple[str, str]]) -> CategoryTaxonomy:
    """
    Check the taxonomy invariants and build the taxonomy.

    Raises:
        TaxonomyError: naming the first offending category
    """
    level_of: Dict[str, int] = {}
    for index, names in enumerate(levels):
        for name in names:
            if name in level_of:
                raise TaxonomyError(f"category {name} appears on several levels", category=name)
            level_of[name] = index + 1

    unique_edges = []
    for child, parent in edges:
        for name in (child, parent):
            if name not in level_of:
                raise TaxonomyError(f"unknown category {name}", category=name)
        if level_of[parent] != level_of[child] - 1:
            raise TaxonomyError(
                f"{child} (level {level_of[child]}) cannot roll up to {parent} (level {level_of[parent]})",
                category=child,
            )
        if (child, parent) not in unique_edges:
            unique_edges.append((child, parent))

    parent_count = {name: 0 for name in level_of}
    for child, _ in unique_edges:
        parent_count[child] += 1
    for name, level in level_of.items():
        if level > 1 and parent_count[name] == 0:
            raise TaxonomyError(f"{name} has no parent category", category=name)
    if not any(count >= 2 for count in parent_count.values()):
        raise TaxonomyError("hierarchy is strict: no category has two parents")

    return CategoryTaxonomy(levels=tuple(tuple(n) for n in levels), rollup_edges=tuple(sorted(unique_edges)))


def parse_taxonomy(text: str) -> List[Tuple[str, str]]:
    """Parse `CHILD -> PARENT` lines; blank lines and # comments are ignored."""
    edges = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        child, arrow, parent = line.partition("->")
        if not arrow or not child.strip() or not parent.strip():
            raise TaxonomyError(f"line {number}: expected 'CHILD -> PARENT', got {raw!r}", line=number)
        edges.append((child.strip().upper(), parent.strip().upper()))
    return edges


def build_category_taxonomy(source: Optional[Union[str, Path]] = None) -> CategoryTaxonomy:
    """
    Build the category taxonomy.

    Args:
        source: Optional taxonomy file with one `CHILD -> PARENT` edge per line.
            Without it, the built-in hierarchy extension is used.

    Returns:
        CategoryTaxonomy over the fixed three-level cat table
    """
    if source is None:
        return validate_taxonomy(CATEGORY_LEVELS, DEFAULT_EDGES)

    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise TaxonomyError(f"cannot read taxonomy file {path}: {e}") from e
    taxonomy = validate_taxonomy(CATEGORY_LEVELS, parse_taxonomy(text))
    logger.info("loaded %d category rollup edges from %s", len(taxonomy.rollup_edges), path)
    return taxonomy


def write_taxonomy(taxonomy: CategoryTaxonomy, path: Union[str, Path]) -> None:
    lines = [f"{child} -> {parent}" for child, parent in taxonomy.to_edges()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def assign_categories(part_count: int, tax: CategoryTaxonomy, rng: random.Random) -> CategoryAssignment:
    """
    Part category selection.

    For each part, 1 to 3 "root" categories are drawn from random levels;
    each root may bring up to (3 - level) subcategories from the following
    levels, added only when absent. Parts whose roots get no subcategory are
    attached non-coveringly.

    Args:
        part_count: Parts are keyed 1..part_count
        tax: Category taxonomy providing the cat table
        rng: Seeded generator; the assignment is a function of its state

    Returns:
        CategoryAssignment mapping part keys to their catsets
    """
    cat = tax.levels
    depth = len(cat)
    assignment = CategoryAssignment()

    for partkey in range(1, part_count + 1):
        catset: List[CategoryTag] = []
        chosen = set()
        ncat = rng.randint(1, 3)
        for _ in range(ncat):
            lvl, cand = _draw_root(rng, cat, chosen)
            catset.append(CategoryTag(cand, lvl))
            chosen.add(cand)
            nsubcat = rng.randint(0, depth - lvl)
            for j in range(1, nsubcat + 1):
                names = cat[lvl + j - 1]
                cand = names[rng.randint(1, len(names)) - 1]
                if cand not in chosen:
                    catset.append(CategoryTag(cand, lvl + j))
                    chosen.add(cand)
        assignment[partkey] = tuple(catset)

    return assignment


def _draw_root(rng: random.Random, cat: Tuple[Tuple[str, ...], ...], chosen: set) -> Tuple[int, str]:
    while True:
        lvl = rng.randint(1, len(cat))
        names = cat[lvl - 1]
        for _ in range(MAX_CANDIDATE_DRAWS):
            cand = names[rng.randint(1, len(names)) - 1]
            if cand not in chosen:
                return lvl, cand
