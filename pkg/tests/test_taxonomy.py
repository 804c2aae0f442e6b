import random
from collections import Counter

import pytest

from xwebbench.datagen.sampling import stream
from xwebbench.datagen.taxonomy import (
    CATEGORY_LEVELS,
    DEFAULT_EDGES,
    assign_categories,
    build_category_taxonomy,
    parse_taxonomy,
    validate_taxonomy,
    write_taxonomy,
)
from xwebbench.errors import TaxonomyError


def test_brushed_neighbourhood(taxonomy):
    assert taxonomy.parents("BRUSHED") == ("NICKEL", "STEEL")
    assert taxonomy.children("BRUSHED") == ("ECONOMY", "SMALL", "STANDARD")
    assert taxonomy.level_of("BRASS") == 1
    assert taxonomy.level_of("PROMO") == 3
    assert "GOLD" not in taxonomy


def test_every_lower_category_has_a_parent(taxonomy):
    for names in taxonomy.levels[1:]:
        for name in names:
            assert taxonomy.parents(name)


def test_missing_parent_is_named(tmp_path):
    edges = [edge for edge in DEFAULT_EDGES if edge[0] != "PLATED"]
    path = tmp_path / "tax.txt"
    path.write_text("\n".join(f"{c} -> {p}" for c, p in edges))
    with pytest.raises(TaxonomyError) as excinfo:
        build_category_taxonomy(path)
    assert excinfo.value.category == "PLATED"


def test_edge_skipping_a_level_is_rejected():
    with pytest.raises(TaxonomyError) as excinfo:
        validate_taxonomy(CATEGORY_LEVELS, list(DEFAULT_EDGES) + [("PROMO", "BRASS")])
    assert excinfo.value.category == "PROMO"


def test_unknown_category_is_rejected():
    with pytest.raises(TaxonomyError) as excinfo:
        validate_taxonomy(CATEGORY_LEVELS, list(DEFAULT_EDGES) + [("GOLD", "BRASS")])
    assert excinfo.value.category == "GOLD"


def test_strict_hierarchy_is_rejected():
    first_parent = {}
    for child, parent in DEFAULT_EDGES:
        first_parent.setdefault(child, parent)
    with pytest.raises(TaxonomyError, match="strict"):
        validate_taxonomy(CATEGORY_LEVELS, first_parent.items())


def test_parse_ignores_comments_and_reports_bad_lines():
    assert parse_taxonomy("# header\n\nsmall -> brushed  # fixed\n") == [("SMALL", "BRUSHED")]
    with pytest.raises(TaxonomyError) as excinfo:
        parse_taxonomy("SMALL -> BRUSHED\nPROMO PLATED\n")
    assert excinfo.value.line == 2


def test_written_taxonomy_reads_back(tmp_path, taxonomy):
    path = tmp_path / "tax.txt"
    write_taxonomy(taxonomy, path)
    assert build_category_taxonomy(path) == taxonomy


def test_missing_file_raises(tmp_path):
    with pytest.raises(TaxonomyError, match="cannot read"):
        build_category_taxonomy(tmp_path / "absent.txt")


def test_assignment_shape_over_many_parts(taxonomy):
    assignment = assign_categories(10_000, taxonomy, stream(42, "categories"))
    assert sorted(assignment) == list(range(1, 10_001))
    sizes = Counter()
    for partkey, tags in assignment.items():
        names = [tag.name for tag in tags]
        assert 1 <= len(names) <= 9
        assert len(names) == len(set(names))
        for tag in tags:
            assert taxonomy.level_of(tag.name) == tag.level
        sizes[len(names)] += 1
    assert sum(count for size, count in sizes.items() if size > 1) > 0
    # some part holds a lower category without any of its parents
    assert any(
        tag.level > 1 and not set(taxonomy.parents(tag.name)) & {t.name for t in tags}
        for tags in assignment.values()
        for tag in tags
    )
    # some part holds two categories on the same level
    assert any(
        max(Counter(tag.level for tag in tags).values()) > 1 for tags in assignment.values()
    )


def test_assignment_is_a_function_of_the_seed(taxonomy):
    first = assign_categories(200, taxonomy, random.Random(5))
    second = assign_categories(200, taxonomy, random.Random(5))
    assert first == second
    assert first.catset(1) == frozenset(tag.name for tag in first[1])
    assert first.catset(999) == frozenset()


def test_no_parts_gives_empty_assignment(taxonomy):
    assert assign_categories(0, taxonomy, random.Random(1)) == {}
