import math

import pytest

from conftest import tiny_params
from xwebbench.datagen.build import _prepare
from xwebbench.datagen.dimensions import retail_price
from xwebbench.datagen.facts import IDENTITY_ORDER, Fact, fact_stream, generate_facts
from xwebbench.datagen.taxonomy import CategoryAssignment
from xwebbench.errors import ParameterError, SinkError

# 15 customers x 20 parts x 1 supplier x 2557 days
CANDIDATES = 767_100


def _run(gp, partitions=1, partition=0):
    _, dims, assign = _prepare(gp, None)
    facts = []
    stats = generate_facts(dims, assign, gp, fact_stream(gp.seed, partition, partitions), facts.append,
                           partitions, partition)
    return facts, stats


@pytest.mark.slow
def test_fact_count_follows_density():
    low, high = 0.0005, 0.007
    low_counts, high_counts = [], []
    for seed in range(10):
        for density, counts in ((low, low_counts), (high, high_counts)):
            _, stats = _run(tiny_params(seed=seed, density=density))
            assert stats.candidates == CANDIDATES
            mean = CANDIDATES * density
            sigma = math.sqrt(mean * (1 - density))
            assert abs(stats.emitted - mean) < 4 * sigma
            counts.append(stats.emitted)
    ratio = sum(high_counts) / sum(low_counts)
    assert ratio == pytest.approx(14, rel=0.1)


def test_clean_facts_are_canonical():
    facts, stats = _run(tiny_params(seed=11))
    assert stats.emitted == len(facts) > 0
    assert stats.nulled_slots == 0
    assert stats.reordered == 0
    for fact in facts:
        assert fact.slot_order == IDENTITY_ORDER
        assert fact.missing_count == 0
        assert 1 <= fact.f_quantity <= 10_000
        assert fact.f_totalamount == fact.f_quantity * retail_price(fact.p_partkey)
        assert 19980101 <= fact.d_datekey <= 20041231


def test_missing_slot_rate():
    facts, stats = _run(tiny_params(seed=5, density=0.01, p_missing=0.25))
    slots = 6 * len(facts)
    assert stats.nulled_slots == sum(f.missing_count for f in facts)
    assert stats.nulled_slots / slots == pytest.approx(0.25, abs=0.02)


def test_reorder_rate():
    facts, stats = _run(tiny_params(seed=6, density=0.01, p_reorder=0.5))
    reordered = sum(1 for f in facts if f.reordered)
    # a shuffle lands on the identity once in 720
    assert reordered / len(facts) == pytest.approx(0.5 * 719 / 720, abs=0.02)
    for fact in facts:
        assert sorted(fact.slot_order) == list(IDENTITY_ORDER)


def test_generation_is_deterministic():
    first, _ = _run(tiny_params(seed=9, p_missing=0.2, p_reorder=0.3))
    second, _ = _run(tiny_params(seed=9, p_missing=0.2, p_reorder=0.3))
    assert first == second


def test_partitions_split_customers():
    gp = tiny_params(seed=4, density=0.005)
    seen = []
    total = 0
    for partition in range(3):
        facts, stats = _run(gp, 3, partition)
        total += stats.candidates
        customers = {f.c_custkey for f in facts}
        assert all((key - 1) % 3 == partition for key in customers)
        seen.append(customers)
    assert total == CANDIDATES
    assert not seen[0] & seen[1]


def test_bad_partition_index():
    with pytest.raises(ParameterError):
        _run(tiny_params(), 2, 2)


def test_assignment_must_cover_parts():
    gp = tiny_params()
    _, dims, _ = _prepare(gp, None)
    with pytest.raises(ParameterError, match="does not cover"):
        generate_facts(dims, CategoryAssignment(), gp, fact_stream(gp.seed), lambda f: None)


def test_sink_failure_reports_emitted_count():
    gp = tiny_params(seed=2)
    _, dims, assign = _prepare(gp, None)
    received = []

    def sink(fact: Fact):
        if len(received) == 3:
            raise OSError("disk full")
        received.append(fact)

    with pytest.raises(SinkError) as excinfo:
        generate_facts(dims, assign, gp, fact_stream(gp.seed), sink)
    assert excinfo.value.emitted == 3
    assert "disk full" in str(excinfo.value)


def test_ordered_slots_skip_missing():
    fact = Fact(c_custkey=1, p_partkey=None, s_suppkey=3, d_datekey=19980101, f_quantity=2,
                f_totalamount=None, slot_order=(6, 5, 4, 3, 2, 1))
    assert [name for name, _ in fact.ordered_slots()] == ["f_quantity", "d_datekey", "s_suppkey", "c_custkey"]
    assert fact.missing_count == 2
    assert fact.reordered
