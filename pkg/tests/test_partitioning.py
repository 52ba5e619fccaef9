from decimal import Decimal

import pytest

from frcompress.core import FuzzyRelation, Partition, make_universe
from frcompress.partitioning import (
    PartitionMismatchError,
    count_partitions,
    meet,
    meet_all,
    relation_partition,
    row_partition,
    strict_partition,
    system_partition,
)

import oracle
import worked_examples as W


def sets(p):
    return set(p.label_sets())


def test_default_universe_labels():
    R = FuzzyRelation("R", [["0.1", "0.2"], ["0.1", "0.2"]])
    assert row_partition(R).as_labels() == [["x1", "x2"]]


def test_universe_size_checked():
    R = FuzzyRelation("R", [["0.1"]])
    with pytest.raises(PartitionMismatchError):
        row_partition(R, make_universe(["a", "b"]))


@pytest.mark.parametrize("name", ["R1", "R2", "R3"])
def test_row_partition_matches_brute_force(literal, name):
    R = literal.relation(name)
    assert sets(row_partition(R, literal.universe)) == oracle.row_blocks(literal.labels, [R.matrix])


@pytest.mark.parametrize("name", ["R1", "R2", "R3"])
def test_strict_partition_matches_brute_force(literal, name):
    R = literal.relation(name)
    got = sets(strict_partition(R, literal.universe))
    assert got == oracle.row_blocks(literal.labels, [R.matrix], strict=True)


def test_strict_r1_of_printed_system(literal):
    p = strict_partition(literal.relation("R1"), literal.universe)
    assert sets(p) == W.blocks("x1 x7", "x2 x6", "x3 x5", "x4", "x8")


def test_strict_refines_row(literal):
    for R in literal.relations:
        assert strict_partition(R, literal.universe).refines(row_partition(R, literal.universe))


def test_combined_partitions(canon, literal):
    assert sets(system_partition(canon).combined) == W.COMBINED
    assert sets(system_partition(literal).combined) == W.LITERAL_COMBINED


def test_meet_of_nothing_is_one_block():
    u = make_universe("abc")
    assert meet_all([], u) == Partition.indiscrete(u)


def test_meet_rejects_other_universe():
    with pytest.raises(PartitionMismatchError):
        meet(Partition.discrete(make_universe("ab")), Partition.discrete(make_universe("abc")))


def test_epsilon_groups_close_rows():
    R = FuzzyRelation("R", [["0.50", "0.1"], ["0.52", "0.1"]])
    assert len(row_partition(R)) == 2
    assert len(row_partition(R, epsilon=Decimal("0.05"))) == 1


def test_epsilon_zero_is_exact(literal):
    for R in literal.relations:
        assert row_partition(R, literal.universe, epsilon=Decimal(0)) == row_partition(R, literal.universe)


def test_counter_ticks_per_relation(literal):
    with count_partitions() as outer:
        system_partition(literal)
        with count_partitions() as inner:
            relation_partition(literal.relations[0], literal.universe, "strict")
    assert (outer.count, inner.count) == (4, 1)


def test_bad_mode():
    with pytest.raises(ValueError):
        relation_partition(FuzzyRelation("R", [["0"]]), mode="column")
