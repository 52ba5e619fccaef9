from decimal import Decimal

import pytest

from frcompress.core import FuzzyRelation, Partition, make_universe
from frcompress.homomorphism import (
    UniverseMismatchError,
    compress,
    image_relation,
    inverse_image_relation,
    is_consistent,
    quotient_map,
)
from frcompress.partitioning import system_partition

import oracle
import worked_examples as W


def test_quotient_map_labels_follow_block_order(canon):
    f = quotient_map(canon.universe, system_partition(canon).combined)
    assert f.assignment == W.F
    assert f.preimage("y4").labels == ("x4", "x8")
    assert f.blocks_by_image()["y2"] == frozenset({"x2", "x6"})
    assert f(canon.universe[6]) == "y1"


def test_quotient_map_prefix():
    u = make_universe("ab")
    f = quotient_map(u, Partition.discrete(u), "z")
    assert [y.label for y in f.image_universe] == ["z1", "z2"]


def test_quotient_map_universe_checked():
    with pytest.raises(UniverseMismatchError):
        quotient_map(make_universe("ab"), Partition.discrete(make_universe("abc")))


@pytest.mark.parametrize("which", ["canon", "literal"])
def test_image_matches_brute_force(request, which):
    sys_ = request.getfixturevalue(which)
    c = compress(sys_)
    order = [list(b.labels) for b in c.map.partition]
    for R in sys_.relations:
        got = [[oracle.frac([[v]])[0][0] for v in row] for row in image_relation(c.map, R).matrix]
        assert got == oracle.image(R.matrix, order, sys_.labels)


def test_image_is_sup_not_representative(canon):
    f = compress(canon).map
    assert image_relation(f, canon.relation("R2"))[0, 3] == Decimal("0.7")


def test_consistency_flags_match_brute_force(canon, literal):
    for sys_ in (canon, literal):
        c = compress(sys_)
        blocks = [list(b.labels) for b in c.map.partition]
        for R in sys_.relations:
            assert c.consistency[R.name].consistent == oracle.constant_on_blocks(R.matrix, blocks, sys_.labels)


def test_canon_r3_consistent_but_not_r1_r2(canon):
    c = compress(canon)
    assert {k: r.consistent for k, r in c.consistency.items()} == {"R1": False, "R2": False, "R3": True}
    assert not c.consistent


def test_witness_text(canon):
    c = compress(canon)
    w = c.consistency["R1"].violations[0]
    assert str(w) == "R1 on {x2, x6} x {x4, x8}: R1(x2,x4)=0.8 != R1(x2,x8)=0.6"


def test_inverse_image_of_image_on_consistent_relation(canon):
    c = compress(canon)
    R3 = canon.relation("R3")
    assert inverse_image_relation(c.map, image_relation(c.map, R3)) == R3


def test_inverse_image_dimension_checked(canon):
    f = compress(canon).map
    with pytest.raises(UniverseMismatchError):
        inverse_image_relation(f, canon.relation("R1"))
    with pytest.raises(UniverseMismatchError):
        image_relation(f, FuzzyRelation("T", [["0.1"]]))


def test_epsilon_consistency():
    u = make_universe("abc")
    R = FuzzyRelation("R", [["0.5", "0.51", "0.1"], ["0.5", "0.5", "0.1"], ["0.1", "0.1", "0.9"]])
    f = quotient_map(u, Partition.from_labels(u, [["a", "b"], ["c"]]))
    assert not is_consistent(f, R).consistent
    assert is_consistent(f, R, epsilon=Decimal("0.01")).consistent


def test_compress_strict_mode(literal):
    c = compress(literal, "strict")
    assert c.mode == "strict"
    assert c.cache.combined.refines(compress(literal).cache.combined)
