"""Acceptance criteria AC1 to AC8.

Run directly (``python3 tests/test_acceptance.py``) or through pytest; either
way the terminal summary prints one PASS/FAIL line per criterion.
"""

import random
import sys
import time

import pytest

from frcompress.core import Partition, make_universe
from frcompress.dynamics import compress_state, equivalent, scratch_oracle
from frcompress.generate import DEFAULT_GRID, edit_instance, gen_pullback, random_system
from frcompress.homomorphism import (
    compress,
    image_relation,
    inverse_image_relation,
    is_consistent,
    quotient_map,
)
from frcompress.io import EDIT_KINDS, Edit, apply_edit, load_fixture_edit
from frcompress.partitioning import count_partitions, meet, row_partition
from frcompress.reduction import is_superfluous, reduce_compressed, reducts

import oracle
import worked_examples as W

criterion = pytest.mark.criterion


def best_ms(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, (time.perf_counter() - start) * 1000)
    return out, best


def mismatches(image, expected):
    labels = image.labels
    return [
        (R.name, labels[i], labels[j], str(R.matrix[i][j]), str(expected[R.name][i][j]))
        for R in image.relations
        for i in range(image.n)
        for j in range(image.n)
        if R.matrix[i][j] != expected[R.name][i][j]
    ]


def as_sets(p):
    return set(p.label_sets())


def example_map(universe):
    groups = {}
    for x, y in W.F.items():
        groups.setdefault(y, []).append(x)
    return quotient_map(universe, Partition.from_labels(universe, groups.values()))


# --- AC1 ------------------------------------------------------------------


@criterion("AC1")
@pytest.mark.parametrize("name,expected", [("R1", W.R1_BLOCKS), ("R2", W.R2_BLOCKS)])
def test_ac1_row_partition_printed_system(literal, name, expected):
    p, ms = best_ms(lambda: row_partition(literal.relation(name), literal.universe))
    assert as_sets(p) == expected
    assert ms < 1


@criterion("AC1")
def test_ac1_row_partition_added_relation(literal):
    (r4,) = load_fixture_edit("add_r4").payload
    p, ms = best_ms(lambda: row_partition(r4, literal.universe))
    assert as_sets(p) == W.R4_BLOCKS
    assert ms < 1


# --- AC2 ------------------------------------------------------------------


@criterion("AC2")
def test_ac2_combined_partition_and_mapping(canon):
    c, ms = best_ms(lambda: compress(canon))
    assert as_sets(c.cache.combined) == W.COMBINED
    assert c.map.assignment == W.F
    assert c.image.labels == ("y1", "y2", "y3", "y4")
    assert ms < 10


@criterion("AC2")
def test_ac2_image_matrices_entry_for_entry(canon):
    c = compress(canon)
    assert c.image.names == tuple(W.IMAGE)
    assert mismatches(c.image, W.IMAGE) == []


# --- AC3 ------------------------------------------------------------------


@criterion("AC3")
@pytest.mark.parametrize("which", ["canon", "literal"])
def test_ac3_reduction(request, which):
    sys_ = request.getfixturevalue(which)
    c = compress(sys_)
    assert is_superfluous(sys_, "R1")
    assert is_superfluous(c.image, "R1") == is_superfluous(sys_, "R1")
    direct = reducts(sys_)
    assert frozenset({"R2", "R3"}) in direct.reducts
    lifted = reduce_compressed(c)
    image_side = reducts(c.image)
    assert set(lifted.reducts) == set(image_side.reducts) == set(direct.reducts)
    assert lifted.core == image_side.core


# --- AC4 ------------------------------------------------------------------


@criterion("AC4")
def test_ac4_add_relation(canon_state, edits):
    (out, ms) = best_ms(lambda: apply_edit(canon_state, edits["add_r4"], image_prefix="z"))
    assert as_sets(out.cache.combined) == W.COMBINED_WITH_R4
    assert out.map("x4") == "z4" and out.map("x8") == "z5"
    assert [out.map(x) for x in ("x1", "x7", "x2", "x6", "x3", "x5")] == ["z1", "z1", "z2", "z2", "z3", "z3"]
    assert ms < 20


@criterion("AC4")
def test_ac4_remove_relation_partition(canon_state, edits):
    out, ms = best_ms(lambda: apply_edit(canon_state, edits["remove_r1"]))
    assert as_sets(out.cache.combined) == W.COMBINED
    assert out.image.n == 4
    assert ms < 20


@criterion("AC4")
def test_ac4_remove_relation_matrices(canon_state, edits):
    out = apply_edit(canon_state, edits["remove_r1"])
    assert out.image.names == tuple(W.IMAGE_WITHOUT_R1)
    assert mismatches(out.image, W.IMAGE_WITHOUT_R1) == []


@criterion("AC4")
def test_ac4_add_objects(canon_state, edits):
    out, ms = best_ms(lambda: apply_edit(canon_state, edits["add_x9_x10"]))
    t = out.trace
    assert as_sets(t.delta) == W.AFTER_ADD_X9_X10
    assert t.g("x9") == "z5" and t.g("x10") == "z6"
    assert as_sets(t.h.partition) == W.blocks("z1", "z2", "z3 z6", "z4 z5")
    assert t.s4.n == 4
    assert equivalent(out, scratch_oracle(out.source))
    assert ms < 20


@criterion("AC4")
def test_ac4_remove_objects(canon_state, edits):
    out, ms = best_ms(lambda: apply_edit(canon_state, edits["remove_x1_x7_x8"]))
    t = out.trace
    assert t.dropped == ("y1",)
    assert t.s5.labels == ("y2", "y3", "y4")
    assert {R.name: R.matrix for R in t.s5.relations} == W.SURVIVING_IMAGE
    assert all(len(b) == 1 for b in t.h.partition)
    assert [R.matrix for R in t.s6.relations] == [R.matrix for R in t.s5.relations]
    assert ms < 20


# --- AC5 ------------------------------------------------------------------

DIFFERENTIAL_CASES = 200


@criterion("AC5")
def test_ac5_differential_suite():
    start = time.perf_counter()
    failures = []
    pullback_fallbacks = 0
    for kind in EDIT_KINDS:
        for pullback in (True, False):
            for seed in range(DIFFERENTIAL_CASES):
                base, edit = edit_instance(kind, seed, pullback=pullback)
                assert base.n <= 14 and len(base.relations) <= 5
                out = apply_edit(compress_state(base), edit)
                if not equivalent(out, scratch_oracle(out.source)):
                    failures.append((kind, pullback, seed))
                if pullback and out.fallback:
                    pullback_fallbacks += 1
    elapsed = time.perf_counter() - start
    assert failures == []
    assert pullback_fallbacks == 0
    assert elapsed < 60


# --- AC6 ------------------------------------------------------------------


@criterion("AC6")
def test_ac6_add_relations_counter():
    full = gen_pullback(5, 20, 14, seed=6)
    state = compress_state(full.with_relations(full.relations[:12]))
    with count_partitions() as incr:
        out = apply_edit(state, Edit("add-relations", full.relations[12:]))
    with count_partitions() as scratch:
        fresh = compress_state(out.source)
    assert (incr.count, scratch.count) == (2, 14)
    assert out.trace.partitions_computed == 2
    assert equivalent(out, fresh)


@criterion("AC6")
def test_ac6_remove_relations_counter():
    base = gen_pullback(5, 20, 12, seed=7)
    state = compress_state(base)
    with count_partitions() as incr:
        out = apply_edit(state, Edit("remove-relations", ("R2", "R5", "R11")))
    with count_partitions() as scratch:
        compress_state(out.source)
    assert (incr.count, scratch.count) == (0, 9)


# --- AC7 ------------------------------------------------------------------


def _random_partition(rng, universe):
    k = rng.randint(1, len(universe))
    return Partition.from_indices(
        universe, _groups([rng.randrange(k) for _ in universe])
    )


def _groups(keys):
    out = {}
    for i, k in enumerate(keys):
        out.setdefault(k, []).append(i)
    return list(out.values())


@criterion("AC7")
def test_ac7_property_suites():
    start = time.perf_counter()
    rng = random.Random(2024)

    for _ in range(1000):
        universe = make_universe(f"x{i + 1}" for i in range(rng.randint(1, 12)))
        p, q, r = (_random_partition(rng, universe) for _ in range(3))
        pq = meet(p, q)
        assert pq == meet(q, p)
        assert meet(pq, r) == meet(p, meet(q, r))
        assert meet(p, p) == p
        assert pq.refines(p) and pq.refines(q)
        assert as_sets(pq) == oracle.meet_blocks(as_sets(p), as_sets(q))

    for _ in range(200):
        n = rng.randint(1, 12)
        grid = DEFAULT_GRID[: rng.randint(1, 3)]
        sys_ = random_system(n, 1, value_grid=grid, seed=rng)
        R = sys_.relations[0]
        assert as_sets(row_partition(R, sys_.universe)) == oracle.row_blocks(sys_.labels, [R.matrix])

    for _ in range(200):
        n = rng.randint(1, 14)
        sys_ = gen_pullback(rng.randint(1, n), n, rng.randint(1, 5), seed=rng)
        c = compress(sys_)
        for R in sys_.relations:
            assert inverse_image_relation(c.map, image_relation(c.map, R)) == R

    for _ in range(200):
        sys_ = random_system(rng.randint(1, 14), rng.randint(1, 5), seed=rng)
        c = compress(sys_)
        for R in sys_.relations:
            back = inverse_image_relation(c.map, image_relation(c.map, R))
            assert all(b >= a for rb, ra in zip(back.matrix, R.matrix) for b, a in zip(rb, ra))

    assert time.perf_counter() - start < 30


# --- AC8 ------------------------------------------------------------------


@criterion("AC8")
def test_ac8_printed_r3_partition(literal):
    p = row_partition(literal.relation("R3"), literal.universe)
    assert as_sets(p) == W.LITERAL_R3_BLOCKS
    assert frozenset({"x1", "x4", "x7", "x8"}) not in as_sets(p)


@criterion("AC8")
def test_ac8_printed_r1_inconsistent(literal):
    report = is_consistent(example_map(literal.universe), literal.relation("R1"))
    assert not report.consistent
    w = report.violations[0]
    assert (w.first[:2], w.second[:2]) == (("x2", "x4"), ("x2", "x8"))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
