"""Incremental maintenance of a compression under relation and object edits.

Every edit returns a new :class:`CompressionState` equal (up to image
renaming) to compressing the edited system from scratch. Object edits run
the two-stage incremental procedure and then check its partition (and, for
deletions, its restricted image matrices) against the exact per-relation
partitions, which are cheap to refresh from the cache. When the check fails
the state is recompressed from scratch and the trace says so.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable, Mapping, Sequence

from .core import (
    FuzzyRelation,
    LabelLike,
    Partition,
    RelationSystem,
    check_system,
    fuzzy_value,
    make_universe,
)
from .homomorphism import (
    CompressedSystem,
    QuotientMap,
    build_compressed,
    image_relation,
    is_consistent,
    quotient_map,
)
from .partitioning import (
    Mode,
    PartitionCache,
    check_mode,
    count_partitions,
    meet_all,
    partition_by_key,
    record_partition_computation,
    relation_partition,
    system_partition,
)


class EditError(ValueError):
    """An edit payload does not fit the state it is applied to."""


@dataclass(frozen=True, kw_only=True)
class EditTrace:
    kind: str
    fallback: bool = False
    reason: str | None = None
    partitions_computed: int = 0


@dataclass(frozen=True, kw_only=True)
class AddObjectsTrace(EditTrace):
    delta_per_relation: dict[str, Partition] = field(default_factory=dict)
    delta: Partition | None = None
    g: QuotientMap | None = None
    s3: RelationSystem | None = None
    h: QuotientMap | None = None
    s4: RelationSystem | None = None


@dataclass(frozen=True, kw_only=True)
class RemoveObjectsTrace(EditTrace):
    deleted_classes: dict[str, frozenset[str]] = field(default_factory=dict)
    dropped: tuple[str, ...] = ()
    s5: RelationSystem | None = None
    h: QuotientMap | None = None
    s6: RelationSystem | None = None


@dataclass(frozen=True)
class CompressionState(CompressedSystem):
    trace: EditTrace | None = None

    __hash__ = CompressedSystem.__hash__

    @property
    def fallback(self) -> bool:
        return self.trace is not None and self.trace.fallback


def compress_state(
    sys: RelationSystem,
    mode: Mode = "row",
    *,
    epsilon: Decimal | None = None,
    image_prefix: str = "y",
) -> CompressionState:
    check_system(sys)
    cache = system_partition(sys, check_mode(mode), epsilon=epsilon)
    return build_compressed(sys, cache, epsilon=epsilon, image_prefix=image_prefix, cls=CompressionState)


def _assemble(
    source: RelationSystem, cache: PartitionCache, like: CompressedSystem, prefix: str, trace: EditTrace
) -> CompressionState:
    return build_compressed(
        source, cache, epsilon=like.epsilon, image_prefix=prefix, cls=CompressionState, trace=trace
    )


def _finish(state: CompressionState, trace: EditTrace, count: int) -> CompressionState:
    return dataclasses.replace(state, trace=dataclasses.replace(trace, partitions_computed=count))


def _recompress(source: RelationSystem, like: CompressedSystem, prefix: str, trace: EditTrace) -> CompressionState:
    fresh = compress_state(source, like.mode, epsilon=like.epsilon, image_prefix=prefix)
    return dataclasses.replace(fresh, trace=trace)


def _signature(R: FuzzyRelation, i: int, strict: bool) -> tuple:
    return R.row(i) + R.column(i) if strict else R.row(i)


def _merge_pure_blocks(p: Partition, R: FuzzyRelation, strict: bool) -> Partition:
    """Merge blocks whose members all share a signature into the exact partition of ``R``."""
    groups: dict[tuple, list[int]] = {}
    for k, b in enumerate(p.blocks):
        groups.setdefault(_signature(R, b.first.index, strict), []).append(k)
    return Partition.from_indices(
        p.universe, ([i for k in ks for i in p.blocks[k].indices] for ks in groups.values())
    )


# --- relation edits -------------------------------------------------------


def add_relations(
    state: CompressionState, new_relations: Iterable[FuzzyRelation], *, image_prefix: str | None = None
) -> CompressionState:
    """Append relations, computing partitions for the new ones only."""
    prefix = image_prefix or state.image_prefix
    new = tuple(new_relations)
    existing = set(state.source.names)
    seen: set[str] = set()
    for R in new:
        if R.name in existing or R.name in seen:
            raise EditError(f"relation {R.name} already present")
        seen.add(R.name)
    source = state.source.with_relations(state.source.relations + new)
    check_system(source)
    trace = EditTrace(kind="add-relations")
    with count_partitions() as tally:
        per = dict(state.cache.per_relation)
        added = [relation_partition(R, source.universe, state.mode, epsilon=state.epsilon) for R in new]
        per.update((R.name, p) for R, p in zip(new, added))
        combined = meet_all([state.cache.combined, *added], source.universe)
        cache = PartitionCache(per, combined, state.mode)
        if combined == state.cache.combined and prefix == state.image_prefix:
            f = state.map
            image = state.image.with_relations(
                state.image.relations + tuple(image_relation(f, R) for R in new)
            )
            reports = dict(state.consistency)
            reports.update((R.name, is_consistent(f, R, epsilon=state.epsilon)) for R in new)
            out = CompressionState(
                source, image, f, cache, reports, state.mode, state.epsilon, prefix, trace
            )
        else:
            out = _assemble(source, cache, state, prefix, trace)
    return _finish(out, trace, tally.count)


def remove_relations(
    state: CompressionState, names: Iterable[str], *, image_prefix: str | None = None
) -> CompressionState:
    """Drop relations and re-meet the cached partitions of the rest."""
    prefix = image_prefix or state.image_prefix
    drop = set(names)
    unknown = sorted(drop - set(state.source.names))
    if unknown:
        raise EditError(f"unknown relations: {', '.join(unknown)}")
    remaining = tuple(R for R in state.source.relations if R.name not in drop)
    if not remaining:
        raise EditError("cannot remove every relation")
    source = state.source.with_relations(remaining)
    trace = EditTrace(kind="remove-relations")
    with count_partitions() as tally:
        per = {k: p for k, p in state.cache.per_relation.items() if k not in drop}
        combined = meet_all(per.values(), source.universe)
        cache = PartitionCache(per, combined, state.mode)
        if combined == state.cache.combined and prefix == state.image_prefix:
            image = state.image.with_relations(R for R in state.image.relations if R.name not in drop)
            reports = {k: r for k, r in state.consistency.items() if k not in drop}
            out = CompressionState(
                source, image, state.map, cache, reports, state.mode, state.epsilon, prefix, trace
            )
        else:
            out = _assemble(source, cache, state, prefix, trace)
    return _finish(out, trace, tally.count)


# --- object edits ---------------------------------------------------------


@dataclass(frozen=True)
class ObjectExtension:
    """New objects plus, per relation, the two blocks of new matrix entries.

    ``part2[name]`` holds old-rows x new-columns (n x t) and ``part3[name]``
    holds new-rows x all-columns (t x (n + t)), columns in universe order
    with the new objects last.
    """

    new_objects: tuple[str, ...]
    part2: Mapping[str, Sequence[Sequence]]
    part3: Mapping[str, Sequence[Sequence]]

    def __post_init__(self):
        object.__setattr__(self, "new_objects", tuple(self.new_objects))
        conv = lambda m: tuple(tuple(fuzzy_value(v) for v in row) for row in m)  # noqa: E731
        object.__setattr__(self, "part2", {k: conv(m) for k, m in self.part2.items()})
        object.__setattr__(self, "part3", {k: conv(m) for k, m in self.part3.items()})


def check_extension(sys: RelationSystem, ext: ObjectExtension) -> None:
    n, t = sys.n, len(ext.new_objects)
    labels = set(sys.labels)
    if len(set(ext.new_objects)) != t:
        raise EditError("new object labels repeat")
    for lab in ext.new_objects:
        if not lab:
            raise EditError("new object labels must be nonempty")
        if lab in labels:
            raise EditError(f"object {lab} already in the universe")
    for part, want in (("part2", (n, t)), ("part3", (t, n + t))):
        blocks = getattr(ext, part)
        if set(blocks) != set(sys.names):
            missing = sorted(set(sys.names) - set(blocks))
            extra = sorted(set(blocks) - set(sys.names))
            raise EditError(f"{part} relations mismatch (missing {missing}, unexpected {extra})")
        for name, m in blocks.items():
            shape = (len(m), len(m[0]) if m else want[1])
            if shape != want or any(len(row) != want[1] for row in m):
                raise EditError(f"{part} of {name} is not {want[0]}x{want[1]}")


def extend_system(sys: RelationSystem, ext: ObjectExtension) -> RelationSystem:
    """The system with ``ext``'s objects appended."""
    check_extension(sys, ext)
    rels = []
    for R in sys.relations:
        p2, p3 = ext.part2[R.name], ext.part3[R.name]
        rows = tuple(R.row(i) + tuple(p2[i]) for i in range(sys.n)) + tuple(tuple(r) for r in p3)
        rels.append(FuzzyRelation(R.name, rows))
    return RelationSystem(make_universe(sys.labels + ext.new_objects), tuple(rels))


def _compose(g: QuotientMap, h: QuotientMap) -> Partition:
    return Partition.from_indices(
        g.source_universe,
        ([i for z in hb.indices for i in g.partition.blocks[z].indices] for hb in h.partition),
    )


def add_objects(
    state: CompressionState,
    ext: ObjectExtension,
    *,
    intermediate_prefix: str = "z",
    image_prefix: str | None = None,
) -> CompressionState:
    """Append objects with the two-stage procedure.

    Stage 1 splits each relation's cached blocks by the new columns (old
    objects) and groups the new objects by their full rows, meets those per
    relation partitions, and quotients by the result (map ``g``, system S3).
    Stage 2 compresses S3 (map ``h``, system S4).
    """
    prefix = image_prefix or state.image_prefix
    if not ext.new_objects:
        return dataclasses.replace(state, trace=AddObjectsTrace(kind="add-objects"))
    source = extend_system(state.source, ext)
    check_system(source)
    n, total = state.source.n, source.n
    strict = state.mode == "strict"
    with count_partitions() as tally:
        if state.epsilon is not None:
            trace = AddObjectsTrace(kind="add-objects", fallback=True, reason="epsilon mode")
            return _finish(_recompress(source, state, prefix, trace), trace, tally.count)

        delta_per: dict[str, Partition] = {}
        for R in source.relations:
            cached = state.cache.per_relation[R.name].block_index
            keys = []
            for i in range(n):
                key = (0, cached[i], R.row(i)[n:])
                if strict:
                    key += (R.column(i)[n:],)
                keys.append(key)
            for j in range(n, total):
                keys.append((1, _signature(R, j, strict)))
            delta_per[R.name] = partition_by_key(source.universe, keys)
        delta = meet_all(delta_per.values(), source.universe)
        g = quotient_map(source.universe, delta, intermediate_prefix)
        s3 = RelationSystem(g.image_universe, tuple(image_relation(g, R) for R in source.relations))
        h = quotient_map(s3.universe, system_partition(s3, state.mode).combined, prefix)
        s4 = RelationSystem(h.image_universe, tuple(image_relation(h, R) for R in s3.relations))
        incremental = _compose(g, h)

        per = {R.name: _merge_pure_blocks(delta_per[R.name], R, strict) for R in source.relations}
        exact = meet_all(per.values(), source.universe)
        stages = dict(delta_per_relation=delta_per, delta=delta, g=g, s3=s3, h=h, s4=s4)
        if exact != incremental:
            trace = AddObjectsTrace(
                kind="add-objects",
                fallback=True,
                reason="stage-2 merge joined objects whose rows differ",
                **stages,
            )
            return _finish(_recompress(source, state, prefix, trace), trace, tally.count)

        trace = AddObjectsTrace(kind="add-objects", **stages)
        cache = PartitionCache(per, exact, state.mode)
        f = quotient_map(source.universe, exact, prefix)
        # canonical block order survives composition, so S4 already has f's labels
        image = RelationSystem(f.image_universe, s4.relations)
        reports = {R.name: is_consistent(f, R) for R in source.relations}
        out = CompressionState(source, image, f, cache, reports, state.mode, None, prefix, trace)
    return _finish(out, trace, tally.count)


def _images_agree(
    incremental: RelationSystem, blocks: Sequence[frozenset[str]], candidate: CompressedSystem
) -> bool:
    where = {b: k for k, b in enumerate(candidate.map.partition.label_sets())}
    try:
        pos = [where[b] for b in blocks]
    except KeyError:
        return False
    for R, C in zip(incremental.relations, candidate.image.relations):
        for a, pa in enumerate(pos):
            for b, pb in enumerate(pos):
                if R.matrix[a][b] != C.matrix[pa][pb]:
                    return False
    return True


def remove_objects(
    state: CompressionState, deleted: Iterable[LabelLike], *, image_prefix: str | None = None
) -> CompressionState:
    """Delete objects, dropping image objects whose whole class is deleted.

    The kept image objects carry their old matrix entries (S5), which are
    then compressed again (map ``h``, system S6).
    """
    prefix = image_prefix or state.image_prefix
    src = state.source
    gone = set()
    for x in deleted:
        lab = x if isinstance(x, str) else x.label
        src.index_of(lab)
        gone.add(lab)
    if not gone:
        return dataclasses.replace(state, trace=RemoveObjectsTrace(kind="remove-objects"))
    survivors = [lab for lab in src.labels if lab not in gone]
    if not survivors:
        raise EditError("cannot delete every object")
    shrunk = src.restrict(survivors)
    strict = state.mode == "strict"
    with count_partitions() as tally:
        if state.epsilon is not None:
            trace = RemoveObjectsTrace(kind="remove-objects", fallback=True, reason="epsilon mode")
            return _finish(_recompress(shrunk, state, prefix, trace), trace, tally.count)

        f = state.map
        gone_idx = [i for i, lab in enumerate(src.labels) if lab in gone]
        keys = [tuple(_signature(R, i, strict) for R in src.relations) for i in gone_idx]
        sub = make_universe(src.labels[i] for i in gone_idx)
        classes = {
            lab: frozenset(b.labels) for b in partition_by_key(sub, keys) for lab in b.labels
        }
        dropped: list[str] = []
        for lab in (src.labels[i] for i in gone_idx):
            y = f(lab)
            if classes[lab] == frozenset(f.preimage(y).labels) and y not in dropped:
                dropped.append(y)
        kept = [y for y in state.image.labels if y not in dropped]
        s5 = state.image.restrict(kept)
        h = quotient_map(s5.universe, system_partition(s5, state.mode).combined, prefix)
        s6 = RelationSystem(h.image_universe, tuple(image_relation(h, R) for R in s5.relations))
        alive = set(survivors)
        incremental = [
            frozenset(lab for y in hb.labels for lab in f.preimage(y).labels if lab in alive)
            for hb in h.partition
        ]

        per = {}
        for R in shrunk.relations:
            old = state.cache.per_relation[R.name]
            restricted = [[lab for lab in b.labels if lab in alive] for b in old]
            p = Partition.from_labels(shrunk.universe, [b for b in restricted if b])
            per[R.name] = _merge_pure_blocks(p, R, strict)
        exact = meet_all(per.values(), shrunk.universe)
        stages = dict(
            deleted_classes=classes, dropped=tuple(dropped), s5=s5, h=h, s6=s6
        )
        trace = RemoveObjectsTrace(kind="remove-objects", **stages)
        candidate = _assemble(shrunk, PartitionCache(per, exact, state.mode), state, prefix, trace)
        if set(exact.label_sets()) != set(incremental) or not _images_agree(s6, incremental, candidate):
            trace = dataclasses.replace(
                trace, fallback=True, reason="restricted image differs from the surviving objects"
            )
            return _finish(_recompress(shrunk, state, prefix, trace), trace, tally.count)
    return _finish(candidate, trace, tally.count)


# --- oracle and comparison ------------------------------------------------


def scratch_oracle(sys: RelationSystem, mode: Mode = "row", *, image_prefix: str = "y") -> CompressedSystem:
    """Full recompression by direct pairwise comparison, sharing no code with the cached path."""
    check_system(sys)
    strict = check_mode(mode) == "strict"
    n, universe = sys.n, sys.universe

    def same(R: FuzzyRelation, x: int, y: int) -> bool:
        m = R.matrix
        if any(m[x][z] != m[y][z] for z in range(n)):
            return False
        return not strict or all(m[z][x] == m[z][y] for z in range(n))

    def classes(rels: Sequence[FuzzyRelation]) -> list[list[int]]:
        out: list[list[int]] = []
        for x in range(n):
            for blk in out:
                if all(same(R, x, blk[0]) for R in rels):
                    blk.append(x)
                    break
            else:
                out.append([x])
        return out

    per = {}
    for R in sys.relations:
        record_partition_computation()
        per[R.name] = Partition.from_indices(universe, classes([R]))
    blocks = classes(sys.relations)
    combined = Partition.from_indices(universe, blocks)
    image_universe = make_universe(f"{image_prefix}{k + 1}" for k in range(len(blocks)))
    assignment = {universe[i].label: image_universe[k].label for k, b in enumerate(blocks) for i in b}
    f = QuotientMap(universe, image_universe, assignment, combined)
    image = RelationSystem(
        image_universe,
        tuple(
            FuzzyRelation(
                R.name,
                tuple(tuple(max(R.matrix[u][v] for u in a for v in b) for b in blocks) for a in blocks),
            )
            for R in sys.relations
        ),
    )
    reports = {R.name: is_consistent(f, R) for R in sys.relations}
    return CompressedSystem(
        sys, image, f, PartitionCache(per, combined, mode), reports, mode, None, image_prefix
    )


def equivalent(a: CompressedSystem, b: CompressedSystem) -> bool:
    """Same image up to renaming: blocks match by their source members and matrices agree."""
    if a.image.names != b.image.names:
        return False
    ba, bb = a.map.partition.label_sets(), b.map.partition.label_sets()
    if len(ba) != len(bb) or set(ba) != set(bb):
        return False
    where = {blk: k for k, blk in enumerate(bb)}
    pos = [where[blk] for blk in ba]
    for Ra, Rb in zip(a.image.relations, b.image.relations):
        if Ra.size != len(pos) or Rb.size != len(pos):
            return False
        for i, pi in enumerate(pos):
            ra, rb = Ra.matrix[i], Rb.matrix[pi]
            if any(ra[j] != rb[pj] for j, pj in enumerate(pos)):
                return False
    return True


def cache_is_exact(state: CompressedSystem) -> bool:
    """Does the cached per-relation partition of every relation match a recomputation?"""
    if list(state.cache.per_relation) != list(state.source.names):
        return False
    fresh = system_partition(state.source, state.mode, epsilon=state.epsilon)
    return fresh.per_relation == state.cache.per_relation and fresh.combined == state.cache.combined
