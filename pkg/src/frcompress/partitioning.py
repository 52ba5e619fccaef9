"""Per-relation row partitions, their meet, and the cached system partition."""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from decimal import Decimal
from typing import Hashable, Iterable, Iterator, Literal, Sequence

from .core import FuzzyRelation, ObjectId, Partition, RelationSystem, make_universe

Mode = Literal["row", "strict"]
MODES: tuple[str, ...] = ("row", "strict")


class PartitionMismatchError(ValueError):
    """Two partitions are over different universes."""


@dataclass
class PartitionTally:
    count: int = 0


_active_tallies: list[PartitionTally] = []


@contextmanager
def count_partitions() -> Iterator[PartitionTally]:
    """Count full per-relation partition computations made inside the block.

    Not thread-safe; meant for tests and the benchmark.
    """
    tally = PartitionTally()
    _active_tallies.append(tally)
    try:
        yield tally
    finally:
        _active_tallies.remove(tally)


def record_partition_computation() -> None:
    for t in _active_tallies:
        t.count += 1


def check_mode(mode: str) -> Mode:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode  # type: ignore[return-value]


def partition_by_key(universe: Sequence[ObjectId], keys: Sequence[Hashable]) -> Partition:
    """Group positions with equal keys; first-seen order is already canonical."""
    groups: dict[Hashable, list[int]] = {}
    for i, k in enumerate(keys):
        groups.setdefault(k, []).append(i)
    return Partition.from_indices(universe, groups.values())


def _within(a: Sequence[Decimal], b: Sequence[Decimal], eps: Decimal) -> bool:
    return all(abs(x - y) <= eps for x, y in zip(a, b))


def _leader_partition(
    universe: Sequence[ObjectId], signatures: Sequence[Sequence[Decimal]], eps: Decimal
) -> Partition:
    # each object joins the first block whose leader (least member) is within eps
    leaders: list[int] = []
    blocks: list[list[int]] = []
    for i, sig in enumerate(signatures):
        for k, lead in enumerate(leaders):
            if _within(sig, signatures[lead], eps):
                blocks[k].append(i)
                break
        else:
            leaders.append(i)
            blocks.append([i])
    return Partition.from_indices(universe, blocks)


def _universe_for(R: FuzzyRelation, universe: Sequence[ObjectId] | None) -> Sequence[ObjectId]:
    if universe is None:
        return make_universe(f"x{i + 1}" for i in range(R.size))
    if len(universe) != R.size:
        raise PartitionMismatchError(
            f"relation {R.name} has {R.size} rows but the universe has {len(universe)} objects"
        )
    return universe


def row_partition(
    R: FuzzyRelation,
    universe: Sequence[ObjectId] | None = None,
    *,
    epsilon: Decimal | None = None,
) -> Partition:
    """Objects share a block iff their rows of ``R`` are entry-wise equal.

    With ``epsilon`` set, rows within ``epsilon`` of a block's first member
    join that block instead; the relation is then no longer transitive and
    the grouping depends on universe order.
    """
    universe = _universe_for(R, universe)
    record_partition_computation()
    if epsilon is None:
        return partition_by_key(universe, R.matrix)
    return _leader_partition(universe, R.matrix, epsilon)


def strict_partition(
    R: FuzzyRelation,
    universe: Sequence[ObjectId] | None = None,
    *,
    epsilon: Decimal | None = None,
) -> Partition:
    """Objects share a block iff both their rows and their columns agree."""
    universe = _universe_for(R, universe)
    record_partition_computation()
    signatures = [R.row(i) + R.column(i) for i in range(R.size)]
    if epsilon is None:
        return partition_by_key(universe, signatures)
    return _leader_partition(universe, signatures, epsilon)


def relation_partition(
    R: FuzzyRelation,
    universe: Sequence[ObjectId] | None = None,
    mode: Mode = "row",
    *,
    epsilon: Decimal | None = None,
) -> Partition:
    fn = row_partition if check_mode(mode) == "row" else strict_partition
    return fn(R, universe, epsilon=epsilon)


def meet(p: Partition, q: Partition) -> Partition:
    """Common refinement of ``p`` and ``q``."""
    if p.universe != q.universe:
        raise PartitionMismatchError("cannot meet partitions of different universes")
    return partition_by_key(p.universe, list(zip(p.block_index, q.block_index)))


def meet_all(partitions: Iterable[Partition], universe: Sequence[ObjectId]) -> Partition:
    """Meet of any number of partitions; the meet of none is the one-block partition."""
    out = Partition.indiscrete(universe)
    for p in partitions:
        out = meet(out, p)
    return out


@dataclass(frozen=True)
class PartitionCache:
    per_relation: dict[str, Partition]
    combined: Partition
    mode: Mode = "row"

    def __post_init__(self):
        object.__setattr__(self, "per_relation", dict(self.per_relation))

    def __hash__(self):
        return hash((tuple(self.per_relation.items()), self.combined, self.mode))


def system_partition(
    sys: RelationSystem, mode: Mode = "row", *, epsilon: Decimal | None = None
) -> PartitionCache:
    per = {
        R.name: relation_partition(R, sys.universe, mode, epsilon=epsilon) for R in sys.relations
    }
    return PartitionCache(per, meet_all(per.values(), sys.universe), mode)
