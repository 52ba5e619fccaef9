"""Quotient maps, consistency checks, and image / inverse-image relations."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from functools import cached_property
from typing import Sequence

from .core import (
    Block,
    FuzzyRelation,
    ObjectId,
    Partition,
    RelationSystem,
    check_system,
    make_universe,
)
from .partitioning import Mode, PartitionCache, check_mode, system_partition


class UniverseMismatchError(ValueError):
    """A relation's dimension does not match the universe it is applied to."""


@dataclass(frozen=True)
class QuotientMap:
    """Surjection sending every object to the image object of its block.

    Image object ``k`` (``prefix + str(k + 1)``) stands for ``partition.blocks[k]``.
    """

    source_universe: tuple[ObjectId, ...]
    image_universe: tuple[ObjectId, ...]
    assignment: dict[str, str]
    partition: Partition

    def __hash__(self):
        return hash((self.source_universe, self.image_universe, self.partition))

    def __call__(self, x) -> str:
        label = x.label if isinstance(x, ObjectId) else x
        return self.assignment[label]

    @cached_property
    def _image_position(self) -> dict[str, int]:
        return {y.label: k for k, y in enumerate(self.image_universe)}

    def preimage(self, y) -> Block:
        label = y.label if isinstance(y, ObjectId) else y
        return self.partition.blocks[self._image_position[label]]

    def blocks_by_image(self) -> dict[str, frozenset[str]]:
        return {y.label: frozenset(b.labels) for y, b in zip(self.image_universe, self.partition)}


def quotient_map(universe: Sequence[ObjectId], p: Partition, image_label_prefix: str = "y") -> QuotientMap:
    if tuple(universe) != p.universe:
        raise UniverseMismatchError("partition is not over the given universe")
    image = make_universe(f"{image_label_prefix}{k + 1}" for k in range(len(p.blocks)))
    assignment = {m.label: image[k].label for k, b in enumerate(p.blocks) for m in b}
    return QuotientMap(tuple(universe), image, assignment, p)


@dataclass(frozen=True)
class InconsistencyWitness:
    relation: str
    blocks: tuple[Block, Block]
    first: tuple[str, str, Decimal]
    second: tuple[str, str, Decimal]

    def __str__(self) -> str:
        (u, v, a), (s, t, b) = self.first, self.second
        return (
            f"{self.relation} on {self.blocks[0]} x {self.blocks[1]}: "
            f"{self.relation}({u},{v})={a} != {self.relation}({s},{t})={b}"
        )


@dataclass(frozen=True)
class ConsistencyReport:
    relation: str
    violations: tuple[InconsistencyWitness, ...] = field(default=())

    @property
    def consistent(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.consistent


def _check_dim(R: FuzzyRelation, n: int, what: str) -> None:
    if R.size != n or not R.is_square:
        raise UniverseMismatchError(f"relation {R.name} is not {n}x{n} ({what})")


def _equal(a: Decimal, b: Decimal, epsilon: Decimal | None) -> bool:
    return a == b if epsilon is None else abs(a - b) <= epsilon


def is_consistent(f: QuotientMap, R: FuzzyRelation, *, epsilon: Decimal | None = None) -> ConsistencyReport:
    """Is ``R`` constant on every product of two blocks of ``f``?

    Each offending block pair contributes one witness: the first cell of the
    pair (row-major) and the first cell that differs from it.
    """
    _check_dim(R, len(f.source_universe), "source universe")
    labels = [x.label for x in f.source_universe]
    out = []
    for a in f.partition:
        for b in f.partition:
            u0, v0 = a.indices[0], b.indices[0]
            ref = R.matrix[u0][v0]
            bad = None
            for u in a.indices:
                row = R.matrix[u]
                for v in b.indices:
                    val = row[v]
                    if not _equal(val, ref, epsilon):
                        bad = (u, v, val)
                        break
                if bad:
                    break
            if bad:
                out.append(
                    InconsistencyWitness(
                        R.name,
                        (a, b),
                        (labels[u0], labels[v0], ref),
                        (labels[bad[0]], labels[bad[1]], bad[2]),
                    )
                )
    return ConsistencyReport(R.name, tuple(out))


def image_relation(f: QuotientMap, R: FuzzyRelation) -> FuzzyRelation:
    """Entry (a, b) is the max of ``R`` over the preimage blocks of a and b."""
    _check_dim(R, len(f.source_universe), "source universe")
    blocks = [b.indices for b in f.partition]
    m = R.matrix
    # max over columns first, then over the rows of each block
    col_max = [[max(row[v] for v in b) for b in blocks] for row in m]
    return FuzzyRelation(
        R.name,
        tuple(
            tuple(max(col_max[u][k] for u in a) for k in range(len(blocks))) for a in blocks
        ),
    )


def inverse_image_relation(f: QuotientMap, T: FuzzyRelation) -> FuzzyRelation:
    """Pull ``T`` back along ``f``: entry (u, v) is T(f(u), f(v))."""
    _check_dim(T, len(f.image_universe), "image universe")
    idx = f.partition.block_index
    return FuzzyRelation(T.name, tuple(tuple(T.matrix[a][b] for b in idx) for a in idx))


@dataclass(frozen=True)
class CompressedSystem:
    source: RelationSystem
    image: RelationSystem
    map: QuotientMap
    cache: PartitionCache
    consistency: dict[str, ConsistencyReport]
    mode: Mode = "row"
    epsilon: Decimal | None = None
    image_prefix: str = "y"

    def __hash__(self):
        return hash((self.source, self.image, self.map, self.mode))

    @property
    def consistent(self) -> bool:
        """True iff the quotient map is a homomorphism for every relation."""
        return all(r.consistent for r in self.consistency.values())


def build_compressed(
    source: RelationSystem,
    cache: PartitionCache,
    *,
    epsilon: Decimal | None = None,
    image_prefix: str = "y",
    cls=CompressedSystem,
    **extra,
) -> CompressedSystem:
    """Assemble the map, image and consistency reports for a known cache."""
    f = quotient_map(source.universe, cache.combined, image_prefix)
    image = RelationSystem(f.image_universe, tuple(image_relation(f, R) for R in source.relations))
    reports = {R.name: is_consistent(f, R, epsilon=epsilon) for R in source.relations}
    return cls(source, image, f, cache, reports, cache.mode, epsilon, image_prefix, **extra)


def compress(
    sys: RelationSystem,
    mode: Mode = "row",
    *,
    epsilon: Decimal | None = None,
    image_prefix: str = "y",
) -> CompressedSystem:
    """Quotient ``sys`` by its combined partition and map every relation to the image."""
    check_system(sys)
    cache = system_partition(sys, check_mode(mode), epsilon=epsilon)
    return build_compressed(sys, cache, epsilon=epsilon, image_prefix=image_prefix)
