"""Value, relation, system and partition types.

Fuzzy values are exact :class:`~decimal.Decimal` numbers. Row-equality
partitions are computed by exact comparison, so binary floats are never
stored; a float handed to a constructor is converted through its shortest
``repr`` first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence, Union

DEFAULT_SCALE = 4

FuzzyValue = Decimal
Matrix = tuple[tuple[Decimal, ...], ...]

ZERO = Decimal(0)
ONE = Decimal(1)


class FuzzyValueError(ValueError):
    """A value is not a valid fuzzy membership degree."""


class UnknownObjectError(LookupError):
    def __init__(self, label: str):
        super().__init__(f"unknown object {label!r}")
        self.label = label


class InvalidSystemError(ValueError):
    def __init__(self, violations: Sequence["Violation"]):
        self.violations = tuple(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid relation system: {lines}")


def _as_decimal(raw) -> Decimal:
    if isinstance(raw, bool):
        raise FuzzyValueError(f"not a number: {raw!r}")
    if isinstance(raw, Decimal):
        return raw
    if isinstance(raw, float):
        raw = repr(raw)
    try:
        return Decimal(str(raw).strip())
    except InvalidOperation:
        raise FuzzyValueError(f"not a decimal number: {raw!r}") from None


def fractional_digits(value: Decimal) -> int:
    exponent = value.as_tuple().exponent
    return max(0, -exponent) if isinstance(exponent, int) else 0


def fuzzy_value(raw, *, scale: int = DEFAULT_SCALE) -> Decimal:
    """Parse ``raw`` into an exact value in [0, 1] with at most ``scale`` fractional digits."""
    value = _as_decimal(raw)
    if not value.is_finite():
        raise FuzzyValueError(f"not a finite number: {raw!r}")
    if not ZERO <= value <= ONE:
        raise FuzzyValueError(f"value {value} outside [0, 1]")
    if fractional_digits(value) > scale:
        raise FuzzyValueError(f"value {value} has more than {scale} fractional digits")
    return value


@dataclass(frozen=True, order=True)
class ObjectId:
    index: int
    label: str

    def __str__(self) -> str:
        return self.label


LabelLike = Union[str, ObjectId]


def make_universe(labels: Iterable[LabelLike]) -> tuple[ObjectId, ...]:
    return tuple(
        ObjectId(i, x.label if isinstance(x, ObjectId) else str(x)) for i, x in enumerate(labels)
    )


def _label(x: LabelLike) -> str:
    return x.label if isinstance(x, ObjectId) else x


@dataclass(frozen=True)
class FuzzyRelation:
    """A named square grid of membership values over an ordered universe.

    The constructor only coerces entries to ``Decimal``; shape and range are
    checked by :func:`validate_system` so that bad input can be reported
    rather than rejected on sight.
    """

    name: str
    matrix: Matrix

    def __post_init__(self):
        object.__setattr__(
            self, "matrix", tuple(tuple(_as_decimal(v) for v in row) for row in self.matrix)
        )

    @property
    def size(self) -> int:
        return len(self.matrix)

    @property
    def is_square(self) -> bool:
        n = len(self.matrix)
        return all(len(row) == n for row in self.matrix)

    def __getitem__(self, ij: tuple[int, int]) -> Decimal:
        i, j = ij
        return self.matrix[i][j]

    def row(self, i: int) -> tuple[Decimal, ...]:
        return self.matrix[i]

    def column(self, j: int) -> tuple[Decimal, ...]:
        return tuple(row[j] for row in self.matrix)

    def submatrix(self, indices: Sequence[int]) -> "FuzzyRelation":
        return FuzzyRelation(
            self.name, tuple(tuple(self.matrix[i][j] for j in indices) for i in indices)
        )

    def renamed(self, name: str) -> "FuzzyRelation":
        return FuzzyRelation(name, self.matrix)

    @classmethod
    def constant(cls, name: str, n: int, value) -> "FuzzyRelation":
        v = _as_decimal(value)
        return cls(name, tuple((v,) * n for _ in range(n)))


@dataclass(frozen=True)
class RelationSystem:
    """An ordered universe with an ordered family of named fuzzy relations."""

    universe: tuple[ObjectId, ...]
    relations: tuple[FuzzyRelation, ...] = ()

    def __post_init__(self):
        universe = tuple(self.universe)
        if any(not isinstance(x, ObjectId) for x in universe):
            universe = make_universe(universe)
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "relations", tuple(self.relations))

    @classmethod
    def from_matrices(
        cls, labels: Iterable[LabelLike], relations: Mapping[str, Sequence[Sequence]]
    ) -> "RelationSystem":
        return cls(
            make_universe(labels),
            tuple(FuzzyRelation(name, m) for name, m in relations.items()),
        )

    @property
    def n(self) -> int:
        return len(self.universe)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(x.label for x in self.universe)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.relations)

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {x.label: i for i, x in enumerate(self.universe)}

    @cached_property
    def _by_name(self) -> dict[str, FuzzyRelation]:
        return {r.name: r for r in self.relations}

    def index_of(self, x: LabelLike) -> int:
        try:
            return self._positions[_label(x)]
        except KeyError:
            raise UnknownObjectError(_label(x)) from None

    def relation(self, name: str) -> FuzzyRelation:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown relation {name!r}") from None

    def with_relations(self, relations: Iterable[FuzzyRelation]) -> "RelationSystem":
        return RelationSystem(self.universe, tuple(relations))

    def restrict(self, keep: Iterable[LabelLike]) -> "RelationSystem":
        """Sub-system on ``keep`` (universe order is preserved, indices renumbered)."""
        wanted = {_label(x) for x in keep}
        for lab in wanted:
            self.index_of(lab)
        idx = [i for i, x in enumerate(self.universe) if x.label in wanted]
        return RelationSystem(
            make_universe(self.universe[i].label for i in idx),
            tuple(r.submatrix(idx) for r in self.relations),
        )


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by :func:`validate_system`."""

    kind: str
    where: str
    detail: str

    def __str__(self) -> str:
        return f"{self.where}: {self.kind}: {self.detail}"


def validate_system(sys: RelationSystem, *, scale: int = DEFAULT_SCALE) -> list[Violation]:
    """Every invariant violation in ``sys``; an empty list means valid."""
    out: list[Violation] = []
    n = len(sys.universe)
    if n == 0:
        out.append(Violation("empty-universe", "universe", "at least one object required"))
    seen: set[str] = set()
    for pos, x in enumerate(sys.universe):
        if not x.label:
            out.append(Violation("empty-label", f"universe[{pos}]", "labels must be nonempty"))
        elif x.label in seen:
            out.append(Violation("duplicate-label", f"universe[{pos}]", f"label {x.label!r} repeated"))
        seen.add(x.label)
        if x.index != pos:
            out.append(
                Violation("index-mismatch", f"universe[{pos}]", f"{x.label!r} carries index {x.index}")
            )
    names: set[str] = set()
    for r in sys.relations:
        if r.name in names:
            out.append(Violation("duplicate-name", r.name, "relation name repeated"))
        names.add(r.name)
        rows = len(r.matrix)
        widths = {len(row) for row in r.matrix}
        if rows != n or widths - {n}:
            shape = f"{rows}x{'/'.join(str(w) for w in sorted(widths)) or 0}"
            out.append(Violation("shape", r.name, f"matrix is {shape}, expected {n}x{n}"))
        for i, row in enumerate(r.matrix):
            for j, v in enumerate(row):
                try:
                    fuzzy_value(v, scale=scale)
                except FuzzyValueError as exc:
                    out.append(Violation("value", f"{r.name}[{i}][{j}]", str(exc)))
    return out


def check_system(sys: RelationSystem) -> RelationSystem:
    violations = validate_system(sys)
    if violations:
        raise InvalidSystemError(violations)
    return sys


@dataclass(frozen=True)
class Block:
    members: tuple[ObjectId, ...]

    def __post_init__(self):
        members = tuple(sorted(set(self.members)))
        if not members:
            raise ValueError("a block must be nonempty")
        object.__setattr__(self, "members", members)

    def __iter__(self) -> Iterator[ObjectId]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x) -> bool:
        lab = _label(x)
        return any(m.label == lab for m in self.members)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(m.label for m in self.members)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(m.index for m in self.members)

    @property
    def first(self) -> ObjectId:
        return self.members[0]

    def __str__(self) -> str:
        return "{" + ", ".join(self.labels) + "}"


@dataclass(frozen=True)
class Partition:
    """Disjoint blocks covering ``universe``, sorted by least member index."""

    universe: tuple[ObjectId, ...]
    blocks: tuple[Block, ...] = field(default=())

    def __post_init__(self):
        blocks = tuple(b if isinstance(b, Block) else Block(tuple(b)) for b in self.blocks)
        blocks = tuple(sorted(blocks, key=lambda b: b.first.index))
        covered = [m for b in blocks for m in b]
        if len(covered) != len(set(covered)):
            raise ValueError("blocks overlap")
        if set(covered) != set(self.universe):
            raise ValueError("blocks do not cover the universe exactly")
        object.__setattr__(self, "universe", tuple(self.universe))
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_indices(cls, universe: Sequence[ObjectId], blocks: Iterable[Iterable[int]]) -> "Partition":
        return cls(tuple(universe), tuple(Block(tuple(universe[i] for i in b)) for b in blocks))

    @classmethod
    def from_labels(cls, universe: Sequence[ObjectId], blocks: Iterable[Iterable[str]]) -> "Partition":
        pos = {x.label: x for x in universe}
        try:
            return cls(tuple(universe), tuple(Block(tuple(pos[lab] for lab in b)) for b in blocks))
        except KeyError as exc:
            raise UnknownObjectError(exc.args[0]) from None

    @classmethod
    def discrete(cls, universe: Sequence[ObjectId]) -> "Partition":
        return cls.from_indices(universe, ([i] for i in range(len(universe))))

    @classmethod
    def indiscrete(cls, universe: Sequence[ObjectId]) -> "Partition":
        return cls.from_indices(universe, [range(len(universe))])

    @cached_property
    def block_index(self) -> tuple[int, ...]:
        """``block_index[i]`` is the position of the block holding object ``i``."""
        out = [0] * len(self.universe)
        for k, b in enumerate(self.blocks):
            for m in b:
                out[m.index] = k
        return tuple(out)

    @cached_property
    def _label_block(self) -> dict[str, int]:
        return {m.label: k for k, b in enumerate(self.blocks) for m in b}

    def block_position(self, x: LabelLike) -> int:
        try:
            return self._label_block[_label(x)]
        except KeyError:
            raise UnknownObjectError(_label(x)) from None

    def label_sets(self) -> list[frozenset[str]]:
        return [frozenset(b.labels) for b in self.blocks]

    def as_labels(self) -> list[list[str]]:
        return [list(b.labels) for b in self.blocks]

    def refines(self, other: "Partition") -> bool:
        return all(len({other.block_index[i] for i in b.indices}) == 1 for b in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[Block]:
        return iter(self.blocks)

    def __str__(self) -> str:
        return "{" + ", ".join(str(b) for b in self.blocks) + "}"


def block_of(p: Partition, x: LabelLike) -> Block:
    """The block of ``p`` containing ``x``."""
    return p.blocks[p.block_position(x)]
