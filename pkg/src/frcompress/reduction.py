"""Attribute reduction of a fuzzy relation family.

Two preservation criteria are offered:

``"partition"`` (default)
    a subfamily P preserves the family if the meet of the row partitions of
    P equals the combined row partition of the whole family.
``"intersection"``
    P preserves the family if the entry-wise minimum of P equals that of the
    whole family.

Both are monotone (supersets of a preserving subfamily also preserve), so
size-ascending search with superset pruning yields exactly the minimal ones.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Literal, Sequence

from .core import FuzzyRelation, RelationSystem, check_system
from .homomorphism import CompressedSystem
from .partitioning import meet_all, row_partition

Criterion = Literal["partition", "intersection"]
CRITERIA: tuple[str, ...] = ("partition", "intersection")


class SoleRelationWarning(UserWarning):
    """Superfluity was asked of the only relation in a family."""


def meet_relation(relations: Sequence[FuzzyRelation]) -> FuzzyRelation:
    """Entry-wise minimum of ``relations``."""
    if not relations:
        raise ValueError("meet of an empty relation family is undefined")
    n = relations[0].size
    if any(r.size != n or not r.is_square for r in relations):
        raise ValueError("relations are not over the same universe")
    if len(relations) == 1:
        return relations[0]
    name = "meet(" + ",".join(r.name for r in relations) + ")"
    return FuzzyRelation(
        name,
        tuple(tuple(map(min, *(r.matrix[i] for r in relations))) for i in range(n)),
    )


def _preserves(sys: RelationSystem, criterion: str) -> Callable[[Iterable[str]], bool]:
    if criterion == "partition":
        parts = {R.name: row_partition(R, sys.universe) for R in sys.relations}
        full = meet_all(parts.values(), sys.universe)
        return lambda names: meet_all((parts[x] for x in names), sys.universe) == full
    if criterion == "intersection":
        full_meet = meet_relation(sys.relations).matrix
        return lambda names: meet_relation([sys.relation(x) for x in names]).matrix == full_meet
    raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")


def is_superfluous(sys: RelationSystem, name: str, *, criterion: Criterion = "partition") -> bool:
    """Can ``name`` be dropped from the family without changing what it preserves?"""
    sys.relation(name)
    if len(sys.relations) == 1:
        warnings.warn(
            f"{name} is the only relation; removing it is not permitted", SoleRelationWarning, stacklevel=2
        )
        return False
    rest = [x for x in sys.names if x != name]
    return _preserves(sys, criterion)(rest)


@dataclass(frozen=True)
class ReductResult:
    reducts: tuple[frozenset[str], ...]
    core: frozenset[str]
    criterion: str = "partition"
    heuristic: bool = False

    def ordered(self, order: Sequence[str]) -> list[list[str]]:
        return [[x for x in order if x in r] for r in self.reducts]


def reducts(
    sys: RelationSystem,
    *,
    criterion: Criterion = "partition",
    greedy: bool = False,
) -> ReductResult:
    """All subset-minimal preserving subfamilies.

    ``greedy=True`` runs backward elimination in family order instead and
    returns a single reduct (flagged heuristic); the core is then the set of
    relations that are not superfluous.
    """
    check_system(sys)
    if not sys.relations:
        raise ValueError("reduction needs a nonempty relation family")
    names = sys.names
    preserves = _preserves(sys, criterion)
    if greedy:
        kept = list(names)
        for x in names:
            trial = [y for y in kept if y != x]
            if trial and preserves(trial):
                kept = trial
        core = frozenset(x for x in names if len(names) == 1 or not preserves([y for y in names if y != x]))
        return ReductResult((frozenset(kept),), core, criterion, heuristic=True)

    found: list[frozenset[str]] = []
    for size in range(1, len(names) + 1):
        live = 0
        for combo in combinations(names, size):
            cand = frozenset(combo)
            if any(r <= cand for r in found):
                continue
            live += 1
            if preserves(combo):
                found.append(cand)
        if live == 0:
            break
    core = frozenset.intersection(*found)
    return ReductResult(tuple(found), core, criterion)


def lift_reduct(c: CompressedSystem, image_reduct: Iterable[str]) -> frozenset[str]:
    """Read a reduct of the image system as a reduct of the source.

    Compression keeps relation names, so this is a checked identity.
    """
    out = frozenset(image_reduct)
    unknown = sorted(out - set(c.image.names))
    if unknown:
        raise KeyError(f"not relations of the image system: {', '.join(unknown)}")
    return out


def reduce_compressed(
    c: CompressedSystem, *, criterion: Criterion = "partition", greedy: bool = False
) -> ReductResult:
    """Reduce the image system, then lift every reduct back to the source."""
    res = reducts(c.image, criterion=criterion, greedy=greedy)
    lifted = tuple(lift_reduct(c, r) for r in res.reducts)
    return ReductResult(lifted, lift_reduct(c, res.core), criterion, res.heuristic)
