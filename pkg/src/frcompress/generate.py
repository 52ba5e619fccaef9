"""Random systems for tests and benchmarks.

Pullback systems are built by drawing a small image system whose objects are
pairwise distinguishable and inflating it through a random surjection. Every
relation is then constant on class pairs, so compressing recovers the seed up
to renaming.
"""

from __future__ import annotations

import random
from decimal import Decimal
from typing import Sequence

from .core import FuzzyRelation, RelationSystem, make_universe
from .dynamics import ObjectExtension
from .io import Edit

DEFAULT_GRID: tuple[Decimal, ...] = tuple(Decimal(k) / 10 for k in range(1, 10))


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def _names(m: int, start: int = 1) -> list[str]:
    return [f"R{i}" for i in range(start, start + m)]


def random_system(
    n: int, m: int, *, value_grid: Sequence[Decimal] = DEFAULT_GRID, seed=None, prefix: str = "x"
) -> RelationSystem:
    """Every entry drawn independently from ``value_grid``."""
    rng = _rng(seed)
    rels = tuple(
        FuzzyRelation(name, tuple(tuple(rng.choice(value_grid) for _ in range(n)) for _ in range(n)))
        for name in _names(m)
    )
    return RelationSystem(make_universe(f"{prefix}{i + 1}" for i in range(n)), rels)


def _seed_image(k: int, m: int, grid: Sequence[Decimal], rng: random.Random) -> list[list[list[Decimal]]]:
    # resample until the k objects have pairwise different combined rows
    if k > 1 and len(grid) < 2:
        raise ValueError("need at least two grid values to separate more than one object")
    while True:
        mats = [[[rng.choice(grid) for _ in range(k)] for _ in range(k)] for _ in range(m)]
        sigs = {tuple(tuple(M[a]) for M in mats) for a in range(k)}
        if len(sigs) == k:
            return mats


def random_surjection(n: int, k: int, rng: random.Random) -> list[int]:
    """Class index per object; every class 0..k-1 is hit."""
    cls = list(range(k)) + [rng.randrange(k) for _ in range(n - k)]
    rng.shuffle(cls)
    return cls


def gen_pullback(
    k: int,
    n: int,
    m: int,
    value_grid: Sequence[Decimal] = DEFAULT_GRID,
    seed=None,
    *,
    prefix: str = "x",
) -> RelationSystem:
    """An ``n``-object system with exactly ``k`` row classes, consistent by construction."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if m < 1:
        raise ValueError(f"need at least one relation, got m={m}")
    rng = _rng(seed)
    mats = _seed_image(k, m, value_grid, rng)
    cls = random_surjection(n, k, rng)
    rels = tuple(
        FuzzyRelation(name, tuple(tuple(M[cls[u]][cls[v]] for v in range(n)) for u in range(n)))
        for name, M in zip(_names(m), mats)
    )
    return RelationSystem(make_universe(f"{prefix}{i + 1}" for i in range(n)), rels)


def _draw(rng: random.Random, pullback: bool, n: int, m: int, grid) -> RelationSystem:
    if pullback:
        return gen_pullback(rng.randint(1, n), n, m, grid, rng)
    return random_system(n, m, value_grid=grid, seed=rng)


def edit_instance(
    kind: str,
    seed,
    *,
    pullback: bool = True,
    n_max: int = 14,
    m_max: int = 5,
    t_max: int = 4,
    value_grid: Sequence[Decimal] = DEFAULT_GRID,
) -> tuple[RelationSystem, Edit]:
    """A base system and an edit of ``kind`` for differential testing.

    With ``pullback`` the edited system is drawn as a pullback and the base is
    obtained by undoing the edit, so both sides are consistent.
    """
    rng = _rng(seed)
    if kind == "add-relations":
        m, r = rng.randint(1, max(1, m_max - 1)), rng.randint(1, 2)
        full = _draw(rng, pullback, rng.randint(1, n_max), m + r, value_grid)
        return full.with_relations(full.relations[:m]), Edit(kind, full.relations[m:])
    if kind == "remove-relations":
        m = rng.randint(2, max(2, m_max))
        base = _draw(rng, pullback, rng.randint(1, n_max), m, value_grid)
        drop = rng.sample(base.names, rng.randint(1, m - 1))
        return base, Edit(kind, tuple(x for x in base.names if x in drop))
    if kind == "add-objects":
        t = rng.randint(1, t_max)
        n = rng.randint(1, max(1, n_max - t))
        full = _draw(rng, pullback, n + t, rng.randint(1, m_max), value_grid)
        base = full.restrict(full.labels[:n])
        part2 = {R.name: [R.row(i)[n:] for i in range(n)] for R in full.relations}
        part3 = {R.name: [R.row(i) for i in range(n, n + t)] for R in full.relations}
        return base, Edit(kind, ObjectExtension(full.labels[n:], part2, part3))
    if kind == "remove-objects":
        n = rng.randint(2, n_max)
        base = _draw(rng, pullback, n, rng.randint(1, m_max), value_grid)
        gone = rng.sample(base.labels, rng.randint(1, n - 1))
        return base, Edit(kind, tuple(x for x in base.labels if x in gone))
    raise ValueError(f"unknown edit kind {kind!r}")
