"""Incremental edit versus full recompression: wall time and partition counts."""

from __future__ import annotations

import csv
import io as _io
import time
from dataclasses import astuple, dataclass, fields
from typing import Iterable, TextIO

from .core import RelationSystem
from .dynamics import ObjectExtension, compress_state, equivalent, scratch_oracle
from .generate import gen_pullback
from .io import EDIT_KINDS, Edit, apply_edit
from .partitioning import count_partitions


@dataclass(frozen=True)
class BenchRow:
    edit_kind: str
    n: int
    m: int
    t: int
    incr_ms: float
    scratch_ms: float
    incr_partitions: int
    scratch_partitions: int
    equivalent: bool


COLUMNS = tuple(f.name for f in fields(BenchRow))


def bench_workload(n: int, m: int, t: int, kind: str, seed: int) -> tuple[RelationSystem, Edit]:
    """A pullback base system of ``n`` objects and ``m`` relations plus an edit of size ``t``."""
    k = max(1, n // 3)
    if kind == "add-relations":
        full = gen_pullback(k, n, m + t, seed=seed)
        return full.with_relations(full.relations[:m]), Edit(kind, full.relations[m:])
    if kind == "remove-relations":
        base = gen_pullback(k, n, m, seed=seed)
        return base, Edit(kind, base.names[:t])
    if kind == "add-objects":
        full = gen_pullback(k, n + t, m, seed=seed)
        base = full.restrict(full.labels[:n])
        ext = ObjectExtension(
            full.labels[n:],
            {R.name: [R.row(i)[n:] for i in range(n)] for R in full.relations},
            {R.name: [R.row(i) for i in range(n, n + t)] for R in full.relations},
        )
        return base, Edit(kind, ext)
    if kind == "remove-objects":
        base = gen_pullback(k, n, m, seed=seed)
        return base, Edit(kind, base.labels[:t])
    raise ValueError(f"unknown edit kind {kind!r}")


def run_one(base: RelationSystem, edit: Edit, t: int) -> BenchRow:
    state = compress_state(base)
    with count_partitions() as incr_count:
        start = time.perf_counter()
        updated = apply_edit(state, edit)
        incr_ms = (time.perf_counter() - start) * 1000
    with count_partitions() as scratch_count:
        start = time.perf_counter()
        fresh = compress_state(updated.source)
        scratch_ms = (time.perf_counter() - start) * 1000
    ok = equivalent(updated, fresh) and equivalent(updated, scratch_oracle(updated.source))
    return BenchRow(
        edit.kind, base.n, len(base.relations), t, round(incr_ms, 3), round(scratch_ms, 3),
        incr_count.count, scratch_count.count, ok,
    )


def run_bench(
    kinds: Iterable[str] = EDIT_KINDS,
    sizes: Iterable[tuple[int, int, int]] = ((50, 6, 2), (200, 12, 2)),
    seeds: Iterable[int] = (0,),
) -> list[BenchRow]:
    rows = []
    for kind in kinds:
        for n, m, t in sizes:
            if kind == "remove-relations" and t >= m:
                t = m - 1
            for seed in seeds:
                base, edit = bench_workload(n, m, t, kind, seed)
                rows.append(run_one(base, edit, t))
    return rows


def write_csv(rows: Iterable[BenchRow], out: TextIO, *, timing: bool = True) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        values = list(astuple(r))
        if not timing:
            values[4] = values[5] = ""
        w.writerow(values)


def to_csv(rows: Iterable[BenchRow], *, timing: bool = True) -> str:
    buf = _io.StringIO()
    write_csv(rows, buf, timing=timing)
    return buf.getvalue()
