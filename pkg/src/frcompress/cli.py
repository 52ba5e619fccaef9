"""Command-line interface: ``frcompress <command> ...``.

System arguments are JSON system documents or ``fixture:<name>`` for a
bundled fixture (``frcompress fixtures`` lists them).
"""

from __future__ import annotations

import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path

import click

from .core import FuzzyRelation, InvalidSystemError, RelationSystem
from .dynamics import EditError, cache_is_exact, compress_state, equivalent, scratch_oracle
from .generate import DEFAULT_GRID, gen_pullback
from .homomorphism import CompressedSystem
from .io import (
    EDIT_KINDS,
    FIXTURES,
    DocumentError,
    apply_edit,
    dumps,
    fixture_path,
    load_edit,
    load_state,
    load_system,
    save_state,
    system_to_document,
)
from .partitioning import MODES, system_partition
from .reduction import CRITERIA, reduce_compressed, reducts


def _resolve(ref: str) -> Path:
    return fixture_path(ref.split(":", 1)[1]) if ref.startswith("fixture:") else Path(ref)


def _system(ref: str) -> RelationSystem:
    return load_system(_resolve(ref))


def _epsilon(ctx, param, value):
    if value is None:
        return None
    try:
        eps = Decimal(value)
    except InvalidOperation:
        raise click.BadParameter(f"not a decimal: {value!r}") from None
    if not eps.is_finite() or eps < 0:
        raise click.BadParameter("must be a nonnegative decimal")
    return eps


mode_opt = click.option("--mode", type=click.Choice(MODES), default="row", show_default=True)
epsilon_opt = click.option("--epsilon", callback=_epsilon, default=None, help="tolerance for equal values (off by default)")
out_opt = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)


def format_matrix(R: FuzzyRelation, labels) -> str:
    width = max([len(R.name)] + [len(x) for x in labels] + [len(str(v)) for row in R.matrix for v in row])
    head = " ".join(s.rjust(width) for s in [R.name, *labels])
    body = [" ".join(s.rjust(width) for s in [lab, *map(str, row)]) for lab, row in zip(labels, R.matrix)]
    return "\n".join([head, *body])


def format_compressed(c: CompressedSystem) -> str:
    lines = ["mapping"]
    for y, block in zip(c.image.labels, c.map.partition):
        lines.append(f"  {y} <- {block}")
    lines.append("")
    for R in c.image.relations:
        lines.append(format_matrix(R, c.image.labels))
        lines.append("")
    verdict = "yes" if c.consistent else "no"
    lines.append(f"homomorphism: {verdict}")
    for rep in c.consistency.values():
        for w in rep.violations:
            lines.append(f"  {w}")
    return "\n".join(lines)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        out.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


@click.group()
def main():
    """Compress fuzzy relation systems and maintain the compression under edits."""


@main.command()
def fixtures():
    """List the bundled fixtures."""
    for p in sorted(FIXTURES.glob("*.json")):
        click.echo(p.stem)


@main.command()
@click.argument("system")
@mode_opt
@epsilon_opt
@click.option("--prefix", default="y", show_default=True, help="image object label prefix")
@click.option("--state", "state_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="also write the compression state here")
@click.option("--json", "as_json", is_flag=True, help="print the image system document instead of tables")
@out_opt
def compress(system, mode, epsilon, prefix, state_path, as_json, out):
    """Quotient SYSTEM by its combined partition and print the image."""
    state = compress_state(_system(system), mode, epsilon=epsilon, image_prefix=prefix)
    if state_path is not None:
        save_state(state, state_path)
    _emit(dumps(system_to_document(state.image)) if as_json else format_compressed(state), out)


@main.command()
@click.argument("system")
@mode_opt
@epsilon_opt
@out_opt
def partition(system, mode, epsilon, out):
    """Print each object's block under every relation and under the whole family."""
    sys_ = _system(system)
    cache = system_partition(sys_, mode, epsilon=epsilon)
    cols = [(name, cache.per_relation[name]) for name in sys_.names] + [("combined", cache.combined)]
    cells = [[str(p.blocks[p.block_index[i]]) for _, p in cols] for i in range(sys_.n)]
    header = ["object", *(name for name, _ in cols)]
    widths = [max(len(header[0]), *(len(x) for x in sys_.labels))]
    widths += [max(len(header[k + 1]), *(len(row[k]) for row in cells)) for k in range(len(cols))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    for lab, row in zip(sys_.labels, cells):
        lines.append("  ".join(s.ljust(w) for s, w in zip([lab, *row], widths)).rstrip())
    _emit("\n".join(lines), out)


@main.command()
@click.argument("system")
@click.option("--criterion", type=click.Choice(CRITERIA), default="partition", show_default=True)
@click.option("--greedy", is_flag=True, help="single reduct by backward elimination")
@click.option("--direct", is_flag=True, help="reduce the source instead of the compressed image")
@mode_opt
@out_opt
def reduce(system, criterion, greedy, direct, mode, out):
    """Print the reducts and the core of SYSTEM."""
    sys_ = _system(system)
    if direct:
        res = reducts(sys_, criterion=criterion, greedy=greedy)
    else:
        res = reduce_compressed(compress_state(sys_, mode), criterion=criterion, greedy=greedy)
    fmt = lambda names: "{" + ", ".join(names) + "}"  # noqa: E731
    lines = [f"criterion: {criterion}" + (" (greedy)" if res.heuristic else "")]
    lines += [f"reduct: {fmt(r)}" for r in res.ordered(sys_.names)]
    lines.append(f"core: {fmt([x for x in sys_.names if x in res.core])}")
    _emit("\n".join(lines), out)


@main.command()
@click.argument("kind", type=click.Choice(EDIT_KINDS))
@click.argument("payload")
@click.option("--state", "state_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@out_opt
def apply(kind, payload, state_path, out):
    """Apply an edit PAYLOAD document to a stored compression state."""
    if not state_path.exists():
        raise click.ClickException(f"no state at {state_path}; create one with 'compress --state'")
    state = load_state(state_path)
    edit = load_edit(_resolve(payload))
    if edit.kind != kind:
        raise click.ClickException(f"payload is a {edit.kind} edit, not {kind}")
    updated = apply_edit(state, edit)
    save_state(updated, out or state_path)
    t = updated.trace
    click.echo(f"{kind}: {updated.source.n} objects, {len(updated.source.relations)} relations, "
               f"{updated.image.n} image objects")
    click.echo(f"partitions computed: {t.partitions_computed}")
    click.echo("fallback: " + (f"yes ({t.reason})" if t.fallback else "no"))


@main.command()
@click.option("--state", "state_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
def verify(state_path):
    """Check a stored state against an independent recompression."""
    state = load_state(state_path)
    same = equivalent(state, scratch_oracle(state.source, state.mode, image_prefix=state.image_prefix))
    exact = cache_is_exact(state)
    click.echo(f"equivalent to scratch: {'true' if same else 'false'}")
    click.echo(f"cache exact: {'true' if exact else 'false'}")
    if not (same and exact):
        sys.exit(1)


@main.command()
@click.option("--k", type=int, required=True, help="image objects")
@click.option("--n", type=int, required=True, help="objects")
@click.option("--m", type=int, default=3, show_default=True, help="relations")
@click.option("--seed", type=int, default=0, show_default=True)
@out_opt
def gen(k, n, m, seed, out):
    """Emit a random pullback system with exactly K row classes."""
    try:
        sys_ = gen_pullback(k, n, m, DEFAULT_GRID, seed)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None
    _emit(dumps(system_to_document(sys_, provenance=f"pullback k={k} n={n} m={m} seed={seed}")), out)


def _sizes(ctx, param, value):
    try:
        return [tuple(int(v) for v in s.split("x")) for s in value.split(",")]
    except ValueError:
        raise click.BadParameter("expected NxMxT[,NxMxT...]") from None


@main.command()
@click.option("--kinds", default=",".join(EDIT_KINDS), show_default=True)
@click.option("--sizes", default="50x6x2,200x12x2", callback=_sizes, show_default=True, help="n x m x t triples")
@click.option("--seeds", type=int, default=1, show_default=True, help="instances per size")
@click.option("--seed", type=int, default=0, show_default=True, help="first seed")
@click.option("--no-timing", is_flag=True, help="leave wall-clock columns empty for reproducible output")
@out_opt
def bench(kinds, sizes, seeds, seed, no_timing, out):
    """Time incremental edits against full recompression and write CSV."""
    from .bench import run_bench, to_csv

    chosen = [k.strip() for k in kinds.split(",") if k.strip()]
    bad = [k for k in chosen if k not in EDIT_KINDS]
    if bad:
        raise click.BadParameter(f"unknown edit kinds: {', '.join(bad)}")
    rows = run_bench(chosen, sizes, range(seed, seed + seeds))
    _emit(to_csv(rows, timing=not no_timing), out)
    if not all(r.equivalent for r in rows):
        sys.exit(1)


def run(argv=None) -> int:
    """Entry point that turns library errors into one-line diagnostics."""
    try:
        main.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return 1
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except (DocumentError, InvalidSystemError, EditError, FileNotFoundError, KeyError, LookupError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(run())
