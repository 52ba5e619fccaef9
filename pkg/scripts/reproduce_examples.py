"""Walk through the bundled worked example, from compression to the four edits."""

from frcompress.cli import format_compressed, format_matrix
from frcompress.dynamics import compress_state, equivalent, scratch_oracle
from frcompress.io import apply_edit, load_fixture, load_fixture_edit
from frcompress.reduction import reduce_compressed


def section(title):
    print(f"\n== {title} ==")


def main():
    canon = load_fixture("canon")
    state = compress_state(canon)
    section("compress canon")
    print(format_compressed(state))

    section("reduce canon")
    res = reduce_compressed(state)
    for r in res.ordered(canon.names):
        print("reduct:", r)
    print("core:", sorted(res.core))

    edits = [
        ("add relation R4", "add_r4", {"image_prefix": "z"}),
        ("remove relation R1", "remove_r1", {}),
        ("add objects x9, x10", "add_x9_x10", {}),
        ("remove objects x1, x7, x8", "remove_x1_x7_x8", {}),
    ]
    for title, name, kw in edits:
        section(title)
        out = apply_edit(state, load_fixture_edit(name), **kw)
        t = out.trace
        print("combined:", out.cache.combined)
        for stage in ("delta", "g", "h"):
            value = getattr(t, stage, None)
            if value is not None:
                print(f"{stage}:", value if stage == "delta" else value.partition)
        if getattr(t, "dropped", None) is not None:
            print("dropped:", list(t.dropped))
            for R in t.s5.relations:
                print(format_matrix(R, t.s5.labels))
        print("partitions computed:", t.partitions_computed, "| fallback:", t.reason or "no")
        print("equivalent to scratch:", equivalent(out, scratch_oracle(out.source)))


if __name__ == "__main__":
    main()
