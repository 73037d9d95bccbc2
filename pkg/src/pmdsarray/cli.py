"""Command-line front end.

Exit codes: 0 success, 1 verification/decoding/repair failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import itertools
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from .gf import FieldError
from .localcode import GeometryError, HelperMissing, msr_bandwidth, phi
from .matrix import Inconsistent
from .pmds import (
    CodeInstance,
    CodeSpec,
    NoField,
    SpecViolation,
    Unrecoverable,
    assemble,
    build,
    plan_field,
    theoretical_repair,
)
from .store import (
    StoreError,
    decode_bytes,
    encode_bytes,
    read_shards,
    stripe_count,
    write_shards,
)
from .verify import TooLarge, verify_pmds


class UsageError(Exception):
    pass


def _node(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(\d+):(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected g:j, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _nodes(text: str) -> list[tuple[int, int]]:
    return [_node(t) for t in text.split(",") if t.strip()]


def _load(path) -> CodeInstance:
    try:
        return assemble(CodeSpec.loads(Path(path).read_text()))
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot load spec {path}: {exc}") from exc


def fmt_ratio(x: Fraction) -> str:
    """Ratios above one as 1+a/b."""
    if x == 1:
        return "1"
    if x > 1:
        rest = x - 1
        return f"1+{rest.numerator}/{rest.denominator}" if rest.denominator != 1 else str(x)
    return str(x)


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# -- subcommands ---------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.family in ("c2", "c4") and args.nprime is None:
        raise UsageError(f"--nprime is required for {args.family}")
    inst = build(args.family, args.mu, args.n, args.nprime, args.r if args.family != "c3" else 2, q=args.q)
    spec = inst.spec
    print(f"family={spec.family} mu={spec.mu} n={spec.n} nprime={spec.nprime} r={spec.r} s={spec.s}")
    print(f"q={spec.q}")
    if spec.base_field is not None:
        print(f"q0={spec.base_field.q}")
    print(f"ell={spec.ell}")
    print(f"phi={phi(spec.n, spec.nprime, spec.r) if spec.nprime else '-'}")
    G = spec.subgroup
    print(f"subgroup generator={G.generator} order={G.order} elements={G.elements()}")
    print("node gamma Gamma gamma_formula Gamma_formula")
    for j in range(spec.n):
        plan = inst.repair_plan(j)
        bw, acc = theoretical_repair(spec, j)
        print(f"{j} {plan.bandwidth} {plan.access} {_fmt(bw)} {_fmt(acc)}")
    if args.out:
        Path(args.out).write_text(spec.dumps() + "\n")
        print(f"wrote {args.out}")
    return 0


def cmd_encode(args) -> int:
    inst = _load(args.spec)
    data = Path(args.infile).read_bytes()
    count = encode_bytes(inst, data, args.out)
    print(f"encoded {len(data)} bytes into {count} stripes x {inst.spec.num_nodes} shards in {args.out}")
    return 0


def cmd_corrupt(args) -> int:
    d = Path(args.dir)
    if not d.is_dir():
        raise UsageError(f"{d} is not a directory")
    removed = 0
    for g, j in args.erase:
        for p in d.glob(f"g{g}_n{j}_s*.shard"):
            p.unlink()
            removed += 1
    print(f"deleted {removed} shard files for nodes {', '.join(f'{g}:{j}' for g, j in args.erase)}")
    return 0


def cmd_decode(args) -> int:
    inst = _load(args.spec)
    try:
        data = decode_bytes(inst, args.dir)
    except Unrecoverable as exc:
        print(f"unrecoverable: erased nodes {list(exc.erased)}, rank deficiency {exc.deficiency}",
              file=sys.stderr)
        return 1
    except (Inconsistent, StoreError) as exc:
        print(f"decode failed: {exc}", file=sys.stderr)
        return 1
    Path(args.out).write_bytes(data)
    print(f"decoded {len(data)} bytes to {args.out}")
    return 0


def cmd_repair(args) -> int:
    inst = _load(args.spec)
    g, j = args.node
    try:
        inst.node_index(g, j)
    except IndexError as exc:
        raise UsageError(str(exc)) from exc
    digest = inst.spec.digest()
    total = stripe_count(args.dir)
    plan = inst.repair_plan(j)
    try:
        for idx in range(total):
            stripe = read_shards(inst, args.dir, idx, digest)
            content, plan = inst.repair(stripe, g, j)
            stripe.symbols[inst.node_index(g, j)] = content
            # write back only the rebuilt shard
            stripe.erased = [True] * len(stripe.erased)
            stripe.erased[inst.node_index(g, j)] = False
            write_shards(inst, stripe, args.dir, idx, digest)
    except (HelperMissing, StoreError) as exc:
        print(f"repair failed: {exc}", file=sys.stderr)
        return 1
    bw, acc = theoretical_repair(inst.spec, j)
    print(f"repaired node {g}:{j} in {total} stripes")
    print(f"bandwidth={plan.bandwidth} access={plan.access} (symbols per stripe)")
    print(f"formula bandwidth={_fmt(bw)} access={_fmt(acc)}")
    if plan.bandwidth != bw or plan.access != acc:
        print("measured repair cost differs from the formula", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args) -> int:
    inst = _load(args.spec)
    samples = None if args.exhaustive else args.samples
    try:
        report = verify_pmds(inst, samples=samples, jobs=args.jobs, method=args.method)
    except TooLarge as exc:
        raise UsageError(f"{exc} (use --samples N)") from exc
    print(json.dumps(report.to_dict(), indent=2))
    return 0 if report.certified else 1


def parse_grid(text: str) -> dict[str, list[int]]:
    """``n=4..8,nprime=2..3`` or ``nprime=3|5|6``; keys n, nprime, r, mu."""
    out: dict[str, list[int]] = {}
    for part in text.split(","):
        if not part.strip():
            continue
        m = re.fullmatch(r"\s*(n|nprime|r|mu)\s*=\s*([0-9.|\s]+)", part)
        if not m:
            raise UsageError(f"bad grid item {part!r}")
        vals = []
        for item in m.group(2).split("|"):
            item = item.strip()
            rng = re.fullmatch(r"(\d+)\.\.(\d+)", item)
            if rng:
                vals.extend(range(int(rng.group(1)), int(rng.group(2)) + 1))
            elif item.isdigit():
                vals.append(int(item))
            else:
                raise UsageError(f"bad grid value {item!r}")
        out[m.group(1)] = vals
    return out


def report_rows(family: str, grid: dict[str, list[int]], mu: int = 2, r: int = 2) -> list[dict]:
    rows = []
    keys = ["mu", "n", "nprime", "r"]
    defaults = {"mu": [mu], "n": [4], "nprime": [2], "r": [r]}
    if family == "c3":
        defaults["nprime"], defaults["r"] = [None], [2]
    axes = [grid.get(k, defaults[k]) if not (family == "c3" and k in ("nprime", "r")) else defaults[k]
            for k in keys]
    for mu_, n, nprime, r_ in itertools.product(*axes):
        if family == "c3":
            if n < 4:
                continue
            ell = 2
        else:
            if not n > nprime >= 1:
                continue
            ell = r_ ** nprime
        fp = plan_field(family, mu_, n, nprime, r_)
        shim = CodeSpec(family=family, mu=mu_, n=n, nprime=nprime, r=r_, s=3 if family == "c4" else 2,
                        ell=ell, field=fp.field, subgroup=fp.subgroup, lam=(), theta=(), info_set=())
        per_node = [theoretical_repair(shim, j) for j in range(n)]
        gamma = max(bw for bw, _ in per_node)
        access = max(acc for _, acc in per_node)
        star = msr_bandwidth(n, r_, ell)
        rows.append({
            "family": family, "mu": mu_, "n": n, "nprime": nprime, "r": r_, "ell": ell, "q": fp.q,
            "gamma": gamma, "gamma_ratio": gamma / star, "access": access,
        })
    return rows


def cmd_report(args) -> int:
    grid = parse_grid(args.grid)
    rows = report_rows(args.family, grid, mu=args.mu, r=args.r)
    if args.json:
        text = json.dumps([{k: (_fmt(v) if isinstance(v, Fraction) else v) for k, v in row.items()}
                           | {"gamma_ratio_text": fmt_ratio(row["gamma_ratio"])} for row in rows], indent=2)
    else:
        lines = ["family mu n nprime r ell q gamma gamma/gamma* Gamma"]
        for row in rows:
            lines.append(" ".join(str(x) for x in (
                row["family"], row["mu"], row["n"], row["nprime"] if row["nprime"] else "-", row["r"],
                row["ell"], row["q"], _fmt(row["gamma"]), fmt_ratio(row["gamma_ratio"]), _fmt(row["access"]))))
        text = "\n".join(lines)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return 0


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pmdsarray", description="PMDS array codes with efficient repair")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="build a code and print its parameters")
    g.add_argument("--family", choices=["c2", "c3", "c4"], required=True)
    g.add_argument("--mu", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--nprime", type=int)
    g.add_argument("--r", type=int, default=2)
    g.add_argument("--q", type=int, help="field order (q0 for c4) instead of the smallest-first search")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("encode", help="chunk, encode and write shards")
    e.add_argument("--spec", required=True)
    e.add_argument("--in", dest="infile", required=True)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_encode)

    c = sub.add_parser("corrupt", help="delete shard files")
    c.add_argument("--dir", required=True)
    c.add_argument("--erase", type=_nodes, required=True)
    c.set_defaults(func=cmd_corrupt)

    d = sub.add_parser("decode", help="read shards, decode and reassemble the file")
    d.add_argument("--spec", required=True)
    d.add_argument("--dir", required=True)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_decode)

    r = sub.add_parser("repair", help="rebuild one node from its local group")
    r.add_argument("--spec", required=True)
    r.add_argument("--dir", required=True)
    r.add_argument("--node", type=_node, required=True)
    r.set_defaults(func=cmd_repair)

    v = sub.add_parser("verify", help="certify the PMDS property")
    v.add_argument("--spec", required=True)
    mode = v.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--samples", type=int)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--method", choices=["auto", "expand", "slices"], default="auto")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("report", help="repair parameter table over a grid")
    t.add_argument("--family", choices=["c2", "c3", "c4"], required=True)
    t.add_argument("--grid", default="n=4..8,nprime=2..3")
    t.add_argument("--mu", type=int, default=2)
    t.add_argument("--r", type=int, default=2)
    t.add_argument("--json", action="store_true")
    t.add_argument("--out")
    t.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GeometryError, NoField, SpecViolation, FieldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
