"""Command line front end: generate words, step them, audit counters,
dump decompositions, and run the hierarchical tree search."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .compose import crt_compose, general_counter
from .core import BoundExceeded, dat_to_json, word_format, word_parse
from .graycode import gray_counter
from .linear import Field, companion_counter, companion_matrix, \
    decompose_elementary, find_primitive, linear_counter, AddRow, Scale
from .permdecomp import build_plan, odd_counter
from .verify import audit, search_hierarchical

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_BOUND = 3
DEFAULT_STEP_CAP = 2 ** 27


def _step_cap(args) -> int | None:
    if getattr(args, "unbounded", False):
        return None
    env = os.environ.get("QGC_MAX_STEPS")
    if env is not None:
        cap = int(env)
        if cap < 1:
            raise ValueError("QGC_MAX_STEPS must be positive")
        return cap
    return DEFAULT_STEP_CAP


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise ValueError(f"--kind {args.kind} requires --{name}")


def _component(kind: str, kw: dict):
    def need(*names):
        for name in names:
            if name not in kw:
                raise ValueError(f"component {kind!r} requires {name}=")

    if kind == "base":
        need("m", "n")
        return gray_counter(kw["m"], kw["n"])
    if kind == "linear":
        need("q", "n")
        return linear_counter(Field(kw["q"]), kw["n"], kw.get("r"))
    if kind == "companion":
        need("q", "n")
        return companion_counter(Field(kw["q"]), kw["n"])
    if kind == "odd":
        need("m", "n")
        return odd_counter(kw["m"], kw["n"])
    if kind == "general":
        need("m", "n")
        return general_counter(kw["m"], kw["n"])
    raise ValueError(f"unknown component kind {kind!r}")


def _parse_components(text: str) -> list:
    parts = [p.strip() for p in text.split(";") if p.strip()]
    if not parts:
        raise ValueError("empty component list")
    out = []
    for part in parts:
        kind, _, rest = part.partition(":")
        kw = {}
        for item in rest.split(","):
            item = item.strip()
            if not item:
                continue
            key, sep, val = item.partition("=")
            if not sep:
                raise ValueError(f"malformed component setting {item!r}")
            try:
                kw[key.strip()] = int(val)
            except ValueError:
                raise ValueError(f"malformed component setting {item!r}") from None
        out.append(_component(kind.strip(), kw))
    return out


def _build_counter(args):
    kind = args.kind
    if kind == "base":
        _require(args, "m", "n")
        return gray_counter(args.m, args.n)
    if kind == "linear":
        _require(args, "q", "n")
        return linear_counter(Field(args.q), args.n, args.r)
    if kind == "odd":
        _require(args, "m", "n")
        return odd_counter(args.m, args.n)
    if kind == "general":
        _require(args, "m", "n")
        return general_counter(args.m, args.n)
    if kind == "crt":
        if not args.components:
            raise ValueError("--kind crt requires --components")
        return crt_compose(_parse_components(args.components))
    raise ValueError(f"unknown kind {kind!r}")


def _cmd_gen(args) -> int:
    counter = _build_counter(args)
    w = word_parse(args.start, counter.domain) if args.start else counter.start
    limit = args.limit if args.limit is not None else counter.claimed_length
    if limit < 0:
        raise ValueError("--limit must be nonnegative")
    cap = _step_cap(args)
    capped = cap is not None and limit > cap
    emit = cap if capped else limit
    step = (lambda word: counter.prev(word)) if args.dir == "prev" else counter.next
    for _ in range(emit):
        print(word_format(w, counter.domain))
        w, _stats = step(w)
    if capped:
        print(f"stopped after {emit} of {limit} words; raise QGC_MAX_STEPS "
              f"or pass --unbounded", file=sys.stderr)
        return EXIT_BOUND
    return EXIT_OK


def _cmd_step(args) -> int:
    counter = _build_counter(args)
    step = counter.prev if args.dir == "prev" else counter.next
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        w = word_parse(line, counter.domain)
        out, _stats = step(w)
        print(word_format(out, counter.domain))
    return EXIT_OK


def _audit_payload(args):
    counter = _build_counter(args)
    cap = _step_cap(args)
    if cap is not None and counter.claimed_length > cap:
        raise BoundExceeded(
            f"orbit of length {counter.claimed_length} exceeds the step cap "
            f"{cap}; raise QGC_MAX_STEPS or pass --unbounded")
    report = audit(counter)
    payload = report.to_json()
    if counter.recipe:
        payload["recipe"] = counter.recipe
    return report, payload


def _cmd_stats(args) -> int:
    _report, payload = _audit_payload(args)
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def _cmd_verify(args) -> int:
    report, payload = _audit_payload(args)
    print(json.dumps(payload, indent=2))
    return EXIT_OK if report.ok else EXIT_VERIFY


def _cmd_decompose(args) -> int:
    if args.kind == "linear":
        _require(args, "q", "n")
        fld = Field(args.q)
        poly = find_primitive(fld, args.n)
        ops = decompose_elementary(companion_matrix(poly), fld)
        if args.format == "json":
            items = []
            for op in ops:
                if isinstance(op, Scale):
                    items.append({"op": "scale", "i": op.i + 1, "c": op.c})
                else:
                    items.append({"op": "addrow", "i": op.i + 1, "j": op.j + 1,
                                  "c": op.c})
            print(json.dumps({"polynomial": str(poly), "ops": items}, indent=2))
        else:
            print(f"# companion of {poly} over F_{args.q}: {len(ops)} operations")
            for op in ops:
                if isinstance(op, Scale):
                    print(f"scale {op.i + 1} {op.c}")
                else:
                    print(f"addrow {op.i + 1} {op.j + 1} {op.c}")
        return EXIT_OK
    if args.kind == "odd":
        _require(args, "m", "n")
        plan = build_plan(args.m, args.n)
        if args.format == "json":
            items = []
            for f in plan.steps:
                items.append({"sources": [s + 1 for s in f.sources],
                              "target": f.target + 1,
                              "table": _table_rows(f)})
            print(json.dumps({"m": args.m, "n": args.n, "count": plan.k,
                              "per_index": plan.counts, "steps": items}, indent=2))
        else:
            print(f"# {plan.k} two-functions realizing the full cycle on "
                  f"Z_{args.m}^{args.n}")
            for f in plan.steps:
                srcs = ",".join(f"x{s + 1}" for s in f.sources)
                print(f"add x{f.target + 1} <- f({srcs})")
                for row in _table_rows(f):
                    print("  " + " ".join(str(v) for v in row))
        return EXIT_OK
    raise ValueError(f"unknown decomposition kind {args.kind!r}")


def _table_rows(f) -> list[list[int]]:
    """Full value table as rows over the first source (one row when r < 2)."""
    m = f.m
    if f.r == 0:
        return [[f.value(())]]
    if f.r == 1:
        return [[f.value((x,)) for x in range(m)]]
    return [[f.value((x, y)) for y in range(m)] for x in range(m)]


def _cmd_search(args) -> int:
    radices = tuple(int(t) for t in args.radices.split(","))
    tree = search_hierarchical(radices)
    if args.emit == "json":
        print(json.dumps(dat_to_json(tree) if tree is not None else None, indent=2))
    else:
        if tree is None:
            print("none")
        else:
            _print_tree(tree, 0)
    return EXIT_OK


def _print_tree(node, depth: int) -> None:
    pad = "  " * depth
    if hasattr(node, "coord"):
        print(f"{pad}x{node.coord + 1}?")
        for v, child in enumerate(node.children):
            print(f"{pad} ={v}:")
            _print_tree(child, depth + 1)
    else:
        body = ", ".join(f"x{c + 1}<-{v}" for c, v in node.assignments)
        print(f"{pad}{body}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasigray",
        description="Cyclic counters over mixed-radix words with few reads "
                    "and writes per step.")
    sub = parser.add_subparsers(dest="command", required=True)

    counter_flags = argparse.ArgumentParser(add_help=False)
    counter_flags.add_argument("--kind", required=True,
                               choices=["base", "linear", "odd", "crt", "general"])
    counter_flags.add_argument("--m", type=int, help="radix")
    counter_flags.add_argument("--n", type=int, help="word width")
    counter_flags.add_argument("--q", type=int, help="field order")
    counter_flags.add_argument("--r", type=int, help="pointer width override")
    counter_flags.add_argument(
        "--components",
        help="crt parts, e.g. 'base:m=2,n=1;base:m=3,n=1;companion:q=2,n=3'")
    counter_flags.add_argument("--unbounded", action="store_true",
                               help="ignore the step cap")

    p = sub.add_parser("gen", parents=[counter_flags],
                       help="print words along the counter's cycle")
    p.add_argument("--start", help="word to start from (default: counter start)")
    p.add_argument("--limit", type=int, help="how many words (default: full cycle)")
    p.add_argument("--dir", choices=["next", "prev"], default="next")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("step", parents=[counter_flags],
                       help="step words read from stdin, one per line")
    p.add_argument("--dir", choices=["next", "prev"], default="next")
    p.set_defaults(func=_cmd_step)

    p = sub.add_parser("stats", parents=[counter_flags],
                       help="walk the full orbit and print the audit JSON")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("verify", parents=[counter_flags],
                       help="like stats, but exit 1 when a claim fails")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("decompose",
                       help="print the step decomposition behind a counter")
    p.add_argument("--kind", required=True, choices=["linear", "odd"])
    p.add_argument("--m", type=int, help="radix (odd decomposition)")
    p.add_argument("--n", type=int, help="width: matrix size or inner cycle width")
    p.add_argument("--q", type=int, help="field order (linear decomposition)")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("search-hierarchical",
                       help="exhaustive search for a two-level full-cycle tree")
    p.add_argument("--radices", required=True, help="three radices, e.g. 2,2,3")
    p.add_argument("--emit", choices=["text", "json"], default="text")
    p.set_defaults(func=_cmd_search)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except BoundExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BOUND
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
