"""Command line entry point.

Exit codes: 0 accepted, 1 rejected or not established, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .bctree import check_tree, tree_complexity, tree_from_json, tree_size
from .core import GeometryError, rational_to_str, vec_to_json
from .instances import GENERATORS, helly_bound, helly_number_mixed, read_bundle, write_bundle
from .search import complexity_report, default_family, report_to_json, split_disjunctions
from .splitcover import (covers, gsplit_from_json, gsplit_to_json, min_split_cover, region_from_json,
                         split_family)


class _ParseFailure(Exception):
    pass


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise _ParseFailure(f"{path}: {exc}") from exc


def _emit(obj):
    print(json.dumps(obj, sort_keys=True, indent=1))


def cmd_check(args) -> int:
    data = _load_json(args.file)
    try:
        tree = tree_from_json(data)
    except (GeometryError, TypeError, KeyError, ValueError) as exc:
        raise _ParseFailure(f"{args.file}: {exc}") from exc
    v = check_tree(tree)
    print("verdict=" + ("accepted" if v else "rejected"))
    print(f"size={tree_size(tree)}")
    print(f"complexity={tree_complexity(tree)}")
    print(f"work={v.work}")
    if not v:
        print("path=" + ("/".join(map(str, v.path)) or "root"))
        print(f"reason={v.reason}")
        return 1
    return 0


def cmd_gen(args) -> int:
    gen = GENERATORS.get(args.name)
    if gen is None:
        raise _ParseFailure(f"unknown example {args.name!r}; choose from {', '.join(sorted(GENERATORS))}")
    try:
        bundle = gen(args.n)
    except GeometryError as exc:
        raise _ParseFailure(str(exc)) from exc
    except AssertionError as exc:
        print(f"generation failed: {exc}")
        return 1
    out = args.out or bundle.name
    for path in write_bundle(bundle, out):
        print(f"wrote {path}")
    back = read_bundle(out)
    status = 0
    for (stem, tree), (_, claimed) in zip(back.certificates, back.claimed_sizes):
        v = check_tree(tree)
        ok = bool(v) and tree_size(tree) == claimed
        print(f"{stem}: {'accepted' if v else 'rejected'} size={tree_size(tree)} claimed={claimed}")
        status = status or (0 if ok else 1)
    return status


def _family_splits(args, n):
    if args.family_alpha_max is None:
        return []
    return split_family(n, args.family_alpha_max, args.family_beta_min, args.family_beta_max,
                        Fraction(args.family_beta_step))


def cmd_measure(args) -> int:
    try:
        bundle = read_bundle(args.bundle)
    except (OSError, json.JSONDecodeError, GeometryError, KeyError, TypeError) as exc:
        raise _ParseFailure(f"{args.bundle}: {exc}") from exc
    extra = split_disjunctions(_family_splits(args, bundle.dim))
    fam = default_family(bundle, size_cap=args.size_cap, depth_cap=args.depth_cap, extra_disjunctions=extra)
    if args.pure_cut:
        fam = fam.without_disjunctions()
    rep = complexity_report(bundle, fam)
    doc = report_to_json(rep)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True, indent=1)
            fh.write("\n")
        print(f"wrote {args.out}")
    else:
        _emit(doc)
    if rep.cap_exceeded:
        print("cap-exceeded: " + ", ".join("/".join(tag) for tag in doc["cap_exceeded"]))
        return 1
    return 0


def cmd_bound(args) -> int:
    if args.n1 is not None or args.n2 is not None:
        if args.n1 is None or args.n2 is None:
            raise _ParseFailure("--n1 and --n2 go together")
        print(helly_number_mixed(args.n1, args.n2))
        return 0
    if args.n is not None:
        if args.n < 1:
            raise _ParseFailure("--n must be at least 1")
        print(rational_to_str(helly_bound(2 ** args.n, args.n + 1)))
        return 0
    if args.t is None or args.h is None:
        raise _ParseFailure("give --t and --h, or --n, or --n1 and --n2")
    try:
        print(rational_to_str(helly_bound(args.t, args.h)))
    except GeometryError as exc:
        raise _ParseFailure(str(exc)) from exc
    return 0


def cmd_cover(args) -> int:
    data = _load_json(args.region)
    try:
        region = region_from_json(data)
        given = [gsplit_from_json(s) for s in data["splits"]] if "splits" in data else None
    except (GeometryError, TypeError, KeyError) as exc:
        raise _ParseFailure(f"{args.region}: {exc}") from exc
    if given is not None:
        res = covers(region, given, closed=args.closed)
        if res:
            print("covered")
            return 0
        print("witness=" + json.dumps(vec_to_json(res.witness)))
        return 1
    if args.family_alpha_max is None:
        raise _ParseFailure("no 'splits' in the region file; pass --family-alpha-max and beta bounds")
    found = min_split_cover(region, _family_splits(args, region.dim), closed=args.closed)
    if found is None:
        print("cover_number=none")
        return 1
    k, subset = found
    print(f"cover_number={k}")
    print(json.dumps([gsplit_to_json(s) for s in subset], sort_keys=True))
    return 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hellycert", description="Branch-and-cut certificate toolkit.")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("check", help="verify a certificate file")
    c.add_argument("file")
    c.set_defaults(fn=cmd_check)

    g = sub.add_parser("gen", help="write an example bundle")
    g.add_argument("name", help=", ".join(sorted(GENERATORS)))
    g.add_argument("n", type=int)
    g.add_argument("--out")
    g.set_defaults(fn=cmd_gen)

    def family_flags(q):
        q.add_argument("--family-alpha-max", type=int)
        q.add_argument("--family-beta-min", type=Fraction, default=Fraction(-2))
        q.add_argument("--family-beta-max", type=Fraction, default=Fraction(6))
        q.add_argument("--family-beta-step", type=Fraction, default=Fraction(1))

    m = sub.add_parser("measure", help="family-relative complexity report for a bundle")
    m.add_argument("bundle")
    family_flags(m)
    m.add_argument("--depth-cap", type=int)
    m.add_argument("--size-cap", type=int, default=25)
    m.add_argument("--pure-cut", action="store_true", help="drop all disjunctions from the family")
    m.add_argument("--out")
    m.set_defaults(fn=cmd_measure)

    b = sub.add_parser("bound", help="Helly-number bounds")
    b.add_argument("--t", type=int)
    b.add_argument("--h", type=int)
    b.add_argument("--n", type=int, help="shorthand for --t 2^n --h n+1")
    b.add_argument("--n1", type=int)
    b.add_argument("--n2", type=int)
    b.set_defaults(fn=cmd_bound)

    v = sub.add_parser("cover", help="split cover check or cover number for a region")
    v.add_argument("region")
    family_flags(v)
    v.add_argument("--closed", action="store_true", help="cover by split closures")
    v.set_defaults(fn=cmd_cover)
    return p


def run(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.fn(args)
    except _ParseFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
