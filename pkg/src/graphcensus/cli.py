"""Command-line entry points: ``census``, ``farey`` and ``hypsolve``."""

import argparse
import json
import os
import sys

from . import census as cz
from .farey import (
    FareyError, complexity_upper_bound, is_irreducible_torus_knot, lam, layered_pair,
    torus_knot_group_params,
)
from .triangulation import StructureError, format_fixture


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _cache_dir(arg):
    return arg or os.environ.get("CENSUS_CACHE_DIR") or None


def _load_or_run(records_path, cache_dir, max_complexity):
    if records_path is None and cache_dir:
        candidate = os.path.join(cache_dir, "records.jsonl")
        if os.path.exists(candidate):
            records_path = candidate
    if records_path:
        with open(records_path) as fh:
            return cz.load_records(fh)
    report = cz.run_census(cz.RunConfig(max_complexity=max_complexity, cache_dir=cache_dir))
    return report.records


def census_main(argv=None):
    ap = argparse.ArgumentParser(prog="census", description="Census of simple graphs in 3-manifolds.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="enumerate and classify up to a complexity")
    run.add_argument("--max-complexity", type=int, default=2)
    run.add_argument("--allow-knot-components", type=_bool, default=True)
    run.add_argument("--stages", default=",".join(cz.STAGES),
                     help="comma-separated stages; the pipeline stops after the last one")
    run.add_argument("--cache-dir")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--format", choices=("text", "csv", "json"), default="text")
    run.add_argument("--records", help="write JSON-lines records here")
    run.add_argument("--annotated", action="store_true", help="order by annotated volume")

    tab = sub.add_parser("tables", help="print tables from stored records")
    tab.add_argument("--records")
    tab.add_argument("--cache-dir")
    tab.add_argument("--max-complexity", type=int, default=2)
    tab.add_argument("--format", choices=("text", "csv"), default="text")
    tab.add_argument("--annotated", action="store_true")

    ident = sub.add_parser("identify", help="match a fixture against the census")
    ident.add_argument("file")
    ident.add_argument("--records")
    ident.add_argument("--cache-dir")
    ident.add_argument("--max-complexity", type=int, default=3)

    args = ap.parse_args(argv)
    try:
        if args.cmd == "run":
            return _census_run(args)
        if args.cmd == "tables":
            records = _load_or_run(args.records, _cache_dir(args.cache_dir), args.max_complexity)
            sys.stdout.write(cz.emit_tables(records, args.format, args.annotated))
            return 0
        return _census_identify(args)
    except (ValueError, OSError, cz.CensusError, StructureError) as exc:
        print(f"census: error: {exc}", file=sys.stderr)
        return 1


def _census_run(args):
    stages = tuple(s.strip() for s in args.stages.split(",") if s.strip())
    cfg = cz.RunConfig(
        max_complexity=args.max_complexity, allow_knot_components=args.allow_knot_components,
        stages=stages, cache_dir=_cache_dir(args.cache_dir), jobs=args.jobs, output=args.format,
    )
    report = cz.run_census(cfg)
    for msg in report.messages:
        print(msg, file=sys.stderr)
    out_path = args.records
    if out_path is None and cfg.cache_dir:
        out_path = os.path.join(cfg.cache_dir, "records.jsonl")
    if out_path and report.records:
        os.makedirs(os.path.dirname(os.path.abspath(out_path)), exist_ok=True)
        with open(out_path, "w") as fh:
            cz.dump_records(report.records, fh)
    if args.format == "json":
        json.dump({"stats": report.stats, "records": [r.to_dict() for r in report.records]},
                  sys.stdout, indent=1, sort_keys=True)
        sys.stdout.write("\n")
    else:
        style = args.format
        sys.stdout.write("Stage counts\n")
        sys.stdout.write(cz.stats_table(report.stats, style))
        if report.records:
            sys.stdout.write("\n")
            sys.stdout.write(cz.emit_tables(report.records, style, args.annotated,
                                            cfg.max_complexity))
    return report.exit_code


def _census_identify(args):
    with open(args.file) as fh:
        text = fh.read()
    records = _load_or_run(args.records, _cache_dir(args.cache_dir), args.max_complexity)
    match = cz.identify_fixture(text, records)
    print(f"signature: {match.signature}")
    print(f"fingerprint: {match.fingerprint.key_string()}")
    if match.kind == "none":
        print("no match")
    else:
        for r in match.records:
            desc = (r.annotation or {}).get("description", "")
            print(f"{match.kind} match: {r.id} (complexity {r.complexity}) {desc}".rstrip())
    return 0


def farey_main(argv=None):
    ap = argparse.ArgumentParser(prog="farey", description="Farey paths and layered lens-space triangulations.")
    ap.add_argument("--lens", nargs=2, type=int, metavar=("P", "Q"), required=True)
    ap.add_argument("--knot", nargs=2, type=int, metavar=("L", "M"), required=True)
    ap.add_argument("--emit-triangulation", metavar="PATH",
                    help="write the layered triangulation in fixture format ('-' for stdout)")
    args = ap.parse_args(argv)
    p, q = args.lens
    l, m = args.knot
    try:
        k = lam(l, m, p, q)
        a, b = torus_knot_group_params(l, m, p, q)
        print(f"lambda: {k}")
        print(f"complexity bound: {complexity_upper_bound(l, m, p, q)}")
        print(f"group: <x,y | x^{a} = y^{b}>")
        print(f"irreducible: {'yes' if is_irreducible_torus_knot(l, m, p, q) else 'no'}")
        if args.emit_triangulation:
            mt, path = layered_pair(l, m, p, q)
            text = format_fixture(mt.tri, mt.marked)
            if args.emit_triangulation == "-":
                sys.stdout.write(text)
            else:
                with open(args.emit_triangulation, "w") as fh:
                    fh.write(text)
                print(f"wrote {mt.n}-tetrahedron triangulation to {args.emit_triangulation}")
    except (FareyError, OSError) as exc:
        print(f"farey: error: {exc}", file=sys.stderr)
        return 1
    return 0


def hypsolve_main(argv=None):
    from .hypsolve import SolveError, load_ideal, solve
    ap = argparse.ArgumentParser(prog="hypsolve", description="Solve gluing equations of an ideal triangulation.")
    ap.add_argument("file")
    ap.add_argument("--initial", help="starting shape for every tetrahedron, as re,im")
    args = ap.parse_args(argv)
    try:
        initial = None
        if args.initial:
            re_s, im_s = args.initial.split(",")
            initial = complex(float(re_s), float(im_s))
        it = load_ideal(args.file)
        res = solve(it, initial)
    except (SolveError, StructureError, ValueError, OSError) as exc:
        print(f"hypsolve: error: {exc}", file=sys.stderr)
        return 1
    for i, z in enumerate(res.shapes):
        print(f"z{i} = {z.real:.12f} {'+' if z.imag >= 0 else '-'} {abs(z.imag):.12f}i")
    print(f"residual: {res.residual:.3e}")
    print(f"geometric: {'yes' if res.geometric else 'no'}")
    print(f"volume: {res.volume:.9f}")
    return 0


def _entry(fn):
    def run():
        sys.exit(fn())
    return run


census_entry = _entry(census_main)
farey_entry = _entry(farey_main)
hypsolve_entry = _entry(hypsolve_main)
