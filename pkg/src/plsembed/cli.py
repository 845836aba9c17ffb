"""Command line interface: enumerate, survey, classify, verify-paper, report."""

from __future__ import annotations

import argparse
import csv
import io
import logging
from pathlib import Path
import sys
import time

from .pipeline import (
    VERDICTS,
    Config,
    aggregate,
    classify,
    read_results,
    run_survey,
    verify_bundled,
)
from .pls import PLSError, parse_pls
from .species import build_catalogs, catalog_path, count_row, read_catalog, write_catalog

COUNTS_FILE = "counts.csv"
SPECIES_HEADER = ("size", "all", "connected", "candidates")
VERDICT_HEADER = ("size", "NE", "abelian", "nonabelian", "infNotFin", "unresolved")


def add_config_args(p: argparse.ArgumentParser) -> None:
    d = Config()
    p.add_argument("--max-order", type=int, default=d.max_order,
                   help="largest group order searched in the catalog (<= 24)")
    p.add_argument("--kb-max-rules", type=int, default=d.kb_max_rules)
    p.add_argument("--kb-max-length", type=int, default=d.kb_max_length)
    p.add_argument("--kb-max-pairs", type=int, default=d.kb_max_pairs)
    p.add_argument("--max-cosets", type=int, default=d.max_cosets)
    p.add_argument("--rq-budget", type=int, default=d.rq_budget,
                   help="random-quotient attempts per species")
    p.add_argument("--seed", type=int, default=d.rq_seed)
    p.add_argument("--workers", type=int, default=d.workers)
    p.add_argument("--no-timings", action="store_true",
                   help="leave stage timings out of records (byte-stable output)")
    p.add_argument("--cache-dir", default=None, help="group catalog cache directory")


def config_from(args) -> Config:
    return Config(max_order=args.max_order, kb_max_rules=args.kb_max_rules,
                  kb_max_length=args.kb_max_length, kb_max_pairs=args.kb_max_pairs,
                  max_cosets=args.max_cosets, rq_budget=args.rq_budget, rq_seed=args.seed,
                  workers=args.workers, timings=not args.no_timings, cache_dir=args.cache_dir)


def format_table(header, rows) -> str:
    cells = [list(map(str, header))] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def species_rows(directory) -> list[tuple[int, ...]]:
    """Species counts per size, from ``counts.csv`` or recomputed from the catalogs."""
    directory = Path(directory)
    counts = directory / COUNTS_FILE
    if counts.exists():
        with open(counts) as f:
            return [tuple(int(x) for x in row) for row in list(csv.reader(f))[1:]]
    rows = []
    size = 1
    while catalog_path(directory, size).exists():
        rows.append(count_row(read_catalog(catalog_path(directory, size))))
        size += 1
    return rows


def verdict_rows(agg: dict) -> list[tuple[int, ...]]:
    return [(size,) + tuple(row[v] for v in VERDICTS) for size, row in agg.items()]


def cmd_enumerate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    t0 = time.perf_counter()

    def progress(cat):
        logging.info("size %d: %d species (%.1fs)", cat.size, len(cat), time.perf_counter() - t0)

    for cat in build_catalogs(args.max_size, progress):
        write_catalog(cat, catalog_path(out, cat.size))
        rows.append(count_row(cat))
    (out / COUNTS_FILE).write_text(to_csv(SPECIES_HEADER, rows))
    print(format_table(SPECIES_HEADER, rows))
    return 0


def cmd_survey(args) -> int:
    config = config_from(args)

    def progress(size, k, total):
        if k % 50 == 0 or k == total:
            logging.info("size %d: %d/%d classified", size, k, total)

    agg = run_survey(args.max_size, args.catalog, args.out, config, resume=args.resume,
                     min_size=args.min_size, progress=progress)
    print(format_table(VERDICT_HEADER, verdict_rows(agg)))
    return 0


def cmd_classify(args) -> int:
    try:
        P = parse_pls(Path(args.file).read_text())
    except (OSError, PLSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    v = classify(P, config_from(args))
    if args.json:
        print(v.to_json())
    else:
        print(v.pls)
        print(f"verdict: {v.verdict}")
        for line in v.trace:
            print(f"  {line}")
        print(v.certificate.to_text())
    return 0


def cmd_verify(args) -> int:
    checks = verify_bundled(config_from(args))
    for c in checks:
        print(f"{'PASS' if c.ok else 'FAIL'}  {c.name}  [{c.detail}]")
    failed = [c for c in checks if not c.ok]
    if not failed:
        return 0
    return 3 if any(c.budget for c in failed) else 2


def cmd_report(args) -> int:
    if not args.inp and not args.catalog:
        print("error: give --in and/or --catalog", file=sys.stderr)
        return 1
    csv_parts = []
    if args.catalog:
        rows = species_rows(args.catalog)
        print("Species of PLS by size")
        print(format_table(SPECIES_HEADER, rows))
        csv_parts.append(to_csv(SPECIES_HEADER, rows))
    if args.inp:
        rows = verdict_rows(aggregate(read_results(args.inp)))
        if args.catalog:
            print()
        print("Verdicts for candidate species by size")
        print(format_table(VERDICT_HEADER, rows))
        csv_parts.append(to_csv(VERDICT_HEADER, rows))
    if args.csv:
        Path(args.csv).write_text("\n".join(csv_parts))
    else:
        print()
        print("\n".join(csv_parts), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plsembed",
                                 description="Group embeddings of partial Latin squares")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="write species catalogs and their counts")
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("survey", help="classify every candidate species")
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--min-size", type=int, default=1)
    p.add_argument("--catalog", required=True, help="species catalog directory")
    p.add_argument("--out", required=True, help="JSONL verdict stream")
    p.add_argument("--resume", action="store_true")
    add_config_args(p)
    p.set_defaults(func=cmd_survey)

    p = sub.add_parser("classify", help="classify one PLS given as a grid file")
    p.add_argument("--file", required=True)
    p.add_argument("--json", action="store_true")
    add_config_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify-paper", help="check the bundled instances and group facts")
    add_config_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="species and verdict tables as text and CSV")
    p.add_argument("--in", dest="inp", help="JSONL verdict stream")
    p.add_argument("--catalog", help="species catalog directory")
    p.add_argument("--csv", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
