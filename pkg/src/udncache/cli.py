"""Command-line front end.

Exit codes: 0 ok, 1 usage error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from .analysis import LoadReport, formula_reports, reports_to_csv
from .demands import DemandMap, random_demands, worst_case_demands
from .errors import InvalidParameter, OracleRefused, UDNError
from .geometry import GridConfig, UserClass, region_census, regime_classes
from .mn import place
from .scheme_a import load_a, load_a_asymptotic, run_scheme_a
from .scheme_b import load_b_asymptotic, load_b_closed_form, redundancy_census, run_scheme_b

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

SCHEME_ALIASES = {"a": "A", "b": "B", "uncoded": "uncoded", "c": "uncoded", "d": "benchmark_D",
                  "benchmark_d": "benchmark_D", "mn": "MN"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_grid(p: argparse.ArgumentParser, t_required: bool = False) -> None:
    p.add_argument("--k1", type=int, default=3)
    p.add_argument("--k2", type=int, default=3)
    p.add_argument("--t", type=int, default=None if t_required else 2)
    p.add_argument("--regime", choices=["min", "mid", "max"], default="mid")
    p.add_argument("--n-files", type=int, default=None, help="number of files (default: number of users)")
    p.add_argument("--packet-bytes", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def _add_demands(p: argparse.ArgumentParser) -> None:
    p.add_argument("--demands", metavar="PATH", help="JSON list of {class, anchor, file}")
    p.add_argument("--demand-mode", choices=["worst", "random"], default="worst",
                   help="distinct files in enumeration order, or uniform random draws seeded by --demand-seed")
    p.add_argument("--demand-seed", type=int, default=None, help="seed for random demands (default: --seed)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="udncache", description="Coded caching on a cyclic grid of cache nodes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="simulate schemes and report loads")
    _add_grid(p)
    _add_demands(p)
    p.add_argument("--schemes", default="a,b,uncoded")
    p.add_argument("--transcript", metavar="PATH", help="write a JSON-lines transcript digest")
    _add_output(p)

    p = sub.add_parser("verify", help="decode every user and compare against the closed forms")
    _add_grid(p)
    _add_demands(p)
    p.add_argument("--no-oracle", action="store_true", help="skip the brute-force redundancy oracle")
    p.add_argument("--corrupt-symbol", metavar="CLASS:INDEX",
                   help="flip a bit in one MDS symbol before decoding (negative control)")

    p = sub.add_parser("sweep", help="closed-form loads over t or over the grid size")
    p.add_argument("--axis", choices=["t", "k"], default="t")
    p.add_argument("--k1", type=int, default=6)
    p.add_argument("--k2", type=int, default=6)
    p.add_argument("--t-min", type=int, default=0)
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--sizes", default="3x3,6x6,9x9,12x12,15x15,30x30,60x60",
                   help="grid sizes for --axis k, e.g. 3x3,6x6")
    p.add_argument("--memory-ratio", default="1/3", help="M/N for --axis k")
    p.add_argument("--regime", choices=["min", "mid", "max"], default="mid")
    p.add_argument("--n-files", type=int, default=None, help="recorded for reference; loads do not depend on N")
    p.add_argument("--schemes", default="a,b,uncoded")
    _add_output(p)

    p = sub.add_parser("oracle", help="brute-force redundancy counts against the closed form")
    p.add_argument("--k1", type=int, default=3)
    p.add_argument("--k2", type=int, default=3)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--family", choices=["II", "III", "IV", "all"], default="all")
    _add_output(p)

    p = sub.add_parser("census", help="Monte Carlo access-shape census of one cell")
    p.add_argument("--r", type=float, default=0.8)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="-")
    return parser


def _config(args) -> GridConfig:
    if args.t is None:
        raise UsageError("--t is required")
    return GridConfig(args.k1, args.k2, args.regime, t=args.t, n_files=args.n_files,
                      packet_bytes=args.packet_bytes, seed=args.seed)


def _demands(args, config: GridConfig) -> DemandMap:
    if args.demands:
        return DemandMap.load(args.demands, config.n_files)
    if args.demand_mode == "random":
        seed = args.seed if args.demand_seed is None else args.demand_seed
        return random_demands(config, seed)
    return worst_case_demands(config)


def _schemes(text: str) -> list[str]:
    out = []
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        if item not in SCHEME_ALIASES:
            raise UsageError(f"unknown scheme {item!r}; choose from a, b, uncoded, d, mn")
        out.append(SCHEME_ALIASES[item])
    if not out:
        raise UsageError("no schemes requested")
    return out


def _write(args, text: str) -> None:
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)


def _emit_reports(args, reports: list[LoadReport], extra: dict | None = None) -> None:
    if args.format == "csv":
        _write(args, reports_to_csv(reports))
    else:
        doc = {"reports": [r.to_json() for r in reports]}
        if extra:
            doc.update(extra)
        _write(args, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _sha(lines: list[dict]) -> str:
    h = hashlib.sha256()
    for row in lines:
        h.update(json.dumps(row, sort_keys=True).encode())
        h.update(b"\n")
    return h.hexdigest()


def cmd_run(args) -> int:
    config = _config(args)
    schemes = _schemes(args.schemes)
    demands = _demands(args, config)
    K, t, regime = config.K, config.t, config.regime
    m = Fraction(t, K)
    placement = place(config) if {"A", "B"} & set(schemes) else None
    reports, transcript, digests = [], [], {}
    if placement is not None:
        pd = placement.digest()
        transcript += [{"placement": row} for row in pd]
        digests["placement"] = _sha(pd)
    for scheme in schemes:
        if scheme == "A":
            tr = run_scheme_a(config, demands, placement)
            rows = [row for b in tr.blocks.values() for row in b.transcript(config.K2)]
            transcript += rows
            digests["A"] = _sha(rows)
            reports.append(LoadReport(regime, config.K1, config.K2, t, "A", tr.load, load_a_asymptotic(regime, m)))
        elif scheme == "B":
            tr = run_scheme_b(config, demands, placement)
            rows = [row for b in tr.plain.values() for row in b.transcript(config.K2)]
            rows += [b.to_json() for b in tr.coded.values()]
            transcript += rows
            digests["B"] = _sha(rows)
            reports.append(LoadReport(regime, config.K1, config.K2, t, "B", tr.load, load_b_asymptotic(regime, m)))
        else:
            reports += formula_reports(regime, config.K1, config.K2, t, [scheme])
    if args.transcript:
        Path(args.transcript).write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in transcript))
    _emit_reports(args, reports, {"digests": digests})
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _config(args)
    demands = _demands(args, config)
    K, t, regime = config.K, config.t, config.regime
    corrupt = None
    if args.corrupt_symbol:
        try:
            name, idx = args.corrupt_symbol.rsplit(":", 1)
            corrupt = (UserClass.parse(name), int(idx))
        except (ValueError, InvalidParameter):
            raise UsageError("--corrupt-symbol expects CLASS:INDEX, e.g. II-1:0") from None

    checks: list[tuple[bool, str]] = []

    def check(ok: bool, label: str) -> None:
        checks.append((ok, label))
        print(f"{'PASS' if ok else 'FAIL'} {label}")

    placement = place(config)
    try:
        tr = run_scheme_a(config, demands, placement)
        check(True, f"scheme A: all {tr.decoded_users} users decode")
        check(tr.load == load_a(regime, K, t), f"scheme A load {tr.load} equals closed form {load_a(regime, K, t)}")
    except UDNError as exc:
        check(False, f"scheme A failed: {exc}")
    if corrupt is not None and (corrupt[0] is UserClass.I or corrupt[0] not in regime_classes(regime)):
        raise UsageError(f"subtype {corrupt[0].value} has no MDS block in the {regime.value} regime")
    try:
        trb = run_scheme_b(config, demands, placement, corrupt=corrupt)
        check(True, f"scheme B: all {trb.decoded_users} users decode")
        closed = load_b_closed_form(regime, K, t)
        check(trb.load == closed, f"scheme B load {trb.load} equals closed form {closed}")
        for cls, h in trb.h.items():
            if cls in trb.measured_min:
                check(trb.measured_min[cls] >= h,
                      f"{cls.value}: every user reconstructs >= h = {h} signals (min {trb.measured_min[cls]})")
    except UDNError as exc:
        check(False, f"scheme B failed: {exc}")
    if not args.no_oracle:
        fams = sorted({c.family for c in regime_classes(regime)} - {"I"})
        for fam in fams:
            try:
                census = redundancy_census(fam, config.K1, config.K2, t)
            except OracleRefused as exc:
                raise UsageError(f"{exc}; rerun with smaller --k1/--k2/--t or pass --no-oracle") from None
            ok = census.counted_min == census.counted_max == census.formula.total
            check(ok, f"h oracle {fam}: brute force {census.counted_min} vs formula {census.formula.total} "
                      f"(parts {list(census.part_min)}; measured minimum {census.measured_min})")
    failed = sum(not ok for ok, _ in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_sweep(args) -> int:
    schemes = _schemes(args.schemes)
    reports = []
    if args.axis == "t":
        K = args.k1 * args.k2
        GridConfig(args.k1, args.k2, args.regime)  # validates the grid
        t_max = K if args.t_max is None else args.t_max
        ts = range(max(args.t_min, 0), min(t_max, K) + 1)
        if not ts:
            raise UsageError(f"empty t range [{args.t_min}, {t_max}]")
        for t in ts:
            reports += formula_reports(args.regime, args.k1, args.k2, t, schemes)
    else:
        ratio = Fraction(args.memory_ratio)
        sizes = []
        for item in args.sizes.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                a, b = (int(v) for v in item.lower().split("x"))
            except ValueError:
                raise UsageError(f"bad grid size {item!r}; expected e.g. 6x6") from None
            sizes.append((a, b))
        if not sizes:
            raise UsageError("empty grid-size list")
        for k1, k2 in sizes:
            GridConfig(k1, k2, args.regime)
            t = ratio * k1 * k2
            if t.denominator != 1:
                print(f"warning: skipping {k1}x{k2}: t = {t} is not an integer", file=sys.stderr)
                continue
            reports += formula_reports(args.regime, k1, k2, int(t), schemes)
        if not reports:
            raise UsageError("no grid size gives an integer t at this memory ratio")
    _emit_reports(args, reports)
    return EXIT_OK


def cmd_oracle(args) -> int:
    fams = ["II", "III", "IV"] if args.family == "all" else [args.family]
    rows, bad = [], 0
    for fam in fams:
        try:
            c = redundancy_census(fam, args.k1, args.k2, args.t)
        except OracleRefused as exc:
            raise UsageError(f"{exc}; try a smaller grid or t") from None
        ok = c.counted_min == c.counted_max == c.formula.total
        bad += not ok
        rows.append({"family": fam, "K1": args.k1, "K2": args.k2, "t": args.t,
                     "formula_parts": list(c.formula.parts), "formula_total": c.formula.total,
                     "bruteforce": c.counted_min, "measured_min": c.measured_min,
                     "measured_max": c.measured_max, "match": ok})
    if args.format == "json":
        _write(args, json.dumps(rows, indent=2) + "\n")
    else:
        lines = ["family,K1,K2,t,formula_total,bruteforce,measured_min,match"]
        lines += [f"{r['family']},{r['K1']},{r['K2']},{r['t']},{r['formula_total']},{r['bruteforce']},"
                  f"{r['measured_min']},{str(r['match']).lower()}" for r in rows]
        _write(args, "\n".join(lines) + "\n")
    return EXIT_FAIL if bad else EXIT_OK


def cmd_census(args) -> int:
    report = region_census(args.r, args.samples, args.seed)
    _write(args, json.dumps(report, indent=2) + "\n")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "verify": cmd_verify, "sweep": cmd_sweep, "oracle": cmd_oracle, "census": cmd_census}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InvalidParameter, OracleRefused) as exc:
        print(f"udncache: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UDNError as exc:
        print(f"udncache: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
