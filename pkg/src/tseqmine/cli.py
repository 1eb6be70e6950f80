"""Command line: compile, mine, verify, gen, ingest, bench, stats.

Exit codes: 0 ok, 1 usage, 2 unreadable input, 3 miners disagree, 4 timeout.
"""
from __future__ import annotations

import argparse
import csv
import sys
from collections import Counter

from . import baseline, datagen, reverse
from .compiler import InitialState, compile_sequence, ingest_edge_log
from .formats import (ParseError, PatternRecord, read_gsq, read_patterns,
                      read_tsq, sniff, write_gsq, write_patterns, write_tsq)
from .model import is_relevant
from .reverse import MinerConfig, MiningStats, MiningTimeout, Share

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_MISMATCH, EXIT_TIMEOUT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _min_support(text: str) -> int | float:
    """'3' is an absolute count, '0.1' or '10%' a fraction of the database."""
    text = text.strip()
    try:
        if text.endswith("%"):
            share = float(text[:-1]) / 100
            if not 0 < share <= 1:
                raise argparse.ArgumentTypeError("a percentage must lie in (0, 100]")
            return Share(share)
        if any(c in text for c in ".eE"):
            value: int | float = float(text)
        else:
            value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a support value: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("min-support must be positive")
    if isinstance(value, float) and value >= 1:
        if not value.is_integer():
            raise argparse.ArgumentTypeError("fractional min-support must be below 1")
        return int(value)
    return Share(value) if isinstance(value, float) else value


def _initial(text: str) -> InitialState:
    try:
        return InitialState(text)
    except ValueError:
        choices = ", ".join(m.value for m in InitialState)
        raise argparse.ArgumentTypeError(f"expected one of {choices}") from None


def load_db(path: str, initial: InitialState = InitialState.EMIT_INITIAL_INSERTS):
    """(gid, transformation sequence) pairs from a .gsq or .tsq file."""
    kind = sniff(path)
    with open(path, encoding="utf-8") as fh:
        if kind == "tsq":
            return read_tsq(fh, source=path)
        return [(d.gid, compile_sequence(d, initial)) for d in read_gsq(fh, source=path)]


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _write(path, writer, *args, header: str = ""):
    fh, close = _open_out(path)
    try:
        fh.write(header)
        writer(*args, fh)
    finally:
        if close:
            fh.close()


def _config(args) -> MinerConfig:
    return MinerConfig(args.min_sup, max_rules=args.max_rules, timeout=args.timeout)


def _run_miner(algo: str, db, cfg: MinerConfig, jobs: int, stats: MiningStats | None = None,
               all_fts: bool = False):
    if algo == "reverse":
        return [PatternRecord(m.sequence, m.support) for m in reverse.mine(db, cfg, jobs, stats)]
    fts = baseline.mine_all_fts(db, cfg, stats, jobs)
    if all_fts:
        return [PatternRecord(f.sequence, f.support) for f in fts]
    return [PatternRecord(m.sequence, m.support) for m in baseline.filter_relevant(fts)]


# --------------------------------------------------------------------------
# subcommands


def cmd_compile(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        seqs = read_gsq(fh, source=args.input)
    db = [(d.gid, compile_sequence(d, args.initial)) for d in seqs]
    _write(args.output, write_tsq, db)
    return EXIT_OK


def cmd_mine(args) -> int:
    if args.all_fts and args.algo != "baseline":
        raise UsageError("--all-fts needs --algo baseline")
    db = load_db(args.input, args.initial)
    try:
        records = _run_miner(args.algo, db, _config(args), args.jobs, all_fts=args.all_fts)
    except MiningTimeout as exc:
        print(f"timeout: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    _write(args.output, write_patterns, records)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .canonical import canonical_form

    db = load_db(args.input, args.initial)
    cfg = _config(args)
    try:
        rev = reverse.mine(db, cfg, args.jobs)
        base = baseline.mine(db, cfg, args.jobs)
    except MiningTimeout as exc:
        print(f"timeout: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    a = {(m.code, m.support): m for m in rev}
    b = {(m.code, m.support): m for m in base}
    print(f"reverse: {len(rev)} patterns ({len(rev) - len(a)} duplicates)")
    print(f"baseline: {len(base)} patterns")
    only_a, only_b = sorted(set(a) - set(b), key=repr), sorted(set(b) - set(a), key=repr)
    for key in only_a:
        print(f"only reverse: {canonical_form(a[key].sequence).sequence} support {key[1]}")
    for key in only_b:
        print(f"only baseline: {b[key].sequence} support {key[1]}")
    if only_a or only_b or len(rev) != len(a):
        return EXIT_MISMATCH
    print("equal")
    return EXIT_OK


def _gen_config(args) -> datagen.GeneratorConfig:
    return datagen.GeneratorConfig(
        p_i=args.pi, p_d=args.pd, v_avg=args.vavg, v_embed_avg=args.vembed,
        n_labels_v=args.lv, n_labels_e=args.le, n_embedded=args.n, db_size=args.db,
        p_edge=args.pe, d_ist=args.dist, seed=args.seed)


def cmd_gen(args) -> int:
    try:
        cfg = _gen_config(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        db, planted = datagen.generate(cfg)
    except datagen.GenerationError as exc:
        raise UsageError(f"cannot generate with these parameters: {exc}") from None
    _write(args.output, write_gsq, db, header=cfg.header())
    if args.planted:
        _write(args.planted, write_tsq, [(f"p{i}", p) for i, p in enumerate(planted)],
               header=cfg.header())
    return EXIT_OK


def cmd_ingest(args) -> int:
    with open(args.input, encoding="utf-8", newline="") as fh:
        report = ingest_edge_log(fh, args.window, args.snap)
    if report.fatal:
        lineno, msg = report.errors[0]
        raise ParseError(lineno, msg, args.input)
    for lineno, msg in report.errors:
        print(f"{args.input}:{lineno}: skipped: {msg}", file=sys.stderr)
    _write(args.output, write_gsq, report.sequences)
    return EXIT_OK


def cmd_bench(args) -> int:
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["algo", "db", "vavg", "min_sup", "patterns", "candidates",
                  "seconds", "irrelevance_ratio"])
    code = EXIT_OK
    for size in args.db:
        for vavg in args.vavg:
            cfg = datagen.GeneratorConfig(db_size=size, v_avg=vavg, seed=args.seed)
            graphs, _ = datagen.generate(cfg)
            db = [(d.gid, compile_sequence(d)) for d in graphs]
            for ms in args.min_sup:
                mcfg = MinerConfig(ms, max_rules=args.max_rules, timeout=args.timeout)
                for algo in args.algo:
                    st = MiningStats()
                    try:
                        if algo == "reverse":
                            n = len(reverse.mine(db, mcfg, 1, st))
                            ratio = ""
                        else:
                            fts = baseline.mine_all_fts(db, mcfg, st)
                            n = len(fts) - round(baseline.irrelevance_ratio(fts) * len(fts))
                            ratio = f"{baseline.irrelevance_ratio(fts):.4f}"
                    except MiningTimeout:
                        out.writerow([algo, size, vavg, ms, "", "", "timeout", ""])
                        code = EXIT_TIMEOUT
                        continue
                    out.writerow([algo, size, vavg, ms, n, st.candidates,
                                  f"{st.seconds:.3f}", ratio])
                    sys.stdout.flush()
    return code


def cmd_stats(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        records = read_patterns(fh, source=args.input)
    hist = Counter(len(r.sequence) for r in records)
    irrelevant = sum(1 for r in records if not is_relevant(r.sequence))
    print(f"patterns: {len(records)}")
    for n in sorted(hist):
        print(f"length {n}: {hist[n]}")
    if records:
        print(f"irrelevant: {irrelevant}")
        print(f"irrelevance ratio: {irrelevant / len(records):.4f}")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tseqmine", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def miner_opts(sp):
        sp.add_argument("--min-sup", type=_min_support, required=True,
                        help="absolute count, or a fraction like 0.1 or 10%%")
        sp.add_argument("--max-rules", type=int, default=None)
        sp.add_argument("--timeout", type=float, default=None, help="seconds")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--initial", type=_initial, default=InitialState.EMIT_INITIAL_INSERTS)

    sp = sub.add_parser("compile", help="graph sequences to transformation sequences")
    sp.add_argument("input")
    sp.add_argument("-o", "--output", default="-")
    sp.add_argument("--initial", type=_initial, default=InitialState.EMIT_INITIAL_INSERTS)
    sp.set_defaults(func=cmd_compile)

    sp = sub.add_parser("mine", help="mine relevant frequent patterns")
    sp.add_argument("input")
    sp.add_argument("--algo", choices=["reverse", "baseline"], default="reverse")
    sp.add_argument("--all-fts", action="store_true",
                    help="baseline only: keep disconnected patterns too")
    sp.add_argument("-o", "--output", default="-")
    miner_opts(sp)
    sp.set_defaults(func=cmd_mine)

    sp = sub.add_parser("verify", help="run both miners and compare")
    sp.add_argument("input")
    miner_opts(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("gen", help="generate a synthetic database")
    d = datagen.GeneratorConfig()
    sp.add_argument("--pi", type=float, default=d.p_i)
    sp.add_argument("--pd", type=float, default=d.p_d)
    sp.add_argument("--vavg", type=float, default=d.v_avg)
    sp.add_argument("--vembed", type=float, default=d.v_embed_avg)
    sp.add_argument("--lv", type=int, default=d.n_labels_v)
    sp.add_argument("--le", type=int, default=d.n_labels_e)
    sp.add_argument("--n", type=int, default=d.n_embedded)
    sp.add_argument("--db", type=int, default=d.db_size)
    sp.add_argument("--pe", type=float, default=d.p_edge)
    sp.add_argument("--dist", type=int, default=d.d_ist)
    sp.add_argument("--seed", type=int, default=d.seed)
    sp.add_argument("-o", "--output", default="-")
    sp.add_argument("--planted", default=None, help="write planted patterns here")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("ingest", help="timestamped edge CSV to graph sequences")
    sp.add_argument("input")
    sp.add_argument("--window", required=True, help="e.g. 7d")
    sp.add_argument("--snap", default=None, help="e.g. 1d (defaults to the window)")
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("bench", help="candidate counts of both miners on generated data")
    sp.add_argument("--min-sup", type=_min_support, nargs="+", default=[0.1, 0.15])
    sp.add_argument("--db", type=int, nargs="+", default=[200])
    sp.add_argument("--vavg", type=float, nargs="+", default=[5])
    sp.add_argument("--algo", nargs="+", choices=["reverse", "baseline"],
                    default=["reverse", "baseline"])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-rules", type=int, default=None)
    sp.add_argument("--timeout", type=float, default=None)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("stats", help="summarise a pattern file")
    sp.add_argument("input")
    sp.set_defaults(func=cmd_stats)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"tseqmine: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"tseqmine: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (OSError, UnicodeDecodeError) as exc:
        print(f"tseqmine: {exc}", file=sys.stderr)
        return EXIT_PARSE


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
