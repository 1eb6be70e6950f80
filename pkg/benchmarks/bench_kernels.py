"""Compare the compiled and pure-Python PrefixSpan kernels.

Two workloads: random itemset sequences, and the real kernel inputs recorded
while the reverse miner runs on a generated corpus. Prints a CSV row per
workload and backend.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--db 60] [--seed 1]
"""
from __future__ import annotations

import argparse
import csv
import random
import sys
import time

from tseqmine import _span_py, prefixspan
from tseqmine.compiler import compile_sequence
from tseqmine.datagen import GeneratorConfig, generate
from tseqmine.reverse import MinerConfig, ReverseMiner

try:
    from tseqmine import _span
except ImportError:
    _span = None


def random_inputs(seed: int, n_calls: int = 40):
    rng = random.Random(seed)
    calls = []
    for _ in range(n_calls):
        alpha = rng.randint(4, 12)
        n = rng.randint(10, 40)
        groups = sorted(rng.randrange(n // 2 + 1) for _ in range(n))
        seqs = [[sorted(rng.sample(range(alpha), rng.randint(1, 3)))
                 for _ in range(rng.randint(1, 8))] for _ in range(n)]
        calls.append((seqs, groups, alpha, max(2, n // 8), 4))
    return calls


def recorded_inputs(db_size: int, seed: int):
    """Kernel calls made by one reverse-miner run, captured through the wrapper."""
    calls = []
    real = prefixspan.span

    def spy(seqs, groups, alpha, min_support, max_items=-1):
        calls.append((seqs, groups, alpha, min_support, max_items))
        return real(seqs, groups, alpha, min_support, max_items)

    cfg = GeneratorConfig(db_size=db_size, v_avg=5, seed=seed)
    db, _ = generate(cfg)
    prefixspan.span = spy
    try:
        ReverseMiner([(d.gid, compile_sequence(d)) for d in db], MinerConfig(0.1)).run()
    finally:
        prefixspan.span = real
    return calls


def timed(fn, calls, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        for c in calls:
            fn(*c)
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--db", type=int, default=60)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    workloads = {"random": random_inputs(args.seed),
                 "miner": recorded_inputs(args.db, args.seed)}
    backends = {"python": _span_py.span}
    if _span is not None:
        backends["cython"] = _span.span
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["workload", "calls", "backend", "seconds", "speedup"])
    for name, calls in workloads.items():
        # both backends must agree before their times mean anything
        if _span is not None:
            for c in calls:
                if _span.span(*c) != _span_py.span(*c):
                    raise SystemExit(f"backends disagree on workload {name}")
        base = timed(backends["python"], calls, args.repeat)
        for backend, fn in backends.items():
            t = base if backend == "python" else timed(fn, calls, args.repeat)
            out.writerow([name, len(calls), backend, f"{t:.4f}", f"{base / t:.1f}"])


if __name__ == "__main__":
    main()
