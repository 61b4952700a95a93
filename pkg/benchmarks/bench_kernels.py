"""Throughput comparison of the compiled and pure-Python training kernels.

Every backend runs the same single-threaded SGD pass over one synthetic
encoded corpus, starting from identical parameter tables and the same
stream state, so the comparison is update-for-update the same work. The
pure-Python kernel is the reference implementation; the compiled one is
the same loop in C. The gap is one to two orders of magnitude, growing
with row width since the fallback pays per-update numpy overhead.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --tokens 200000 --kind matrix --dim 16
"""

import argparse
import time

import numpy as np

from qdense import backend
from qdense.corpus import NegativeSampler
from qdense.rng import seed_state
from qdense.trainer import init_tables


def synth_corpus(n_tokens: int, vocab_size: int, line_len: int, seed: int):
    """Zipf-distributed token ids chopped into fixed-length lines."""
    g = np.random.default_rng(seed)
    weights = 1.0 / (np.arange(vocab_size) + 1.0)
    weights /= weights.sum()
    ids = g.choice(vocab_size, size=n_tokens, p=weights).astype(np.int32)
    n_lines = (n_tokens + line_len - 1) // line_len
    offsets = np.minimum(
        np.arange(n_lines + 1, dtype=np.int64) * line_len, n_tokens
    )
    counts = np.bincount(ids, minlength=vocab_size).astype(np.int64)
    counts[counts == 0] = 1
    return ids, offsets, counts


def run_once(kernel, kind, dim, ids, offsets, counts, neg_table, args):
    tables = init_tables(kind, dim, len(counts), args.seed)
    mult = np.asarray(tables.multipliers(), dtype=np.float64)
    keep = np.ones(len(counts))  # no subsampling: fixed workload per token
    total = int(ids.shape[0])
    t0 = time.perf_counter()
    state, done, positives = kernel.train_chunk(
        ids, offsets, 0, len(offsets) - 1,
        tables.word, tables.context, mult, keep, 0, neg_table,
        args.window, args.negatives, 0.025, 0.025e-4,
        0, total, seed_state(args.seed),
    )
    return time.perf_counter() - t0, int(state), int(done), int(positives)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="benchmark the SGD kernels on one synthetic epoch"
    )
    parser.add_argument("--tokens", type=int, default=40_000)
    parser.add_argument("--vocab", type=int, default=2_000)
    parser.add_argument("--line-len", type=int, default=40)
    parser.add_argument("--window", type=int, default=5)
    parser.add_argument("--negatives", type=int, default=5)
    parser.add_argument(
        "--kind", choices=["vector", "matrix", "both"], default="both"
    )
    parser.add_argument(
        "--dim", type=int, default=None,
        help="per-word size; defaults to 100 (vector) or 12 (matrix)",
    )
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args(argv)

    if args.tokens < 1 or args.window < 1 or args.negatives < 0:
        parser.error("need tokens >= 1, window >= 1, negatives >= 0")
    ids, offsets, counts = synth_corpus(
        args.tokens, args.vocab, args.line_len, args.seed
    )
    neg_table = NegativeSampler(counts, table_size=1_000_000).table
    names = backend.available_backends()
    if "c" not in names:
        print("note: compiled kernel not built, timing the fallback only")
    print(
        f"{args.tokens} tokens, vocab {args.vocab}, window {args.window}, "
        f"{args.negatives} negatives, one epoch per run"
    )

    kinds = ["vector", "matrix"] if args.kind == "both" else [args.kind]
    for kind in kinds:
        dim = args.dim if args.dim is not None else (100 if kind == "vector" else 12)
        outcomes = {}
        for name in names:
            kernel = backend.get_kernel(name)
            elapsed, state, done, positives = run_once(
                kernel, kind, dim, ids, offsets, counts, neg_table, args
            )
            outcomes[name] = (elapsed, state, done, positives)
            print(
                f"  {kind:<6} dim {dim:>3}  {name:<6}  {elapsed:8.3f}s  "
                f"{done / elapsed:>11,.0f} tokens/s  "
                f"{positives / elapsed:>11,.0f} positives/s"
            )
        if len(outcomes) == 2:
            (ec, sc, dc, pc), (ep, sp, dp, pp) = outcomes["c"], outcomes["python"]
            if (sc, dc, pc) != (sp, dp, pp):
                print("  WARNING: backends disagreed on the pair stream")
                return 1
            print(f"  {kind:<6} speedup: {ep / ec:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
