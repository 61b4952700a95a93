"""Command-line interface.

Subcommands: train, eval-analogy, neighbors, inspect. Exit codes: 0 on
success, 1 on runtime errors (missing files, bad formats, unknown words),
2 on usage errors (argparse's own convention).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import analogy, backend, modelio, neighbors
from .trainer import TrainerConfig, train


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdense",
        description="Train and analyze vector and symmetric-matrix word embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model on a tokenized corpus")
    p.add_argument("--corpus", required=True, help="text corpus, one document per line")
    p.add_argument("--kind", required=True, choices=("vector", "matrix"))
    p.add_argument("--dim", required=True, type=int,
                   help="vector length or matrix side length")
    p.add_argument("--out", required=True, help="output model path")
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--negatives", type=int, default=10)
    p.add_argument("--sample", type=float, default=1e-3,
                   help="frequent-word subsampling threshold (0 disables)")
    p.add_argument("--min-count", type=int, default=20)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("binary", "text"), default="binary")
    p.add_argument("--save-context", action="store_true",
                   help="persist the context table as well (binary format)")
    p.add_argument("--backend", choices=("c", "python"), default=None,
                   help="force a training kernel (default: compiled if available)")
    p.add_argument("--quiet", action="store_true", help="suppress progress output")

    p = sub.add_parser("eval-analogy", help="evaluate a model on analogy questions")
    p.add_argument("--model", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--google", help="category-sectioned question file")
    src.add_argument("--bats", help="directory tree of tab-separated pair files")
    mix = p.add_mutually_exclusive_group()
    mix.add_argument("--alpha", type=float, default=None, help="mix weight (default 0)")
    mix.add_argument("--alpha-grid", default=None, metavar="LO:HI:STEP",
                     help="sweep an inclusive mix-weight grid")
    p.add_argument("--plain-cosine-at-zero", action="store_true",
                   help="rank by plain instead of squared cosine when alpha is 0")
    p.add_argument("--report", default=None, metavar="TSV",
                   help="write per-category results to a TSV file")
    p.add_argument("--keep-case", action="store_true",
                   help="do not lowercase dataset words")

    p = sub.add_parser("neighbors", help="nearest neighbors of a word")
    p.add_argument("--model", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--k", type=int, default=19)
    p.add_argument("--eigen", action="store_true",
                   help="per-eigenstate columns (matrix models only)")
    p.add_argument("--tsv", action="store_true",
                   help="delimited output with similarities")

    p = sub.add_parser("inspect", help="print a model file's header and shape")
    p.add_argument("--model", required=True)
    return parser


def _cmd_train(args) -> int:
    config = TrainerConfig(
        kind=args.kind,
        dim=args.dim,
        window=args.window,
        epochs=args.epochs,
        negatives=args.negatives,
        subsample_t=args.sample,
        min_count=args.min_count,
        lr_initial=args.lr,
        seed=args.seed,
        workers=args.workers,
    )
    model = train(
        args.corpus, config, backend=args.backend, verbose=not args.quiet
    )
    modelio.save_model(
        model, args.out, fmt=args.format, include_context=args.save_context
    )
    losses = model.epoch_losses or []
    loss_note = f", loss {losses[0]:.4f} -> {losses[-1]:.4f}" if losses else ""
    print(
        f"trained {model.kind} dim={model.dim} ({model.n_params} params/word), "
        f"vocab {len(model.vocab)}, kernel {backend.get_kernel(args.backend).BACKEND}"
        f"{loss_note}; saved to {args.out}"
    )
    return 0


def _cmd_eval_analogy(args) -> int:
    model = modelio.load_model(args.model)
    lowercase = not args.keep_case
    if args.google:
        dataset = analogy.load_google(args.google, lowercase=lowercase)
    else:
        dataset = analogy.load_bats(args.bats, lowercase=lowercase)
    if args.alpha_grid is not None:
        alphas = analogy.parse_alpha_grid(args.alpha_grid)
    else:
        alphas = [args.alpha if args.alpha is not None else 0.0]
    reports = analogy.alpha_sweep(
        model, dataset, alphas, plain_cosine_at_zero=args.plain_cosine_at_zero
    )
    if len(reports) == 1:
        print(reports[0].to_text())
    else:
        print(analogy.sweep_table_text(reports))
    if args.report:
        analogy.write_report_tsv(reports, args.report)
        print(f"report written to {args.report}")
    return 0


def _cmd_neighbors(args) -> int:
    model = modelio.load_model(args.model)
    if args.eigen:
        table = neighbors.eigen_neighbors(model, args.word, k=args.k)
        sys.stdout.write(table.to_delimited() if args.tsv else table.to_text() + "\n")
    else:
        hits = neighbors.nearest(model, args.word, k=args.k)
        if args.tsv:
            for rank, (w, sim) in enumerate(hits, start=1):
                print(f"{rank}\t{w}\t{sim:.6f}")
        else:
            width = max((len(w) for w, _ in hits), default=4)
            print(f"neighbors of {args.word!r}")
            for w, sim in hits:
                print(f"  {w:<{width}}  {sim:+.4f}")
    return 0


def _cmd_inspect(args) -> int:
    model = modelio.load_model(args.model)
    norms = np.sqrt((model.word.astype(np.float64) ** 2 @ model.multipliers()))
    print(f"model: {args.model}")
    print(f"kind: {model.kind}")
    print(f"dim: {model.dim} ({model.n_params} parameters per word)")
    print(f"vocabulary: {len(model.vocab)} words, {model.vocab.total_tokens} corpus tokens")
    print(f"context table: {'present' if model.context is not None else 'absent'}")
    print(
        f"word norms: min {norms.min():.4f}, mean {norms.mean():.4f}, "
        f"max {norms.max():.4f}"
    )
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "eval-analogy": _cmd_eval_analogy,
    "neighbors": _cmd_neighbors,
    "inspect": _cmd_inspect,
}


def _glue_grid_value(argv: list[str]) -> list[str]:
    # argparse reads "--alpha-grid -0.5:1.2:0.1" as two flags because the
    # value starts with "-"; glue the pair into the "=" form it does accept
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--alpha-grid" and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = _build_parser().parse_args(_glue_grid_value(list(argv)))
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ValueError, LookupError) as err:
        print(f"qdense: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
