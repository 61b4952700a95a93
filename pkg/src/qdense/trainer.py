"""Skip-gram negative-sampling trainer over vector or matrix representations.

Both kinds train the same objective: push the kind-appropriate inner product
of (word, context) representations through a sigmoid toward 1 for observed
pairs and 0 for sampled negatives. For the matrix kind the inner product is
the trace form over packed storage, which is the only place the kinds
differ; the update rule itself is shared.

Defaults follow the usual skip-gram recipe: window 5, 5 epochs, 10
negatives, subsampling threshold 1e-3, low-frequency cutoff 20, initial
learning rate 0.025 decaying linearly to a floor of 1e-4 of itself.
"""

from __future__ import annotations

import math
import sys
import threading
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import backend as backend_mod
from .algebra import inner_multipliers, kind_inner, packed_length
from .corpus import (
    NegativeSampler,
    TrainingPair,
    Vocabulary,
    build_vocab_from_file,
    encode_corpus,
    keep_probability_table,
    training_pairs,
)
from .rng import Lcg

KINDS = ("vector", "matrix")
MAX_MATRIX_DIM = 32
MAX_VECTOR_DIM = 1024


@dataclass
class TrainerConfig:
    """Hyperparameters for one training run.

    ``dim`` is the vector length for kind "vector" and the matrix side
    length for kind "matrix"; the per-word parameter count is dim or
    dim*(dim+1)//2 respectively.
    """

    kind: str
    dim: int
    window: int = 5
    epochs: int = 5
    negatives: int = 10
    subsample_t: float = 1e-3
    min_count: int = 20
    lr_initial: float = 0.025
    lr_floor: float | None = None
    seed: int = 1
    workers: int = 1
    table_size: int = 5_000_000

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        limit = MAX_MATRIX_DIM if self.kind == "matrix" else MAX_VECTOR_DIM
        if not 1 <= self.dim <= limit:
            raise ValueError(
                f"dim for kind {self.kind!r} must be in 1..{limit}, got {self.dim}"
            )
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if self.negatives < 0:
            raise ValueError(f"negatives must be >= 0, got {self.negatives}")
        if self.min_count < 1:
            raise ValueError(f"min_count must be >= 1, got {self.min_count}")
        if self.lr_initial <= 0:
            raise ValueError(f"lr_initial must be > 0, got {self.lr_initial}")
        if self.lr_floor is None:
            self.lr_floor = self.lr_initial * 1e-4
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    @property
    def params_per_word(self) -> int:
        return packed_length(self.dim) if self.kind == "matrix" else self.dim


def sigmoid(x):
    """Numerically stable logistic function; scalar in, float out."""
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def log_sigmoid(x) -> float:
    """log(sigmoid(x)) without overflow on either tail."""
    if x >= 0.0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


def pair_loss(w_repr, c_repr, label: int, kind: str) -> float:
    """Negative log-likelihood of one (word, context, label) observation."""
    s = kind_inner(w_repr, c_repr, kind)
    return -log_sigmoid(s) if label else -log_sigmoid(-s)


def lr_at(progress: float, lr_initial: float, lr_floor: float) -> float:
    """Linear decay clamped to the floor; progress in [0, 1]."""
    return max(lr_floor, lr_initial * (1.0 - progress))


@dataclass
class ParameterTables:
    """Word and context parameter rows, one per vocabulary id.

    Separate tables mean an update never writes through both sides of a
    pair at once, even for a word paired with itself.
    """

    kind: str
    dim: int
    word: np.ndarray
    context: np.ndarray

    @property
    def n_params(self) -> int:
        return self.word.shape[1]

    def multipliers(self) -> np.ndarray:
        if self.kind == "matrix":
            return inner_multipliers(self.dim)
        return np.ones(self.dim)


def init_tables(
    kind: str,
    dim: int,
    vocab_size: int,
    seed: int = 1,
    dtype=np.float32,
) -> ParameterTables:
    """Word rows uniform in [-0.5, 0.5]/n_params, context rows zero."""
    n_params = packed_length(dim) if kind == "matrix" else dim
    rng = np.random.default_rng(seed)
    word = ((rng.random((vocab_size, n_params)) - 0.5) / n_params).astype(dtype)
    context = np.zeros((vocab_size, n_params), dtype=dtype)
    return ParameterTables(kind, dim, word, context)


def sgd_step(tables: ParameterTables, pair: TrainingPair, lr: float) -> None:
    """One in-place SGD update; the pre-update word row feeds the context
    update, and arithmetic runs in float64 regardless of table dtype."""
    w, c, label = pair
    w_old = tables.word[w].astype(np.float64)
    c_old = tables.context[c].astype(np.float64)
    mult = tables.multipliers()
    g = lr * (label - sigmoid(float(np.dot(mult * w_old, c_old))))
    dtype = tables.word.dtype
    tables.word[w] = (w_old + g * c_old).astype(dtype)
    tables.context[c] = (c_old + g * w_old).astype(dtype)


def epoch_mean_loss(pairs: Sequence[TrainingPair], tables: ParameterTables) -> float:
    """Mean pair loss over a fixed sample, summed with fsum so the result
    is independent of pair order."""
    if len(pairs) == 0:
        raise ValueError("cannot average a loss over zero pairs")
    word, context, kind = tables.word, tables.context, tables.kind
    return math.fsum(
        pair_loss(word[w], context[c], label, kind) for w, c, label in pairs
    ) / len(pairs)


@dataclass
class Model:
    """A trained embedding table plus the vocabulary describing its rows."""

    kind: str
    dim: int
    vocab: Vocabulary
    word: np.ndarray
    context: np.ndarray | None = None
    epoch_losses: list[float] | None = field(default=None, repr=False)

    @property
    def n_params(self) -> int:
        return self.word.shape[1]

    def representation(self, word: str) -> np.ndarray:
        return self.word[self.vocab.word_id(word)]

    def multipliers(self) -> np.ndarray:
        if self.kind == "matrix":
            return inner_multipliers(self.dim)
        return np.ones(self.dim)

    def unit_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Float64 word table with unit-norm rows, plus a validity mask.

        Norms follow the representation kind (Euclidean or Frobenius via
        the trace form). Zero-norm rows stay zero and are flagged False.
        """
        table = self.word.astype(np.float64)
        sq = (table * table) @ self.multipliers()
        valid = sq > 0.0
        norms = np.sqrt(np.where(valid, sq, 1.0))
        return table / norms[:, None], valid


def _loss_sample(
    ids: np.ndarray,
    offsets: np.ndarray,
    vocab: Vocabulary,
    config: TrainerConfig,
    sampler: NegativeSampler | None,
    size: int,
) -> list[TrainingPair]:
    # fixed monitoring sample, drawn from its own stream so training draws
    # are untouched; subsampling off keeps it deterministic
    if size <= 0:
        return []
    rng = Lcg(config.seed ^ 0x5EED5EED)
    out: list[TrainingPair] = []
    for line in range(len(offsets) - 1):
        span = ids[offsets[line] : offsets[line + 1]]
        if span.size == 0:
            continue
        for pair in training_pairs(
            span, vocab, config.window, config.negatives, rng, sampler=sampler
        ):
            out.append(pair)
            if len(out) >= size:
                return out
    return out


def _shard_lines(offsets: np.ndarray, workers: int) -> list[tuple[int, int]]:
    # contiguous line ranges with roughly equal token counts
    n_lines = len(offsets) - 1
    total = int(offsets[-1])
    shards = []
    lo = 0
    for w in range(workers):
        target = total * (w + 1) // workers
        hi = lo
        while hi < n_lines and offsets[hi + 1] <= target:
            hi += 1
        if w == workers - 1:
            hi = n_lines
        shards.append((lo, hi))
        lo = hi
    return shards


def train(
    corpus_path,
    config: TrainerConfig,
    *,
    backend: str | None = None,
    verbose: bool = False,
    loss_sample_size: int = 2000,
    keep_context: bool = True,
) -> Model:
    """Train a model over a tokenized corpus file.

    Args:
        corpus_path: text corpus, one document per line.
        config: hyperparameters; see TrainerConfig.
        backend: kernel override ("c" or "python"); default auto-selects.
        verbose: emit progress lines to stderr.
        loss_sample_size: pairs in the fixed loss-monitoring sample; the
            sample's mean loss is recorded before epoch 1 and after every
            epoch on Model.epoch_losses. 0 disables monitoring.
        keep_context: retain the context table on the returned Model.

    Returns:
        Model with float32 word (and optionally context) rows.
    """
    kernel = backend_mod.get_kernel(backend)
    vocab = build_vocab_from_file(corpus_path, config.min_count)
    ids, offsets = encode_corpus(corpus_path, vocab)
    tables = init_tables(config.kind, config.dim, len(vocab), config.seed)
    mult = np.asarray(tables.multipliers(), dtype=np.float64)
    keep = keep_probability_table(vocab, config.subsample_t)
    use_subsample = 1 if config.subsample_t > 0 else 0

    sampler = None
    if config.negatives > 0:
        sampler = NegativeSampler(
            vocab.counts, table_size=max(config.table_size, len(vocab))
        )
        neg_table = sampler.table
    else:
        neg_table = np.zeros(1, dtype=np.int32)

    sample = _loss_sample(ids, offsets, vocab, config, sampler, loss_sample_size)
    losses: list[float] = []
    if sample:
        losses.append(epoch_mean_loss(sample, tables))

    shards = _shard_lines(offsets, config.workers)
    states = [Lcg(config.seed + 1_000_003 * w).state for w in range(config.workers)]
    done = [0] * config.workers
    planned = [
        config.epochs * int(offsets[hi] - offsets[lo]) for lo, hi in shards
    ]
    total_planned = sum(planned)
    t0 = time.monotonic()

    def run_shard(widx: int, chunk_lines: int = 2000) -> None:
        lo, hi = shards[widx]
        line = lo
        while line < hi:
            stop = min(line + chunk_lines, hi)
            states[widx], done[widx], _ = kernel.train_chunk(
                ids, offsets, line, stop,
                tables.word, tables.context, mult, keep, use_subsample,
                neg_table, config.window, config.negatives,
                config.lr_initial, config.lr_floor,
                done[widx], planned[widx], states[widx],
            )
            line = stop
            if verbose and widx == 0:
                frac = sum(done) / max(1, total_planned)
                lr_now = lr_at(done[0] / max(1, planned[0]),
                               config.lr_initial, config.lr_floor)
                sys.stderr.write(
                    f"\repoch {epoch + 1}/{config.epochs}"
                    f"  {100.0 * frac:5.1f}%  lr {lr_now:.5f}"
                    f"  {time.monotonic() - t0:6.1f}s"
                )
                sys.stderr.flush()

    for epoch in range(config.epochs):
        if config.workers == 1:
            run_shard(0)
        else:
            threads = [
                threading.Thread(target=run_shard, args=(w,))
                for w in range(config.workers)
            ]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
        if sample:
            losses.append(epoch_mean_loss(sample, tables))
    if verbose:
        sys.stderr.write("\n")

    return Model(
        kind=config.kind,
        dim=config.dim,
        vocab=vocab,
        word=tables.word,
        context=tables.context if keep_context else None,
        epoch_losses=losses if sample else None,
    )
