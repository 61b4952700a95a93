"""Corpus handling: vocabulary, subsampling, negative sampling, pair streams.

Input corpora are plain text, one document per line, whitespace-separated,
already lowercased and tokenized; no linguistic normalization happens here.

The pair stream defined by :func:`training_pairs` is the reference semantics
for skip-gram training. Both training kernels replicate its random-draw
order exactly, so the sequence of (center, context, label) triples a kernel
consumes can be checked against this generator draw for draw.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .rng import Lcg


class EmptyCorpusError(ValueError):
    """No token survived vocabulary construction."""


@dataclass
class Vocabulary:
    """Token inventory ordered by descending corpus frequency.

    Attributes:
        words: token strings, most frequent first; ties keep first-occurrence
            order, so construction is fully deterministic.
        counts: occurrence count per word id (same order as ``words``).
        total_tokens: number of tokens seen before any filtering. Kept for
            subsampling frequencies, which are relative to the raw stream.
        id_of: word string -> integer id.
    """

    words: list[str]
    counts: np.ndarray
    total_tokens: int
    id_of: dict[str, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.id_of

    def word_id(self, word: str) -> int:
        return self.id_of[word]


def _vocab_from_counter(counter: Counter, total: int, min_count: int) -> Vocabulary:
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    # Counter iteration order is first-occurrence order; the stable sort
    # keeps it as the tie-break within equal counts.
    items = sorted(counter.items(), key=lambda kv: -kv[1])
    items = [(w, c) for w, c in items if c >= min_count]
    if not items:
        raise EmptyCorpusError(
            f"no token reaches min_count={min_count} (saw {total} tokens)"
        )
    words = [w for w, _ in items]
    counts = np.array([c for _, c in items], dtype=np.int64)
    return Vocabulary(words, counts, total, {w: i for i, w in enumerate(words)})


def build_vocab(tokens: Iterable[str], min_count: int = 1) -> Vocabulary:
    """Count a token stream and keep words occurring at least min_count times.

    Args:
        tokens: iterable of token strings.
        min_count: low-frequency threshold; rarer words are discarded.

    Returns:
        Vocabulary over the retained words. ``total_tokens`` still counts
        every token seen, including discarded ones.

    Raises:
        EmptyCorpusError: if no word reaches the threshold.
    """
    counter: Counter = Counter()
    total = 0
    for tok in tokens:
        counter[tok] += 1
        total += 1
    return _vocab_from_counter(counter, total, min_count)


def build_vocab_from_file(path, min_count: int = 1, encoding: str = "utf-8") -> Vocabulary:
    """Stream a one-document-per-line text file into build_vocab."""
    counter: Counter = Counter()
    total = 0
    with open(path, "r", encoding=encoding) as fh:
        for line in fh:
            toks = line.split()
            counter.update(toks)
            total += len(toks)
    return _vocab_from_counter(counter, total, min_count)


def keep_probability(count: int, total_tokens: int, subsample_t: float) -> float:
    """Probability that one occurrence of a word survives subsampling.

    With word frequency f = count / total_tokens the survival probability is
    min(1, sqrt(t / f)); a threshold t <= 0 disables subsampling entirely.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if total_tokens < 1:
        raise ValueError(f"total_tokens must be >= 1, got {total_tokens}")
    if subsample_t <= 0.0:
        return 1.0
    freq = count / total_tokens
    return min(1.0, math.sqrt(subsample_t / freq))


def keep_probability_table(vocab: Vocabulary, subsample_t: float) -> np.ndarray:
    """Per-word-id survival probabilities as a float64 array."""
    if subsample_t <= 0.0:
        return np.ones(len(vocab))
    freq = vocab.counts / vocab.total_tokens
    return np.minimum(1.0, np.sqrt(subsample_t / freq))


class NegativeSampler:
    """Draws word ids proportional to count**power via a filled table.

    The table is an int32 array where word i occupies the slot range
    [floor(T * cum_{i-1}), floor(T * cum_i)) of the cumulative smoothed
    distribution, so a single uniform index draw samples the distribution to
    within 1/T resolution.
    """

    def __init__(self, counts, power: float = 0.75, table_size: int = 5_000_000):
        counts = np.asarray(counts, dtype=np.float64)
        if counts.ndim != 1 or counts.shape[0] == 0:
            raise ValueError("counts must be a non-empty 1-d sequence")
        if np.any(counts <= 0):
            raise ValueError("counts must be positive")
        if table_size < counts.shape[0]:
            raise ValueError(
                f"table_size {table_size} cannot cover {counts.shape[0]} words"
            )
        weights = counts**power
        cum = np.cumsum(weights)
        cum /= cum[-1]
        bounds = np.floor(cum * table_size).astype(np.int64)
        bounds[-1] = table_size  # guard the last slot against rounding down
        table = np.zeros(table_size, dtype=np.int32)
        start = 0
        for wid, stop in enumerate(bounds):
            if stop > start:
                table[start:stop] = wid
            start = stop
        self.table = table
        self.power = power

    def draw(self, rng: Lcg) -> int:
        return int(self.table[rng.randint(self.table.shape[0])])


class TrainingPair(NamedTuple):
    center: int
    context: int
    label: int


def training_pairs(
    document: Sequence,
    vocab: Vocabulary,
    window: int,
    negatives: int,
    rng_seed,
    *,
    subsample_t: float = 0.0,
    sampler: NegativeSampler | None = None,
) -> Iterator[TrainingPair]:
    """Skip-gram training pairs for one document, in canonical draw order.

    Draw protocol (the kernels implement the identical sequence):

    1. If subsampling is on, one uniform per token decides survival; the
       survivors form the new token sequence BEFORE windows are formed.
    2. Per surviving center, one uniform picks the window radius
       b = 1 + floor(u * window) in [1, window].
    3. Positions within b of the center (document-bounded, center excluded)
       yield one positive pair each, immediately followed by ``negatives``
       negative pairs, one table draw apiece. Collisions with the true
       context are kept, preserving the exact 1:negatives ratio.

    Args:
        document: token strings (out-of-vocabulary ones are dropped) or
            already-encoded integer ids.
        vocab: vocabulary the ids refer to.
        window: maximum window radius, >= 1.
        negatives: negative samples per positive pair, >= 0.
        rng_seed: integer seed, or an Lcg instance to continue a stream.
        subsample_t: frequent-word subsampling threshold; 0 disables.
        sampler: negative-sampling table to reuse; built on demand when
            omitted and ``negatives`` > 0.

    Yields:
        TrainingPair(center_id, context_id, label) with label 1 for observed
        pairs and 0 for sampled negatives.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if negatives < 0:
        raise ValueError(f"negatives must be >= 0, got {negatives}")
    ids: list[int] = []
    for tok in document:
        if isinstance(tok, str):
            wid = vocab.id_of.get(tok)
            if wid is not None:
                ids.append(wid)
        else:
            ids.append(int(tok))
    rng = rng_seed if isinstance(rng_seed, Lcg) else Lcg(rng_seed)
    if negatives > 0 and sampler is None:
        sampler = NegativeSampler(
            vocab.counts, table_size=max(1 << 20, len(vocab))
        )

    if subsample_t > 0.0:
        keep = keep_probability_table(vocab, subsample_t)
        survivors = [wid for wid in ids if rng.uniform() < keep[wid]]
    else:
        survivors = ids

    n = len(survivors)
    for i in range(n):
        center = survivors[i]
        radius = 1 + rng.randint(window)
        lo = max(0, i - radius)
        hi = min(n - 1, i + radius)
        for j in range(lo, hi + 1):
            if j == i:
                continue
            yield TrainingPair(center, survivors[j], 1)
            for _ in range(negatives):
                yield TrainingPair(center, sampler.draw(rng), 0)


def encode_corpus(path, vocab: Vocabulary, encoding: str = "utf-8"):
    """Encode a corpus file to a flat id array plus line boundaries.

    Out-of-vocabulary tokens are dropped. Returns (ids, offsets) where ids
    is int32 and line k spans ids[offsets[k]:offsets[k+1]]; empty lines
    survive as zero-length spans so line indexing matches the file.
    """
    chunks: list[np.ndarray] = []
    offsets = [0]
    pos = 0
    id_of = vocab.id_of
    with open(path, "r", encoding=encoding) as fh:
        for line in fh:
            encoded = [id_of[t] for t in line.split() if t in id_of]
            pos += len(encoded)
            offsets.append(pos)
            if encoded:
                chunks.append(np.array(encoded, dtype=np.int32))
    if chunks:
        ids = np.concatenate(chunks)
    else:
        ids = np.zeros(0, dtype=np.int32)
    return ids, np.array(offsets, dtype=np.int64)


def save_vocab(vocab: Vocabulary, path, encoding: str = "utf-8") -> None:
    """Write a vocabulary as 'V total_tokens' then one 'word count' per line."""
    with open(path, "w", encoding=encoding) as fh:
        fh.write(f"{len(vocab)} {vocab.total_tokens}\n")
        for word, count in zip(vocab.words, vocab.counts):
            fh.write(f"{word} {int(count)}\n")


def load_vocab(path, encoding: str = "utf-8") -> Vocabulary:
    """Inverse of save_vocab; validates the declared word count."""
    with open(path, "r", encoding=encoding) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: malformed vocabulary header {header!r}")
        size, total = int(header[0]), int(header[1])
        words: list[str] = []
        counts: list[int] = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'word count'")
            words.append(parts[0])
            counts.append(int(parts[1]))
    if len(words) != size:
        raise ValueError(f"{path}: header declares {size} words, found {len(words)}")
    return Vocabulary(
        words,
        np.array(counts, dtype=np.int64),
        total,
        {w: i for i, w in enumerate(words)},
    )
