"""Pure-Python training kernel; the reference the compiled twin must match.

Random draws follow the canonical order documented on
``corpus.training_pairs``: subsample survival per token, then per center one
window draw, then per positive one table draw per negative. The compiled
kernel consumes the identical LCG stream, so both backends see the same
pairs in the same order.

The parameter tables are float32; all arithmetic runs in float64 and is
truncated back on store, matching the compiled kernel's double math. Word
and context live in separate tables, so an update never aliases even when a
pair relates a word id to itself.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

_MASK = (1 << 64) - 1
_MUL = 6364136223846793005
_INC = 1442695040888963407
_INV_2_53 = 1.0 / 9007199254740992.0


def _sigmoid(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def train_chunk(
    ids,
    offsets,
    line_lo,
    line_hi,
    word,
    ctx,
    mult,
    keep,
    use_subsample,
    neg_table,
    window,
    negatives,
    lr_initial,
    lr_floor,
    tokens_done,
    tokens_planned,
    rng_state,
):
    """Run SGD over lines [line_lo, line_hi) of an encoded corpus.

    Returns (rng_state, tokens_done, positive_pairs) with the stream state
    and token counter advanced past the chunk, ready for the next call.
    """
    state = int(rng_state)
    table_size = int(neg_table.shape[0])
    denom = float(tokens_planned) if tokens_planned > 0 else 1.0
    positives = 0

    for line in range(line_lo, line_hi):
        start = int(offsets[line])
        stop = int(offsets[line + 1])
        n_line = stop - start
        if n_line == 0:
            continue

        if use_subsample:
            surv_ids = []
            surv_pos = []
            for t in range(n_line):
                state = (state * _MUL + _INC) & _MASK
                u = (state >> 11) * _INV_2_53
                wid = int(ids[start + t])
                if u < keep[wid]:
                    surv_ids.append(wid)
                    surv_pos.append(t)
        else:
            surv_ids = [int(ids[start + t]) for t in range(n_line)]
            surv_pos = list(range(n_line))

        n = len(surv_ids)
        for i in range(n):
            w = surv_ids[i]
            progress = (tokens_done + surv_pos[i]) / denom
            lr = lr_initial * (1.0 - progress)
            if lr < lr_floor:
                lr = lr_floor
            state = (state * _MUL + _INC) & _MASK
            radius = 1 + int(((state >> 11) * _INV_2_53) * window)
            lo = i - radius if i >= radius else 0
            hi = min(n - 1, i + radius)
            for j in range(lo, hi + 1):
                if j == i:
                    continue
                _pair_update(word, ctx, mult, w, surv_ids[j], 1.0, lr)
                positives += 1
                for _ in range(negatives):
                    state = (state * _MUL + _INC) & _MASK
                    c = int(neg_table[int(((state >> 11) * _INV_2_53) * table_size)])
                    _pair_update(word, ctx, mult, w, c, 0.0, lr)

        tokens_done += n_line

    return state, tokens_done, positives


def _pair_update(word, ctx, mult, w, c, label, lr):
    w_old = word[w].astype(np.float64)
    c_old = ctx[c].astype(np.float64)
    s = float(np.dot(mult * w_old, c_old))
    g = lr * (label - _sigmoid(s))
    word[w] = (w_old + g * c_old).astype(np.float32)
    ctx[c] = (c_old + g * w_old).astype(np.float32)


def record_pairs(
    ids,
    offsets,
    line_lo,
    line_hi,
    keep,
    use_subsample,
    neg_table,
    window,
    negatives,
    rng_state,
    capacity,
):
    """Emit the pair stream train_chunk would consume, without training.

    Returns (centers, contexts, labels, center_positions, rng_state) where
    center_positions holds each pair's center token index into ``ids``
    (pre-subsampling position, the index the lr schedule would use).
    """
    state = int(rng_state)
    table_size = int(neg_table.shape[0])
    centers: list[int] = []
    contexts: list[int] = []
    labels: list[int] = []
    positions: list[int] = []

    for line in range(line_lo, line_hi):
        start = int(offsets[line])
        stop = int(offsets[line + 1])
        n_line = stop - start
        if n_line == 0:
            continue
        if use_subsample:
            surv_ids = []
            surv_pos = []
            for t in range(n_line):
                state = (state * _MUL + _INC) & _MASK
                u = (state >> 11) * _INV_2_53
                wid = int(ids[start + t])
                if u < keep[wid]:
                    surv_ids.append(wid)
                    surv_pos.append(start + t)
        else:
            surv_ids = [int(ids[start + t]) for t in range(n_line)]
            surv_pos = list(range(start, stop))

        n = len(surv_ids)
        for i in range(n):
            w = surv_ids[i]
            state = (state * _MUL + _INC) & _MASK
            radius = 1 + int(((state >> 11) * _INV_2_53) * window)
            lo = i - radius if i >= radius else 0
            hi = min(n - 1, i + radius)
            for j in range(lo, hi + 1):
                if j == i:
                    continue
                centers.append(w)
                contexts.append(surv_ids[j])
                labels.append(1)
                positions.append(surv_pos[i])
                for _ in range(negatives):
                    state = (state * _MUL + _INC) & _MASK
                    c = int(neg_table[int(((state >> 11) * _INV_2_53) * table_size)])
                    centers.append(w)
                    contexts.append(c)
                    labels.append(0)
                    positions.append(surv_pos[i])

    if len(centers) > capacity:
        raise ValueError(f"pair stream exceeds capacity {capacity}")
    return (
        np.array(centers, dtype=np.int32),
        np.array(contexts, dtype=np.int32),
        np.array(labels, dtype=np.int32),
        np.array(positions, dtype=np.int64),
        state,
    )
