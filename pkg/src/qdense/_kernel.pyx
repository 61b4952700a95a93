# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
# cython: language_level=3
"""Compiled training kernel; draw-for-draw twin of _kernel_py.

Same LCG stream, same update order, double arithmetic truncated to float32
on store. The main loop runs without the GIL so threads can share the
tables hogwild-style.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

BACKEND = "c"

ctypedef unsigned long long u64

cdef u64 _MUL = 6364136223846793005ULL
cdef u64 _INC = 1442695040888963407ULL
cdef double _INV_2_53 = 1.0 / 9007199254740992.0


cdef inline double _uniform(u64* state) nogil:
    state[0] = state[0] * _MUL + _INC
    return <double>(state[0] >> 11) * _INV_2_53


cdef inline double _sigmoid(double x) nogil:
    cdef double e
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


cdef inline void _pair_update(
    float[:, ::1] word,
    float[:, ::1] ctx,
    const double[::1] mult,
    Py_ssize_t w,
    Py_ssize_t c,
    double label,
    double lr,
) nogil:
    cdef Py_ssize_t k, n_params = word.shape[1]
    cdef double s = 0.0, g, w_old, c_old
    for k in range(n_params):
        s += mult[k] * word[w, k] * ctx[c, k]
    g = lr * (label - _sigmoid(s))
    for k in range(n_params):
        w_old = word[w, k]
        c_old = ctx[c, k]
        word[w, k] = <float>(w_old + g * c_old)
        ctx[c, k] = <float>(c_old + g * w_old)


def train_chunk(
    const int[::1] ids,
    const long long[::1] offsets,
    Py_ssize_t line_lo,
    Py_ssize_t line_hi,
    float[:, ::1] word,
    float[:, ::1] ctx,
    const double[::1] mult,
    const double[::1] keep,
    int use_subsample,
    const int[::1] neg_table,
    int window,
    int negatives,
    double lr_initial,
    double lr_floor,
    long long tokens_done,
    long long tokens_planned,
    u64 rng_state,
):
    """Run SGD over lines [line_lo, line_hi); see _kernel_py.train_chunk."""
    cdef u64 state = rng_state
    cdef Py_ssize_t table_size = neg_table.shape[0]
    cdef double denom = <double>tokens_planned if tokens_planned > 0 else 1.0
    cdef long long positives = 0
    cdef Py_ssize_t line, start, stop, n_line, t, i, j, lo, hi, n, w
    cdef int neg
    cdef Py_ssize_t radius
    cdef double u, progress, lr

    # scratch for the per-line survivor list
    cdef Py_ssize_t max_line = 0
    for line in range(line_lo, line_hi):
        n_line = <Py_ssize_t>(offsets[line + 1] - offsets[line])
        if n_line > max_line:
            max_line = n_line
    surv_ids_arr = np.empty(max(max_line, 1), dtype=np.intp)
    surv_pos_arr = np.empty(max(max_line, 1), dtype=np.intp)
    cdef Py_ssize_t[::1] surv_ids = surv_ids_arr
    cdef Py_ssize_t[::1] surv_pos = surv_pos_arr

    with nogil:
        for line in range(line_lo, line_hi):
            start = <Py_ssize_t>offsets[line]
            stop = <Py_ssize_t>offsets[line + 1]
            n_line = stop - start
            if n_line == 0:
                continue

            n = 0
            if use_subsample:
                for t in range(n_line):
                    u = _uniform(&state)
                    if u < keep[ids[start + t]]:
                        surv_ids[n] = ids[start + t]
                        surv_pos[n] = t
                        n += 1
            else:
                for t in range(n_line):
                    surv_ids[t] = ids[start + t]
                    surv_pos[t] = t
                n = n_line

            for i in range(n):
                w = surv_ids[i]
                progress = (tokens_done + surv_pos[i]) / denom
                lr = lr_initial * (1.0 - progress)
                if lr < lr_floor:
                    lr = lr_floor
                radius = 1 + <Py_ssize_t>(_uniform(&state) * window)
                lo = i - radius if i >= radius else 0
                hi = i + radius
                if hi > n - 1:
                    hi = n - 1
                for j in range(lo, hi + 1):
                    if j == i:
                        continue
                    _pair_update(word, ctx, mult, w, surv_ids[j], 1.0, lr)
                    positives += 1
                    for neg in range(negatives):
                        _pair_update(
                            word, ctx, mult, w,
                            neg_table[<Py_ssize_t>(_uniform(&state) * table_size)],
                            0.0, lr,
                        )

            tokens_done += n_line

    return state, tokens_done, positives


def record_pairs(
    const int[::1] ids,
    const long long[::1] offsets,
    Py_ssize_t line_lo,
    Py_ssize_t line_hi,
    const double[::1] keep,
    int use_subsample,
    const int[::1] neg_table,
    int window,
    int negatives,
    u64 rng_state,
    Py_ssize_t capacity,
):
    """Emit the pair stream without training; see _kernel_py.record_pairs."""
    cdef u64 state = rng_state
    cdef Py_ssize_t table_size = neg_table.shape[0]
    cdef Py_ssize_t line, start, stop, n_line, t, i, j, lo, hi, n, count = 0
    cdef Py_ssize_t radius
    cdef int w, neg
    cdef double u
    cdef int overflow = 0

    cdef Py_ssize_t max_line = 0
    for line in range(line_lo, line_hi):
        n_line = <Py_ssize_t>(offsets[line + 1] - offsets[line])
        if n_line > max_line:
            max_line = n_line
    surv_ids_arr = np.empty(max(max_line, 1), dtype=np.int32)
    surv_pos_arr = np.empty(max(max_line, 1), dtype=np.int64)
    cdef int[::1] surv_ids = surv_ids_arr
    cdef long long[::1] surv_pos = surv_pos_arr

    centers_arr = np.empty(capacity, dtype=np.int32)
    contexts_arr = np.empty(capacity, dtype=np.int32)
    labels_arr = np.empty(capacity, dtype=np.int32)
    positions_arr = np.empty(capacity, dtype=np.int64)
    cdef int[::1] centers = centers_arr
    cdef int[::1] contexts = contexts_arr
    cdef int[::1] labels = labels_arr
    cdef long long[::1] positions = positions_arr

    with nogil:
        for line in range(line_lo, line_hi):
            if overflow:
                break
            start = <Py_ssize_t>offsets[line]
            stop = <Py_ssize_t>offsets[line + 1]
            n_line = stop - start
            if n_line == 0:
                continue

            n = 0
            if use_subsample:
                for t in range(n_line):
                    u = _uniform(&state)
                    if u < keep[ids[start + t]]:
                        surv_ids[n] = ids[start + t]
                        surv_pos[n] = start + t
                        n += 1
            else:
                for t in range(n_line):
                    surv_ids[t] = ids[start + t]
                    surv_pos[t] = start + t
                n = n_line

            for i in range(n):
                if overflow:
                    break
                w = surv_ids[i]
                radius = 1 + <Py_ssize_t>(_uniform(&state) * window)
                lo = i - radius if i >= radius else 0
                hi = i + radius
                if hi > n - 1:
                    hi = n - 1
                for j in range(lo, hi + 1):
                    if j == i:
                        continue
                    if count + 1 + negatives > capacity:
                        overflow = 1
                        break
                    centers[count] = w
                    contexts[count] = surv_ids[j]
                    labels[count] = 1
                    positions[count] = surv_pos[i]
                    count += 1
                    for neg in range(negatives):
                        centers[count] = w
                        contexts[count] = neg_table[
                            <Py_ssize_t>(_uniform(&state) * table_size)
                        ]
                        labels[count] = 0
                        positions[count] = surv_pos[i]
                        count += 1

    if overflow:
        raise ValueError(f"pair stream exceeds capacity {capacity}")
    return (
        centers_arr[:count],
        contexts_arr[:count],
        labels_arr[:count],
        positions_arr[:count],
        state,
    )
