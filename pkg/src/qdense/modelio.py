"""Model persistence: a binary format, a text format, auto-detecting load.

Binary layout (all integers little-endian):

    bytes 0..8    magic b"QDENSE01"
    int32 x 4     kind tag (0 vector, 1 matrix), dim, vocab size, flags
                  (flag bit 0: context table present)
    int64         total corpus tokens
    per word      uint32 byte length, UTF-8 bytes, int64 corpus count
    float32 rows  word table, vocab x n_params, row-major
    [float32 rows context table, same shape, when flagged]

Float32 parameters round-trip bit-exactly. The text format is a header line
"vocab_size kind dim" followed by one "word p1 ... pN" line per word at 9
significant digits (enough to round-trip float32 exactly); it carries no
corpus counts, so loading one yields counts of 1. Plain "vocab_size dim"
headers are also accepted and imported as vector models, which covers the
classic text embedding interchange format.
"""

from __future__ import annotations

import struct

import numpy as np

from .algebra import packed_length
from .corpus import Vocabulary
from .trainer import KINDS, Model

MAGIC = b"QDENSE01"
_KIND_TAG = {"vector": 0, "matrix": 1}
_TAG_KIND = {v: k for k, v in _KIND_TAG.items()}
_MAX_WORD_BYTES = 1 << 20
_MAX_DIM = 1 << 20
_MAX_VOCAB = 1 << 31


class ModelFormatError(ValueError):
    """A model file does not parse; the message pins the failing location."""


def _n_params(kind: str, dim: int) -> int:
    return packed_length(dim) if kind == "matrix" else dim


def save_model(model: Model, path, fmt: str = "binary", include_context: bool = False) -> None:
    """Write a model; fmt is "binary" or "text".

    include_context persists the context table too (binary only); text
    output always holds the word table alone.
    """
    if fmt == "binary":
        _save_binary(model, path, include_context)
    elif fmt == "text":
        _save_text(model, path)
    else:
        raise ValueError(f"unknown model format {fmt!r}")


def _save_binary(model: Model, path, include_context: bool) -> None:
    if include_context and model.context is None:
        raise ValueError("model holds no context table to save")
    flags = 1 if include_context else 0
    word = np.ascontiguousarray(model.word, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(
            struct.pack(
                "<iiii", _KIND_TAG[model.kind], model.dim, len(model.vocab), flags
            )
        )
        fh.write(struct.pack("<q", model.vocab.total_tokens))
        for w, count in zip(model.vocab.words, model.vocab.counts):
            raw = w.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
            fh.write(struct.pack("<q", int(count)))
        fh.write(word.tobytes())
        if include_context:
            fh.write(np.ascontiguousarray(model.context, dtype="<f4").tobytes())


def _save_text(model: Model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(model.vocab)} {model.kind} {model.dim}\n")
        for wid, w in enumerate(model.vocab.words):
            row = " ".join(f"{v:.9g}" for v in model.word[wid])
            fh.write(f"{w} {row}\n")


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise ModelFormatError(
            f"{fh.name}: truncated at byte {fh.tell() - len(data)}: "
            f"expected {n} bytes of {what}, found {len(data)}"
        )
    return data


def _load_binary(path) -> Model:
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 8, "magic")
        if magic != MAGIC:
            raise ModelFormatError(f"{path}: bad magic {magic!r}")
        kind_tag, dim, size, flags = struct.unpack(
            "<iiii", _read_exact(fh, 16, "header")
        )
        if kind_tag not in _TAG_KIND:
            raise ModelFormatError(f"{path}: unknown kind tag {kind_tag}")
        kind = _TAG_KIND[kind_tag]
        if not 1 <= dim <= _MAX_DIM:
            raise ModelFormatError(f"{path}: implausible dim {dim}")
        if not 1 <= size <= _MAX_VOCAB:
            raise ModelFormatError(f"{path}: implausible vocab size {size}")
        if flags & ~1:
            raise ModelFormatError(f"{path}: unknown flag bits {flags:#x}")
        (total_tokens,) = struct.unpack("<q", _read_exact(fh, 8, "token count"))
        if total_tokens < 0:
            raise ModelFormatError(f"{path}: negative token count {total_tokens}")

        words: list[str] = []
        counts = np.empty(size, dtype=np.int64)
        for i in range(size):
            (wlen,) = struct.unpack("<I", _read_exact(fh, 4, "word length"))
            if wlen > _MAX_WORD_BYTES:
                raise ModelFormatError(
                    f"{path}: word {i} declares {wlen} bytes, over the "
                    f"{_MAX_WORD_BYTES} limit"
                )
            raw = _read_exact(fh, wlen, f"word {i}")
            try:
                words.append(raw.decode("utf-8"))
            except UnicodeDecodeError as exc:
                raise ModelFormatError(f"{path}: word {i} is not UTF-8") from exc
            (counts[i],) = struct.unpack("<q", _read_exact(fh, 8, f"count of word {i}"))

        n_params = _n_params(kind, dim)
        body = _read_exact(fh, 4 * size * n_params, "word table")
        word = np.frombuffer(body, dtype="<f4").reshape(size, n_params).copy()
        context = None
        if flags & 1:
            body = _read_exact(fh, 4 * size * n_params, "context table")
            context = np.frombuffer(body, dtype="<f4").reshape(size, n_params).copy()
        trailing = fh.read(1)
        if trailing:
            raise ModelFormatError(
                f"{path}: {fh.tell() - 1} bytes read, but data continues"
            )

    vocab = Vocabulary(words, counts, int(total_tokens), {w: i for i, w in enumerate(words)})
    if len(vocab.id_of) != size:
        raise ModelFormatError(f"{path}: duplicate words in vocabulary block")
    return Model(kind=kind, dim=dim, vocab=vocab, word=word, context=context)


def _load_text(path) -> Model:
    try:
        return _load_text_utf8(path)
    except UnicodeDecodeError as exc:
        raise ModelFormatError(f"{path}: not UTF-8 text and not binary") from exc


def _load_text_utf8(path) -> Model:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) == 3 and header[1] in KINDS:
            try:
                size, dim = int(header[0]), int(header[2])
            except ValueError:
                raise ModelFormatError(
                    f"{path}:1: malformed header {' '.join(header)!r}"
                ) from None
            kind = header[1]
        elif len(header) == 2:
            try:
                size, dim = int(header[0]), int(header[1])
            except ValueError:
                raise ModelFormatError(
                    f"{path}:1: malformed header {' '.join(header)!r}"
                ) from None
            kind = "vector"
        else:
            raise ModelFormatError(
                f"{path}:1: expected 'size kind dim' or 'size dim', got "
                f"{' '.join(header)!r}"
            )
        if size < 1 or dim < 1:
            raise ModelFormatError(f"{path}:1: implausible header values")

        n_params = _n_params(kind, dim)
        words: list[str] = []
        rows = np.empty((size, n_params), dtype=np.float32)
        lineno = 1
        for i in range(size):
            line = fh.readline()
            lineno += 1
            if not line:
                raise ModelFormatError(
                    f"{path}:{lineno}: file ends after {i} of {size} words"
                )
            parts = line.split()
            if len(parts) != n_params + 1:
                raise ModelFormatError(
                    f"{path}:{lineno}: expected a word and {n_params} values, "
                    f"found {len(parts)} fields"
                )
            words.append(parts[0])
            try:
                rows[i] = [float(v) for v in parts[1:]]
            except ValueError:
                raise ModelFormatError(
                    f"{path}:{lineno}: unparseable parameter value"
                ) from None
        if fh.readline().split():
            raise ModelFormatError(f"{path}:{lineno + 1}: more rows than declared")

    id_of = {w: i for i, w in enumerate(words)}
    if len(id_of) != size:
        raise ModelFormatError(f"{path}: duplicate words")
    vocab = Vocabulary(words, np.ones(size, dtype=np.int64), size, id_of)
    return Model(kind=kind, dim=dim, vocab=vocab, word=rows)


def load_model(path) -> Model:
    """Load a model, detecting binary vs text by the leading magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head == MAGIC:
        return _load_binary(path)
    return _load_text(path)
