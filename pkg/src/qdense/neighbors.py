"""Nearest-neighbor queries, including per-eigenstate neighborhoods.

For matrix-kind models a word's representation decomposes into eigenstates;
each eigenstate (lambda, v) queries the table as its signed rank-one
projector sign(lambda) * vv^T, with sign(0) counted positive. Candidates
stay whole stored matrices, so an eigenstate column shows which words the
stored table aligns with along that single direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import ZeroNormError, eigendecompose, packed_norm, pure_state_projector
from .trainer import Model


class UnsupportedKindError(ValueError):
    """The query needs a representation kind the model does not have."""


def _rank(model: Model, query: np.ndarray, k: int, exclude_ids) -> list[tuple[str, float]]:
    table, valid = model.unit_table()
    q = np.asarray(query, dtype=np.float64)
    mult = model.multipliers()
    qn = float(np.sqrt(np.dot(q * mult, q)))
    if qn == 0.0:
        raise ZeroNormError("query representation has zero norm")
    sims = (table * mult) @ (q / qn)
    sims[~valid] = -np.inf
    for wid in exclude_ids:
        sims[wid] = -np.inf
    n_candidates = int(valid.sum()) - sum(1 for w in exclude_ids if valid[w])
    k = min(k, max(n_candidates, 0))
    order = np.argsort(-sims, kind="stable")[:k]
    return [(model.vocab.words[int(i)], float(np.clip(sims[i], -1.0, 1.0))) for i in order]


def nearest(model: Model, word: str, k: int = 10) -> list[tuple[str, float]]:
    """k nearest words by kind-appropriate cosine; the query word itself is
    excluded. Ties resolve to the lower word id."""
    wid = model.vocab.id_of.get(word)
    if wid is None:
        raise KeyError(f"word {word!r} is not in the vocabulary")
    return _rank(model, model.word[wid], k, [wid])


@dataclass
class NeighborColumn:
    label: str
    eigenvalue: float | None
    neighbors: list[tuple[str, float]]


@dataclass
class NeighborTable:
    """One full-matrix column plus one column per eigenstate, ascending
    eigenvalue order."""

    word: str
    columns: list[NeighborColumn]

    def to_text(self) -> str:
        depth = max((len(c.neighbors) for c in self.columns), default=0)
        widths = []
        for col in self.columns:
            cells = [col.label] + [w for w, _ in col.neighbors]
            widths.append(max(len(s) for s in cells))
        header = "  ".join(c.label.rjust(w) for c, w in zip(self.columns, widths))
        lines = [f"neighbors of {self.word!r}", header]
        for r in range(depth):
            cells = []
            for col, w in zip(self.columns, widths):
                cells.append(
                    col.neighbors[r][0].rjust(w) if r < len(col.neighbors) else " " * w
                )
            lines.append("  ".join(cells))
        return "\n".join(lines)

    def to_delimited(self) -> str:
        lines = ["column\teigenvalue\trank\tword\tsimilarity"]
        for col in self.columns:
            ev = "" if col.eigenvalue is None else f"{col.eigenvalue:.9g}"
            for rank, (word, sim) in enumerate(col.neighbors, start=1):
                lines.append(f"{col.label}\t{ev}\t{rank}\t{word}\t{sim:.6f}")
        return "\n".join(lines) + "\n"


def eigen_neighbors(model: Model, word: str, k: int = 19) -> NeighborTable:
    """Neighbor table of a matrix-kind word: whole-matrix cosine first,
    then one column per eigenstate projector, eigenvalues ascending."""
    if model.kind != "matrix":
        raise UnsupportedKindError(
            "eigenstate neighborhoods need a matrix-kind model"
        )
    wid = model.vocab.id_of.get(word)
    if wid is None:
        raise KeyError(f"word {word!r} is not in the vocabulary")
    packed = model.word[wid].astype(np.float64)
    if packed_norm(packed) == 0.0:
        raise ZeroNormError(f"word {word!r} has a zero representation")
    columns = [NeighborColumn("full", None, _rank(model, packed, k, [wid]))]
    eig = eigendecompose(packed)
    for lam, vec in zip(eig.values, eig.vectors.T):
        proj = pure_state_projector(lam, vec)
        columns.append(
            NeighborColumn(f"{lam:+.4f}", float(lam), _rank(model, proj, k, [wid]))
        )
    return NeighborTable(word, columns)
