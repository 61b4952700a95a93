"""Analogy solving and evaluation with a mixed additive/bilinear score.

For a question "a is to b as c is to ?" and candidate d, the score blends
two terms controlled by a mix weight alpha:

    score(d) = [ <d, b-a+c>^2 + alpha * (<d,b>^2 - <d,a>^2 + <d,c>^2) ] / <d,d>

where <.,.> is the kind-appropriate inner product (dot for vectors, trace
form for packed symmetric matrices). alpha = 0 reduces to a squared-cosine
offset rule; alpha = 1 adds the candidate's bilinear agreement with each cue
word separately. Candidates a, b, c are always excluded.

Question words and representations are looked up in a model's vocabulary;
evaluation normalizes every row to unit norm first, so <d,d> = 1 for every
candidate and the bracketed numerator alone ranks.

Datasets: the category-sectioned four-words-per-line analogy file format
(": category" headers, categories whose name starts with "gram" form the
syntactic group, the rest the semantic group) and directory trees of
tab-separated pair files with slash-separated answer alternatives (grouped
into inflectional/derivational morphology and encyclopedic/lexicographic
semantics by the customary directory or file-name prefixes).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import ZeroNormError, inner_multipliers, packed_dim
from .trainer import Model

GOOGLE_SEMANTIC = "google-semantic"
GOOGLE_SYNTACTIC = "google-syntactic"
BATS_GROUPS = {
    "1": "bats-inflectional-morphology",
    "2": "bats-derivational-morphology",
    "3": "bats-encyclopedic-semantics",
    "4": "bats-lexicographic-semantics",
}
_BATS_LETTER_GROUPS = {
    "I": BATS_GROUPS["1"],
    "D": BATS_GROUPS["2"],
    "E": BATS_GROUPS["3"],
    "L": BATS_GROUPS["4"],
}

DEFAULT_ALPHA_GRID = [round(i * 0.1, 10) for i in range(-5, 13)]


class DatasetFormatError(ValueError):
    """An analogy dataset file does not parse."""


class OutOfVocabularyError(LookupError):
    """A question word is missing from the model vocabulary."""


@dataclass(frozen=True)
class AnalogyQuestion:
    a: str
    b: str
    c: str
    answers: tuple[str, ...]
    category: str


@dataclass
class AnalogyDataset:
    name: str
    questions: list[AnalogyQuestion]
    group_of: dict[str, str]

    def categories(self) -> list[str]:
        seen: dict[str, None] = {}
        for q in self.questions:
            seen.setdefault(q.category, None)
        return list(seen)


def load_google(path, lowercase: bool = True) -> AnalogyDataset:
    """Parse a category-sectioned analogy file (4 words per line)."""
    questions: list[AnalogyQuestion] = []
    group_of: dict[str, str] = {}
    category = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.startswith(":"):
                category = line[1:].strip()
                if not category:
                    raise DatasetFormatError(f"{path}:{lineno}: empty category name")
                group_of[category] = (
                    GOOGLE_SYNTACTIC
                    if category.startswith("gram")
                    else GOOGLE_SEMANTIC
                )
                continue
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4:
                raise DatasetFormatError(
                    f"{path}:{lineno}: expected 4 words, found {len(parts)}"
                )
            if category is None:
                raise DatasetFormatError(
                    f"{path}:{lineno}: question appears before any ':' header"
                )
            if lowercase:
                parts = [p.lower() for p in parts]
            a, b, c, d = parts
            questions.append(AnalogyQuestion(a, b, c, (d,), category))
    return AnalogyDataset("google", questions, group_of)


def _bats_group(rel_path: Path) -> str:
    for part in rel_path.parts[:-1]:
        if part[:1] in BATS_GROUPS:
            return BATS_GROUPS[part[:1]]
    letter = rel_path.name[:1].upper()
    if letter in _BATS_LETTER_GROUPS:
        return _BATS_LETTER_GROUPS[letter]
    raise DatasetFormatError(
        f"{rel_path}: cannot infer a relation group from the path"
    )


def load_bats(root, lowercase: bool = True) -> AnalogyDataset:
    """Parse a directory tree of tab-separated pair files.

    Each file holds one relation: lines "a<TAB>b" where b may be several
    slash-separated alternatives. Every ordered pair of distinct lines
    (i, j) becomes one question: a_i : b_i(first alternative) :: a_j : any
    alternative of b_j.
    """
    root = Path(root)
    files = sorted(
        (p for p in root.rglob("*.txt") if p.is_file()),
        key=lambda p: str(p.relative_to(root)),
    )
    if not files:
        raise DatasetFormatError(f"{root}: no .txt relation files found")
    questions: list[AnalogyQuestion] = []
    group_of: dict[str, str] = {}
    for path in files:
        rel = path.relative_to(root)
        group = _bats_group(rel)
        category = path.stem
        group_of[category] = group
        pairs: list[tuple[str, tuple[str, ...]]] = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                parts = line.split()
                if not parts:
                    continue
                if len(parts) != 2:
                    raise DatasetFormatError(
                        f"{path}:{lineno}: expected 'word<TAB>answers', found "
                        f"{len(parts)} fields"
                    )
                left, right = parts
                if lowercase:
                    left, right = left.lower(), right.lower()
                answers = tuple(x for x in right.split("/") if x)
                if not answers:
                    raise DatasetFormatError(f"{path}:{lineno}: empty answer set")
                pairs.append((left, answers))
        for i, (a, b_answers) in enumerate(pairs):
            b = b_answers[0]
            for j, (c, d_answers) in enumerate(pairs):
                if i == j:
                    continue
                questions.append(AnalogyQuestion(a, b, c, d_answers, category))
    return AnalogyDataset("bats", questions, group_of)


def score_vector_mixed(a, b, c, d, alpha: float) -> float:
    """Reference scalar scorer for the vector kind; see the module docstring."""
    a, b, c, d = (np.asarray(x, dtype=np.float64) for x in (a, b, c, d))
    dd = float(np.dot(d, d))
    if dd == 0.0:
        raise ZeroNormError("candidate has zero norm")
    u = b - a + c
    base = float(np.dot(d, u)) ** 2
    delta = (
        float(np.dot(d, b)) ** 2
        - float(np.dot(d, a)) ** 2
        + float(np.dot(d, c)) ** 2
    )
    return (base + alpha * delta) / dd


def score_matrix_mixed(a, b, c, d, alpha: float) -> float:
    """Reference scalar scorer for the packed matrix kind.

    Equivalent to scoring with the rank-preserving Kronecker lift: for
    symmetric X, Y the lifted inner product Tr((X kron X)(Y kron Y)) equals
    Tr(XY)^2, so the squares below never materialize a kron product.
    """
    a, b, c, d = (np.asarray(x, dtype=np.float64) for x in (a, b, c, d))
    m = inner_multipliers(packed_dim(d.shape[0]))
    dd = float(np.dot(d * m, d))
    if dd == 0.0:
        raise ZeroNormError("candidate has zero norm")
    u = b - a + c
    base = float(np.dot(d * m, u)) ** 2
    delta = (
        float(np.dot(d * m, b)) ** 2
        - float(np.dot(d * m, a)) ** 2
        + float(np.dot(d * m, c)) ** 2
    )
    return (base + alpha * delta) / dd


def score_mixed(a, b, c, d, alpha: float, kind: str) -> float:
    if kind == "vector":
        return score_vector_mixed(a, b, c, d, alpha)
    if kind == "matrix":
        return score_matrix_mixed(a, b, c, d, alpha)
    raise ValueError(f"unknown representation kind {kind!r}")


class _Scorer:
    """Batch scorer over a model's unit-normalized rows.

    Per cue word w it caches s_w = T M q_w, the inner products of w against
    every candidate. Linearity gives the offset term for free:
    <d, b-a+c> = s_b - s_a + s_c per candidate, so one question needs at
    most three cached matrix-vector products and the whole alpha grid
    reuses them.
    """

    def __init__(self, model: Model):
        self.vocab = model.vocab
        table, valid = model.unit_table()
        self._tm = table * model.multipliers()
        self._table = table
        self._invalid = ~valid
        self._cache: dict[int, np.ndarray] = {}

    def _sims(self, wid: int) -> np.ndarray:
        s = self._cache.get(wid)
        if s is None:
            s = self._tm @ self._table[wid]
            self._cache[wid] = s
        return s

    def resolve(self, question: AnalogyQuestion) -> tuple[int, int, int]:
        ids = []
        for w in (question.a, question.b, question.c):
            wid = self.vocab.id_of.get(w)
            if wid is None:
                raise OutOfVocabularyError(w)
            ids.append(wid)
        return tuple(ids)

    def components(self, a_id: int, b_id: int, c_id: int):
        """(base, delta, offset) score components per candidate; the mixed
        score at any alpha is base + alpha*delta, and offset is the plain
        (unsquared) offset inner product."""
        sa, sb, sc = self._sims(a_id), self._sims(b_id), self._sims(c_id)
        offset = sb - sa + sc
        base = offset * offset
        delta = sb * sb - sa * sa + sc * sc
        return base, delta, offset

    def rank(
        self,
        a_id: int,
        b_id: int,
        c_id: int,
        alpha: float,
        *,
        plain_cosine: bool = False,
        k: int = 1,
    ) -> np.ndarray:
        base, delta, offset = self.components(a_id, b_id, c_id)
        if plain_cosine and alpha == 0.0:
            scores = offset.copy()
        else:
            scores = base + alpha * delta
        scores[[a_id, b_id, c_id]] = -np.inf
        scores[self._invalid] = -np.inf
        if k == 1:
            top = int(np.argmax(scores))
            if not np.isfinite(scores[top]):
                return np.array([], dtype=np.intp)
            return np.array([top])
        order = np.argsort(-scores, kind="stable")
        order = order[np.isfinite(scores[order])]
        return order[:k]


def solve(
    model: Model,
    a: str,
    b: str,
    c: str,
    alpha: float = 0.0,
    k: int = 1,
    *,
    plain_cosine_at_zero: bool = False,
) -> list[str]:
    """Top-k answer words for one analogy; a, b, c never appear in the
    result, so fewer than k words come back when valid candidates run out.
    Raises OutOfVocabularyError for unknown cue words."""
    scorer = _Scorer(model)
    ids = scorer.resolve(AnalogyQuestion(a, b, c, (), ""))
    top = scorer.rank(*ids, alpha, plain_cosine=plain_cosine_at_zero, k=k)
    return [model.vocab.words[i] for i in top]


@dataclass
class Tally:
    attempted: int = 0
    skipped: int = 0
    correct: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.attempted if self.attempted else 0.0

    def add(self, other: "Tally") -> None:
        self.attempted += other.attempted
        self.skipped += other.skipped
        self.correct += other.correct


@dataclass
class AnalogyReport:
    """Per-category outcome of one evaluation pass at one mix weight."""

    dataset: str
    alpha: float
    plain_cosine_at_zero: bool
    categories: dict[str, Tally]
    group_of: dict[str, str] = field(repr=False)

    def overall(self) -> Tally:
        total = Tally()
        for tally in self.categories.values():
            total.add(tally)
        return total

    def by_group(self) -> dict[str, Tally]:
        groups: dict[str, Tally] = {}
        for cat, tally in self.categories.items():
            groups.setdefault(self.group_of[cat], Tally()).add(tally)
        return groups

    def to_text(self) -> str:
        width = max([len(c) for c in self.categories] + [20])
        tag = " (plain cosine)" if self.plain_cosine_at_zero and self.alpha == 0 else ""
        total = self.overall()
        lines = [
            f"{self.dataset} analogies, alpha {self.alpha:+.2f}{tag}: "
            f"{total.correct}/{total.attempted} correct "
            f"({100 * total.accuracy:.2f}%), {total.skipped} skipped",
            f"{'category':<{width}}  {'group':<28} {'att':>6} {'skip':>6} "
            f"{'corr':>6} {'acc%':>7}",
        ]
        for cat, t in self.categories.items():
            lines.append(
                f"{cat:<{width}}  {self.group_of[cat]:<28} {t.attempted:>6} "
                f"{t.skipped:>6} {t.correct:>6} {100 * t.accuracy:>7.2f}"
            )
        for group, t in self.by_group().items():
            lines.append(
                f"{'[' + group + ']':<{width}}  {'':<28} {t.attempted:>6} "
                f"{t.skipped:>6} {t.correct:>6} {100 * t.accuracy:>7.2f}"
            )
        return "\n".join(lines)


def evaluate(
    model: Model,
    dataset: AnalogyDataset,
    alpha: float = 0.0,
    *,
    plain_cosine_at_zero: bool = False,
    scorer: _Scorer | None = None,
) -> AnalogyReport:
    """Score every question at one mix weight.

    Questions with an out-of-vocabulary cue word, or whose answer set lies
    entirely out of vocabulary, are counted as skipped in their category.
    Ties rank the lower word id first, so results are deterministic.
    """
    reports = alpha_sweep(
        model,
        dataset,
        [alpha],
        plain_cosine_at_zero=plain_cosine_at_zero,
        scorer=scorer,
    )
    return reports[0]


def alpha_sweep(
    model: Model,
    dataset: AnalogyDataset,
    alphas,
    *,
    plain_cosine_at_zero: bool = False,
    scorer: _Scorer | None = None,
) -> list[AnalogyReport]:
    """Evaluate the whole dataset at every alpha in one pass.

    The per-question score components are computed once and reused across
    the grid, so a full sweep costs little more than a single evaluation.
    """
    alphas = [float(a) for a in alphas]
    if scorer is None:
        scorer = _Scorer(model)
    vocab = model.vocab
    reports = [
        AnalogyReport(
            dataset.name,
            alpha,
            plain_cosine_at_zero,
            {c: Tally() for c in dataset.categories()},
            dataset.group_of,
        )
        for alpha in alphas
    ]
    for q in dataset.questions:
        try:
            a_id, b_id, c_id = scorer.resolve(q)
        except OutOfVocabularyError:
            for rep in reports:
                rep.categories[q.category].skipped += 1
            continue
        answer_ids = {vocab.id_of[w] for w in q.answers if w in vocab.id_of}
        if not answer_ids:
            for rep in reports:
                rep.categories[q.category].skipped += 1
            continue
        base, delta, offset = scorer.components(a_id, b_id, c_id)
        excluded = [a_id, b_id, c_id]
        for alpha, rep in zip(alphas, reports):
            if plain_cosine_at_zero and alpha == 0.0:
                scores = offset.copy()
            else:
                scores = base + alpha * delta
            scores[excluded] = -np.inf
            scores[scorer._invalid] = -np.inf
            tally = rep.categories[q.category]
            tally.attempted += 1
            if int(np.argmax(scores)) in answer_ids:
                tally.correct += 1
    return reports


def sweep_table_text(reports: list[AnalogyReport]) -> str:
    """Mix-weight sweep as a text matrix: one row per alpha, one column per
    relation group plus the overall column."""
    groups: dict[str, None] = {}
    for rep in reports:
        for g in rep.by_group():
            groups.setdefault(g, None)
    names = list(groups)
    header = "alpha  " + "  ".join(f"{g:>28}" for g in names) + f"  {'overall':>8}"
    lines = [header]
    for rep in reports:
        cells = []
        by_group = rep.by_group()
        for g in names:
            t = by_group.get(g)
            cells.append(f"{100 * t.accuracy:>28.2f}" if t else f"{'-':>28}")
        total = rep.overall()
        lines.append(
            f"{rep.alpha:+.2f}  " + "  ".join(cells) + f"  {100 * total.accuracy:>8.2f}"
        )
    return "\n".join(lines)


def write_report_tsv(reports: list[AnalogyReport], path) -> None:
    """One row per category per alpha: category, alpha, attempted, skipped,
    correct, accuracy (fraction in [0, 1])."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("category\talpha\tattempted\tskipped\tcorrect\taccuracy\n")
        for rep in reports:
            for cat, t in rep.categories.items():
                fh.write(
                    f"{cat}\t{rep.alpha:g}\t{t.attempted}\t{t.skipped}\t"
                    f"{t.correct}\t{t.accuracy:.6f}\n"
                )


def parse_alpha_grid(spec: str) -> list[float]:
    """Parse "lo:hi:step" into an inclusive grid of mix weights."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected LO:HI:STEP, got {spec!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise ValueError(f"expected numeric LO:HI:STEP, got {spec!r}") from None
    if step <= 0:
        raise ValueError("alpha grid step must be positive")
    if hi < lo:
        raise ValueError("alpha grid upper bound below lower bound")
    out = []
    k = 0
    while True:
        val = round(lo + k * step, 10)
        if val > hi + 1e-9:
            break
        out.append(val)
        k += 1
    return out
