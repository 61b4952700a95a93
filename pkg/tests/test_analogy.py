"""Analogy datasets, mixed scoring, sweeps, reports."""

import numpy as np
import pytest

from qdense import analogy as an
from qdense.algebra import ZeroNormError, pack
from qdense.corpus import Vocabulary
from qdense.trainer import Model

rng = np.random.default_rng(42)


def make_vector_model(rows: dict[str, list[float]]) -> Model:
    words = list(rows)
    vocab = Vocabulary(
        words,
        np.ones(len(words), dtype=np.int64),
        len(words),
        {w: i for i, w in enumerate(words)},
    )
    table = np.array([rows[w] for w in words], dtype=np.float32)
    return Model(kind="vector", dim=table.shape[1], vocab=vocab, word=table)


def make_matrix_model(rows: dict[str, list[float]], dim: int) -> Model:
    words = list(rows)
    vocab = Vocabulary(
        words,
        np.ones(len(words), dtype=np.int64),
        len(words),
        {w: i for i, w in enumerate(words)},
    )
    table = np.array([rows[w] for w in words], dtype=np.float32)
    return Model(kind="matrix", dim=dim, vocab=vocab, word=table)


GOOGLE_SAMPLE = """\
: capital-common-countries
Athens Greece Baghdad Iraq
Athens Greece Berlin Germany

: gram3-comparative
bad worse big bigger
"""


class TestLoadGoogle:
    def test_sections_and_groups(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text(GOOGLE_SAMPLE)
        ds = an.load_google(path)
        assert ds.name == "google"
        assert len(ds.questions) == 3
        assert ds.categories() == ["capital-common-countries", "gram3-comparative"]
        assert ds.group_of["capital-common-countries"] == an.GOOGLE_SEMANTIC
        assert ds.group_of["gram3-comparative"] == an.GOOGLE_SYNTACTIC

    def test_lowercases_by_default(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text(GOOGLE_SAMPLE)
        q = an.load_google(path).questions[0]
        assert (q.a, q.b, q.c, q.answers) == ("athens", "greece", "baghdad", ("iraq",))
        q = an.load_google(path, lowercase=False).questions[0]
        assert q.a == "Athens"

    def test_wrong_field_count(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text(": cat\none two three\n")
        with pytest.raises(an.DatasetFormatError, match="expected 4 words"):
            an.load_google(path)

    def test_question_before_header(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("one two three four\n")
        with pytest.raises(an.DatasetFormatError, match="before any"):
            an.load_google(path)

    def test_empty_category_name(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text(":   \none two three four\n")
        with pytest.raises(an.DatasetFormatError, match="empty category"):
            an.load_google(path)

    def test_full_scale_file(self, tmp_path):
        # replica of the customary benchmark's category sizes
        sizes = {
            "capital-common-countries": 506,
            "capital-world": 4524,
            "currency": 866,
            "city-in-state": 2467,
            "family": 506,
            "gram1-adjective-to-adverb": 992,
            "gram2-opposite": 812,
            "gram3-comparative": 1332,
            "gram4-superlative": 1122,
            "gram5-present-participle": 1056,
            "gram6-nationality-adjective": 1599,
            "gram7-past-tense": 1560,
            "gram8-plural": 1332,
            "gram9-plural-verbs": 870,
        }
        path = tmp_path / "g.txt"
        with open(path, "w") as fh:
            for ci, (cat, n) in enumerate(sizes.items()):
                fh.write(f": {cat}\n")
                for i in range(n):
                    fh.write(f"a{ci}x{i} b{ci}x{i} c{ci}x{i} d{ci}x{i}\n")
        ds = an.load_google(path)
        assert len(ds.questions) == 19544
        per_group = {an.GOOGLE_SEMANTIC: 0, an.GOOGLE_SYNTACTIC: 0}
        for q in ds.questions:
            per_group[ds.group_of[q.category]] += 1
        assert per_group[an.GOOGLE_SEMANTIC] == 8869
        assert per_group[an.GOOGLE_SYNTACTIC] == 10675


def write_bats_tree(root):
    d1 = root / "1_Inflectional_morphology"
    d2 = root / "2_Derivational_morphology"
    d3 = root / "3_Encyclopedic_semantics"
    d4 = root / "4_Lexicographic_semantics"
    for d in (d1, d2, d3, d4):
        d.mkdir(parents=True, exist_ok=True)
    (d1 / "I01 [noun - plural_reg].txt").write_text(
        "".join(f"noun{i}\tnouns{i}\n" for i in range(50))
    )
    (d2 / "D01 [noun+less_reg].txt").write_text("hope\thopeless\nuse\tuseless\n")
    (d3 / "E01 [country - capital].txt").write_text(
        "france\tparis\nperu\tlima\nchina\tbeijing\n"
    )
    (d4 / "L01 [hypernyms - animals].txt").write_text(
        "cat\tfeline/animal\ndog\tcanine/animal\n"
    )


class TestLoadBats:
    def test_ordered_pair_expansion(self, tmp_path):
        write_bats_tree(tmp_path)
        ds = an.load_bats(tmp_path)
        assert ds.name == "bats"
        per_cat = {}
        for q in ds.questions:
            per_cat[q.category] = per_cat.get(q.category, 0) + 1
        assert per_cat["I01 [noun - plural_reg]"] == 50 * 49
        assert per_cat["D01 [noun+less_reg]"] == 2
        assert per_cat["E01 [country - capital]"] == 6
        assert per_cat["L01 [hypernyms - animals]"] == 2

    def test_group_mapping(self, tmp_path):
        write_bats_tree(tmp_path)
        g = an.load_bats(tmp_path).group_of
        assert g["I01 [noun - plural_reg]"] == "bats-inflectional-morphology"
        assert g["D01 [noun+less_reg]"] == "bats-derivational-morphology"
        assert g["E01 [country - capital]"] == "bats-encyclopedic-semantics"
        assert g["L01 [hypernyms - animals]"] == "bats-lexicographic-semantics"

    def test_answer_alternatives(self, tmp_path):
        write_bats_tree(tmp_path)
        ds = an.load_bats(tmp_path)
        qs = [q for q in ds.questions if q.category.startswith("L01")]
        # b comes from the FIRST alternative; answers keep every alternative
        q = next(q for q in qs if q.a == "cat")
        assert q.b == "feline"
        assert q.c == "dog" and q.answers == ("canine", "animal")

    def test_letter_prefix_fallback_for_flat_files(self, tmp_path):
        (tmp_path / "E10 [animal - shelter].txt").write_text("dog\tkennel\nbee\thive\n")
        ds = an.load_bats(tmp_path)
        assert ds.group_of["E10 [animal - shelter]"] == "bats-encyclopedic-semantics"

    def test_unrecognizable_prefix(self, tmp_path):
        (tmp_path / "X99 strange.txt").write_text("a\tb\nc\td\n")
        with pytest.raises(an.DatasetFormatError, match="cannot infer"):
            an.load_bats(tmp_path)

    def test_empty_tree(self, tmp_path):
        with pytest.raises(an.DatasetFormatError, match="no .txt"):
            an.load_bats(tmp_path)

    def test_malformed_line(self, tmp_path):
        d = tmp_path / "1_Inflectional_morphology"
        d.mkdir()
        (d / "I01 bad.txt").write_text("one two three\n")
        with pytest.raises(an.DatasetFormatError, match="expected"):
            an.load_bats(tmp_path)

    def test_empty_answer_set(self, tmp_path):
        d = tmp_path / "1_Inflectional_morphology"
        d.mkdir()
        (d / "I01 bad.txt").write_text("one\t/\n")
        with pytest.raises(an.DatasetFormatError, match="empty answer"):
            an.load_bats(tmp_path)


class TestReferenceScorers:
    def test_vector_scorer_longhand(self):
        a = np.array([1.0, 0.0, 2.0])
        b = np.array([0.5, 1.0, 0.0])
        c = np.array([0.0, 2.0, 1.0])
        d = np.array([1.0, 1.0, 1.0])
        alpha = 0.7
        u = b - a + c
        want = (
            np.dot(d, u) ** 2
            + alpha * (np.dot(d, b) ** 2 - np.dot(d, a) ** 2 + np.dot(d, c) ** 2)
        ) / np.dot(d, d)
        got = an.score_vector_mixed(a, b, c, d, alpha)
        assert got == pytest.approx(float(want), rel=1e-14)

    def test_matrix_scorer_against_dense_traces(self):
        def tr(x, y):
            return float(np.trace(x @ y))

        mats = [
            (m + m.T) / 2 for m in (rng.normal(size=(3, 3)) for _ in range(4))
        ]
        ma, mb, mc, md = mats
        for alpha in (-0.5, 0.0, 0.6, 1.2):
            want = (
                tr(md, mb - ma + mc) ** 2
                + alpha * (tr(md, mb) ** 2 - tr(md, ma) ** 2 + tr(md, mc) ** 2)
            ) / tr(md, md)
            got = an.score_matrix_mixed(
                pack(ma), pack(mb), pack(mc), pack(md), alpha
            )
            assert got == pytest.approx(want, rel=1e-12)

    def test_squared_trace_equals_kron_lift(self):
        # Tr((A kron A)(B kron B)) == Tr(AB)^2, the rank-preserving lift
        ma = (lambda m: (m + m.T) / 2)(rng.normal(size=(3, 3)))
        mb = (lambda m: (m + m.T) / 2)(rng.normal(size=(3, 3)))
        lifted = float(np.trace(np.kron(ma, ma) @ np.kron(mb, mb)))
        assert lifted == pytest.approx(float(np.trace(ma @ mb)) ** 2, rel=1e-12)

    def test_zero_candidate_raises(self):
        v = np.ones(3)
        with pytest.raises(ZeroNormError):
            an.score_vector_mixed(v, v, v, np.zeros(3), 0.0)
        p = np.ones(6)
        with pytest.raises(ZeroNormError):
            an.score_matrix_mixed(p, p, p, np.zeros(6), 0.0)

    def test_dispatch(self):
        v = np.array([1.0, 2.0])
        assert an.score_mixed(v, v, v, v, 0.3, "vector") == pytest.approx(
            an.score_vector_mixed(v, v, v, v, 0.3)
        )
        with pytest.raises(ValueError, match="kind"):
            an.score_mixed(v, v, v, v, 0.3, "spinor")


class TestSolve:
    def offset_model(self):
        return make_vector_model(
            {
                "a": [1.0, 0.0],
                "b": [0.0, 1.0],
                "c": [1.0, 0.0],
                "d": [0.0, 1.0],
                "e": [0.6, 0.8],
            }
        )

    def test_vector_offset_answer(self):
        # b - a + c = [0, 1]; d matches it exactly and cues are excluded
        assert an.solve(self.offset_model(), "a", "b", "c") == ["d"]

    def test_matrix_offset_answer(self):
        model = make_matrix_model(
            {
                "a": [1.0, 0.0, 0.0],
                "b": [0.0, 0.0, 1.0],
                "c": [1.0, 0.0, 0.0],
                "d": [0.0, 0.0, 1.0],
                "e": [0.6, 0.0, 0.8],
            },
            dim=2,
        )
        assert an.solve(model, "a", "b", "c") == ["d"]

    def test_top_k_ordering(self):
        got = an.solve(self.offset_model(), "a", "b", "c", k=2)
        assert got == ["d", "e"]

    def test_k_exceeding_candidates_returns_fewer(self):
        got = an.solve(self.offset_model(), "a", "b", "c", k=10)
        assert got == ["d", "e"]  # a, b, c never padded in

    def test_oov_cue_raises(self):
        with pytest.raises(an.OutOfVocabularyError):
            an.solve(self.offset_model(), "a", "b", "zzz")

    def test_squared_vs_plain_cosine_divergence(self):
        # offset sims: d -> -1 (squared 1.0), e -> 0.8 (squared 0.64)
        model = make_vector_model(
            {
                "a": [1.0, 0.0],
                "b": [0.0, 1.0],
                "c": [1.0, 0.0],
                "d": [0.0, -1.0],
                "e": [0.6, 0.8],
            }
        )
        assert an.solve(model, "a", "b", "c", alpha=0.0) == ["d"]
        assert an.solve(
            model, "a", "b", "c", alpha=0.0, plain_cosine_at_zero=True
        ) == ["e"]

    def test_alpha_changes_the_winner(self):
        # base term ties d against e; the delta term separates them
        model = make_vector_model(
            {
                "a": [1.0, 0.0],
                "b": [0.0, 1.0],
                "c": [1.0, 0.0],
                "d": [0.0, 1.0],
                "e": [0.0, -1.0],
            }
        )
        base, delta, _ = an._Scorer(model).components(0, 1, 2)
        assert base[3] == pytest.approx(base[4])  # tie at alpha 0
        assert an.solve(model, "a", "b", "c", alpha=0.5) == ["d"]

    def test_zero_norm_candidate_never_wins(self):
        model = make_vector_model(
            {
                "a": [1.0, 0.0],
                "b": [0.0, 1.0],
                "c": [1.0, 0.0],
                "z": [0.0, 0.0],
                "e": [0.6, 0.8],
            }
        )
        assert an.solve(model, "a", "b", "c", k=5) == ["e"]


class TestScorerInternals:
    def test_sims_cached(self):
        model = make_vector_model({"a": [1.0, 0.0], "b": [0.0, 1.0]})
        scorer = an._Scorer(model)
        assert scorer._sims(0) is scorer._sims(0)

    def test_components_linearity(self):
        model = make_vector_model(
            {
                "a": [0.8, 0.6],
                "b": [0.0, 1.0],
                "c": [1.0, 0.0],
                "d": [0.6, 0.8],
            }
        )
        scorer = an._Scorer(model)
        base, delta, offset = scorer.components(0, 1, 2)
        table, _ = model.unit_table()
        sa, sb, sc = (table @ table[i] for i in (0, 1, 2))
        np.testing.assert_allclose(offset, sb - sa + sc, atol=1e-12)
        np.testing.assert_allclose(base, (sb - sa + sc) ** 2, atol=1e-12)
        np.testing.assert_allclose(delta, sb**2 - sa**2 + sc**2, atol=1e-12)


def eval_dataset():
    questions = [
        an.AnalogyQuestion("a", "b", "c", ("d",), "cat1"),
        an.AnalogyQuestion("a", "b", "c", ("e",), "cat1"),
        an.AnalogyQuestion("a", "b", "MISSING", ("d",), "cat2"),
        an.AnalogyQuestion("a", "b", "c", ("MISSING",), "cat2"),
    ]
    return an.AnalogyDataset(
        "toy", questions, {"cat1": "group-x", "cat2": "group-y"}
    )


class TestEvaluate:
    def model(self):
        return make_vector_model(
            {
                "a": [1.0, 0.0],
                "b": [0.0, 1.0],
                "c": [1.0, 0.0],
                "d": [0.0, 1.0],
                "e": [0.6, 0.8],
            }
        )

    def test_counts_and_skips(self):
        rep = an.evaluate(self.model(), eval_dataset(), alpha=0.0)
        assert rep.categories["cat1"].attempted == 2
        assert rep.categories["cat1"].correct == 1  # "d" wins, "e" loses
        assert rep.categories["cat1"].skipped == 0
        # cat2: one OOV cue, one all-answers-OOV
        assert rep.categories["cat2"].attempted == 0
        assert rep.categories["cat2"].skipped == 2
        assert rep.overall().attempted == 2
        assert rep.overall().skipped == 2

    def test_by_group(self):
        rep = an.evaluate(self.model(), eval_dataset(), alpha=0.0)
        groups = rep.by_group()
        assert groups["group-x"].attempted == 2
        assert groups["group-y"].skipped == 2

    def test_accuracy_property(self):
        t = an.Tally(attempted=8, skipped=1, correct=2)
        assert t.accuracy == 0.25
        assert an.Tally().accuracy == 0.0

    def test_sweep_matches_single_evaluations(self):
        model = self.model()
        ds = eval_dataset()
        sweep = an.alpha_sweep(model, ds, [0.0, 0.5, 1.0])
        for alpha, rep in zip([0.0, 0.5, 1.0], sweep):
            single = an.evaluate(model, ds, alpha)
            assert rep.alpha == alpha
            for cat in single.categories:
                assert (
                    rep.categories[cat].attempted,
                    rep.categories[cat].skipped,
                    rep.categories[cat].correct,
                ) == (
                    single.categories[cat].attempted,
                    single.categories[cat].skipped,
                    single.categories[cat].correct,
                )

    def test_to_text_mentions_counts(self):
        text = an.evaluate(self.model(), eval_dataset(), alpha=0.0).to_text()
        assert "cat1" in text and "group-x" in text
        assert "1/2" in text.splitlines()[0]

    def test_sweep_table_text_shape(self):
        reports = an.alpha_sweep(self.model(), eval_dataset(), [0.0, 0.5])
        table = an.sweep_table_text(reports)
        lines = table.splitlines()
        assert len(lines) == 3  # header + one row per alpha
        assert "overall" in lines[0]
        assert lines[1].startswith("+0.00")

    def test_report_tsv_round_trip(self, tmp_path):
        reports = an.alpha_sweep(self.model(), eval_dataset(), [0.0, 0.5])
        path = tmp_path / "report.tsv"
        an.write_report_tsv(reports, path)
        lines = path.read_text().splitlines()
        assert lines[0].split("\t") == [
            "category", "alpha", "attempted", "skipped", "correct", "accuracy",
        ]
        assert len(lines) == 1 + 2 * 2  # two alphas x two categories
        row = dict(zip(lines[0].split("\t"), lines[1].split("\t")))
        assert row["category"] == "cat1"
        assert float(row["accuracy"]) == pytest.approx(0.5)


class TestAlphaGrid:
    def test_default_grid(self):
        grid = an.DEFAULT_ALPHA_GRID
        assert len(grid) == 18
        assert grid[0] == -0.5 and grid[-1] == 1.2
        assert 0.0 in grid  # exact zero, not 1e-17 residue

    def test_parse_matches_default(self):
        assert an.parse_alpha_grid("-0.5:1.2:0.1") == an.DEFAULT_ALPHA_GRID

    def test_parse_inclusive_bounds(self):
        assert an.parse_alpha_grid("0:1:0.5") == [0.0, 0.5, 1.0]
        assert an.parse_alpha_grid("1:1:0.1") == [1.0]

    def test_parse_errors(self):
        for bad in ("0:1", "a:b:c", "0:1:0", "1:0:0.1"):
            with pytest.raises(ValueError):
                an.parse_alpha_grid(bad)
