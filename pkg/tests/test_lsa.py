import math

import numpy as np
import pytest
import scipy.sparse as sp

from veristack.errors import StateError
from veristack.lsa import (
    D_GRID,
    N_GRID,
    LsaConfig,
    char_ngrams,
    fit_lsa,
    fit_svd,
    fit_vocabulary,
    grid_candidates,
    load_lsa,
    project,
    save_lsa,
    smoothed_idf,
    tfidf_transform,
    transform_docs,
    word_ngrams,
)

WORD_ONLY = dict(word_ngram_range=(1, 1), char_ngram_range=None)


class TestNgrams:
    def test_word_unigrams_bigrams(self):
        assert word_ngrams("a b c", (1, 2)) == ["a", "b", "c", "a b", "b c"]

    def test_char_ngrams_include_spaces(self):
        assert char_ngrams("ab c", (1, 2)) == ["a", "b", " ", "c", "ab", "b ", " c"]

    def test_empty_doc(self):
        assert word_ngrams("", (1, 2)) == []
        assert char_ngrams("", (1, 3)) == []


class TestVocabulary:
    def test_idf_formula_hand_computed(self):
        # df(a)=2 of N=2 -> ln(3/3)+1 = 1.0 ; df(b)=1 -> ln(3/2)+1
        cfg = LsaConfig(n=4, d=1, **WORD_ONLY)
        with pytest.warns(UserWarning):
            model = fit_vocabulary(["a b", "a c"], cfg)
        idf = {gram: model.idf[model.column("word", gram)] for _, gram in model.vocabulary}
        assert idf["a"] == pytest.approx(1.0, abs=1e-12)
        assert idf["b"] == pytest.approx(math.log(3 / 2) + 1, abs=1e-12)
        assert idf["b"] == pytest.approx(1.405465, abs=1e-6)

    def test_smoothed_idf_positive(self):
        assert smoothed_idf(1000, 1000) > 0

    def test_ranking_by_tfidf_mass_then_lexicographic(self):
        cfg = LsaConfig(n=2, d=1, **WORD_ONLY)
        model = fit_vocabulary(["b b b", "a", "a b"], cfg)
        assert [g for _, g in model.vocabulary] == ["b", "a"]
        tie = fit_vocabulary(["x y", "x y"], LsaConfig(n=2, d=1, **WORD_ONLY))
        assert [g for _, g in tie.vocabulary] == ["x", "y"]

    def test_families_split_evenly(self):
        docs = ["the cat sat on the mat", "a dog ran over a log", "cats and dogs run far"]
        model = fit_vocabulary(docs, LsaConfig(n=20, d=2))
        families = [f for f, _ in model.vocabulary]
        assert families[:10] == ["word"] * 10
        assert families[10:] == ["char"] * 10

    def test_oversized_n_shrinks_with_warning(self):
        with pytest.warns(UserWarning, match="shrinking"):
            model = fit_vocabulary(["a b", "a c"], LsaConfig(n=100, d=1, **WORD_ONLY))
        assert model.n == 3  # a, b, c

    def test_determinism(self):
        docs = ["covid cases rise", "vaccine news today", "cases of covid rise again"]
        cfg = LsaConfig(n=12, d=2)
        v1 = fit_vocabulary(docs, cfg).vocabulary
        v2 = fit_vocabulary(docs, cfg).vocabulary
        assert v1 == v2

    def test_too_few_docs(self):
        with pytest.raises(StateError):
            fit_vocabulary(["only one"], LsaConfig(n=2, d=1))


class TestTfidfTransform:
    def test_hand_computed_normalized_row(self):
        cfg = LsaConfig(n=4, d=1, **WORD_ONLY)
        with pytest.warns(UserWarning):
            model = fit_vocabulary(["a b", "a c"], cfg)
        X = tfidf_transform(model, ["a b"]).toarray()[0]
        idf_b = math.log(3 / 2) + 1
        norm = math.sqrt(1.0 + idf_b**2)
        a_col = model.column("word", "a")
        b_col = model.column("word", "b")
        assert X[a_col] == pytest.approx(1.0 / norm, abs=1e-12)
        assert X[b_col] == pytest.approx(idf_b / norm, abs=1e-12)
        # the frozen reference values
        assert X[a_col] == pytest.approx(0.5797, abs=1e-4)
        assert X[b_col] == pytest.approx(0.8148, abs=1e-4)

    def test_out_of_vocabulary_doc_is_zero_row(self):
        cfg = LsaConfig(n=4, d=1, **WORD_ONLY)
        with pytest.warns(UserWarning):
            model = fit_vocabulary(["a b", "a c"], cfg)
        X = tfidf_transform(model, ["zz qq"])
        assert X.nnz == 0

    def test_rows_unit_norm_or_zero(self):
        docs = ["covid cases rise", "vaccine news today", "cases of covid rise again"]
        model = fit_vocabulary(docs, LsaConfig(n=30, d=2))
        X = tfidf_transform(model, docs + ["unseen tokens only zz"])
        norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
        for n in norms:
            assert n == pytest.approx(1.0, abs=1e-12) or n == 0.0


class TestFitSvd:
    def test_rank_one_matrix_exact_sigma(self):
        u = np.array([2.0, 2.0, 1.0])  # norm 3
        v = np.array([2.0, 0.0])  # norm 2
        X = np.outer(u, v)
        basis, s = fit_svd(X, d=1, seed=0)
        assert s.shape == (1,)
        assert s[0] == pytest.approx(6.0, abs=1e-8)
        assert basis.shape == (2, 1)

    def test_identity_all_ones(self):
        basis, s = fit_svd(np.eye(5), d=5, seed=1)
        assert np.allclose(s, 1.0, atol=1e-10)
        assert np.allclose(basis.T @ basis, np.eye(5), atol=1e-8)

    def test_matches_dense_oracle_50x30(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((50, 30))
        _, s = fit_svd(X, d=30, seed=3)
        expected = np.linalg.svd(X, compute_uv=False)
        np.testing.assert_allclose(s, expected[:30], atol=1e-6, rtol=0)

    def test_sparse_input_matches_dense(self):
        rng = np.random.default_rng(11)
        dense = rng.standard_normal((20, 15)) * (rng.random((20, 15)) < 0.3)
        _, s_sparse = fit_svd(sp.csr_matrix(dense), d=10, seed=5)
        _, s_dense = fit_svd(dense, d=10, seed=5)
        np.testing.assert_allclose(s_sparse, s_dense, atol=1e-10)

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((25, 12))
        b1, s1 = fit_svd(X, d=6, seed=42)
        b2, s2 = fit_svd(X, d=6, seed=42)
        assert np.array_equal(b1, b2) and np.array_equal(s1, s2)

    def test_singular_values_non_increasing(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((30, 18))
        _, s = fit_svd(X, d=10, seed=0)
        assert (np.diff(s) <= 1e-12).all()

    def test_d_too_large_rejected(self):
        with pytest.raises(StateError):
            fit_svd(np.eye(4), d=5, seed=0)


class TestProject:
    @pytest.fixture
    def fitted(self):
        docs = [
            "covid cases rise today",
            "vaccine cure found",
            "cases of covid rise again",
            "miracle cure video",
        ]
        return docs, fit_lsa(docs, LsaConfig(n=30, d=3, seed=0))

    def test_shapes(self, fitted):
        docs, model = fitted
        Z = transform_docs(model, docs)
        assert Z.shape == (4, 3)

    def test_zero_row_projects_to_zero(self, fitted):
        _, model = fitted
        # no letter of this token (nor the token itself) occurs in the corpus
        Z = transform_docs(model, ["zqxzqx"])
        assert np.allclose(Z, 0.0)

    def test_linearity(self, fitted):
        docs, model = fitted
        X = tfidf_transform(model, docs)
        assert np.allclose(project(model, X * 2.0), 2.0 * project(model, X), atol=1e-12)

    def test_shape_mismatch_rejected(self, fitted):
        _, model = fitted
        with pytest.raises(StateError):
            project(model, np.zeros((2, model.n + 1)))

    def test_basis_orthonormal(self, fitted):
        _, model = fitted
        G = model.basis.T @ model.basis
        assert np.allclose(G, np.eye(model.basis.shape[1]), atol=1e-8)


class TestGridCandidates:
    def test_35_pairs(self):
        pairs = grid_candidates()
        assert len(pairs) == 35
        assert len(N_GRID) * len(D_GRID) == 35

    def test_contains_named_points(self):
        pairs = grid_candidates()
        assert (2500, 512) in pairs
        assert (500, 64) in pairs and (20000, 768) in pairs


class TestPersistence:
    def test_round_trip(self, tmp_path):
        docs = [
            "covid cases rise today",
            "vaccine cure found",
            "cases of covid rise again",
            "miracle cure video",
        ]
        model = fit_lsa(docs, LsaConfig(n=20, d=3, seed=9))
        prefix = tmp_path / "lsa-model"
        save_lsa(model, prefix)
        again = load_lsa(prefix)
        assert again.vocabulary == model.vocabulary
        assert np.array_equal(again.idf, model.idf)
        assert np.array_equal(again.basis, model.basis)
        assert np.array_equal(again.singular_values, model.singular_values)
        assert again.config == model.config
        Z1 = transform_docs(model, docs)
        Z2 = transform_docs(again, docs)
        assert np.array_equal(Z1, Z2)
