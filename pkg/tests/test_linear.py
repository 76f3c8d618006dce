import math

import numpy as np
import pytest

from veristack.errors import DataError, StateError
from veristack.linear import (
    LinearModel,
    SgdConfig,
    decision_function,
    load_linear,
    objective,
    predict,
    predict_proba,
    save_linear,
    train_sgd,
)
from veristack.presets import LINEAR_PRESETS

# Four points separable by x0 - x1 = 0: reals sit above the diagonal.
SEP_X = np.array([[2.0, 0.0], [1.5, -0.5], [-2.0, 0.0], [-1.0, 1.5]])
SEP_Y = ["real", "real", "fake", "fake"]


def brute_force_separable(X, y):
    """Confirm a separating line exists by scanning directions."""
    signs = np.array([1.0 if lab == "real" else -1.0 for lab in y])
    for theta in np.linspace(0, 2 * math.pi, 720, endpoint=False):
        w = np.array([math.cos(theta), math.sin(theta)])
        margins = signs * (X @ w)
        lo, hi = margins.min(), (X @ w * signs).max()
        for b in np.linspace(-3, 3, 121):
            if (signs * (X @ w + b) > 0).all():
                return True
    return False


class TestTrainSgd:
    def test_toy_set_is_separable_by_construction(self):
        assert brute_force_separable(SEP_X, SEP_Y)

    @pytest.mark.parametrize("loss", ["log", "hinge"])
    def test_perfect_training_f1_on_separable_set(self, loss):
        cfg = SgdConfig(loss=loss, alpha=1e-4, epochs=200, tol=1e-9, seed=1)
        model = train_sgd(SEP_X, SEP_Y, cfg)
        assert predict(model, SEP_X) == SEP_Y

    def test_huge_alpha_shrinks_weights(self):
        small = train_sgd(SEP_X, SEP_Y, SgdConfig(alpha=1e-4, epochs=50, seed=0))
        big = train_sgd(SEP_X, SEP_Y, SgdConfig(alpha=1e6, epochs=50, seed=0))
        assert np.linalg.norm(big.weights) < 1e-3
        assert np.linalg.norm(big.weights) < np.linalg.norm(small.weights)

    def test_determinism(self):
        cfg = SgdConfig(loss="hinge", epochs=37, seed=123, tol=0.0)
        m1 = train_sgd(SEP_X, SEP_Y, cfg)
        m2 = train_sgd(SEP_X, SEP_Y, cfg)
        assert np.array_equal(m1.weights, m2.weights) and m1.bias == m2.bias

    def test_objective_decreases_without_regularization(self):
        # alpha of 0 is rejected by config; use an epsilon instead
        cfg = SgdConfig(loss="log", alpha=1e-12, epochs=100, tol=1e-12, seed=5)
        model = train_sgd(SEP_X, SEP_Y, cfg)
        y = np.array([1.0 if lab == "real" else -1.0 for lab in SEP_Y])
        initial = objective(SEP_X, y, np.zeros(2), 0.0, "log", 1e-12, 0.0)
        final = objective(SEP_X, y, model.weights, model.bias, "log", 1e-12, 0.0)
        assert final < initial

    def test_single_class_rejected(self):
        with pytest.raises(StateError):
            train_sgd(SEP_X[:2], ["real", "real"], SgdConfig())

    def test_nan_rejected(self):
        X = SEP_X.copy()
        X[0, 0] = np.nan
        with pytest.raises(DataError):
            train_sgd(X, SEP_Y, SgdConfig())

    def test_c_shorthand_maps_to_alpha(self):
        cfg = SgdConfig(C=0.1)
        assert cfg.effective_alpha(100) == pytest.approx(1.0 / (0.1 * 100))

    def test_elasticnet_produces_sparser_weights_than_l2(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((60, 20))
        y = ["real" if v > 0 else "fake" for v in X[:, 0] - X[:, 1]]
        en = train_sgd(X, y, SgdConfig(loss="hinge", penalty="elasticnet",
                                       alpha=0.01, l1_ratio=0.9, epochs=30, seed=2))
        l2 = train_sgd(X, y, SgdConfig(loss="hinge", penalty="l2",
                                       alpha=0.01, epochs=30, seed=2))
        assert np.sum(np.abs(en.weights) < 1e-12) > np.sum(np.abs(l2.weights) < 1e-12)


class TestDecisionFunction:
    def test_zero_model_all_zero(self):
        m = LinearModel(np.zeros(3), 0.0, "log")
        assert np.array_equal(decision_function(m, np.ones((4, 3))), np.zeros(4))

    def test_hand_dot_product(self):
        m = LinearModel(np.array([1.0, -1.0]), 0.5, "log")
        assert decision_function(m, np.array([[2.0, 1.0]]))[0] == pytest.approx(1.5)

    def test_linearity_around_bias(self):
        m = LinearModel(np.array([0.3, -0.7]), 0.2, "hinge")
        x = np.array([[1.0, 2.0]])
        s1 = decision_function(m, x)[0] - m.bias
        s2 = decision_function(m, 2 * x)[0] - m.bias
        assert s2 == pytest.approx(2 * s1)

    def test_shape_mismatch(self):
        m = LinearModel(np.zeros(3), 0.0, "log")
        with pytest.raises(StateError):
            decision_function(m, np.ones((2, 4)))


class TestPredict:
    @pytest.mark.parametrize(
        "bias,expected", [(1.5, "real"), (-0.1, "fake"), (0.0, "fake")]
    )
    def test_threshold_and_tie_rule(self, bias, expected):
        m = LinearModel(np.zeros(1), bias, "log")
        assert predict(m, np.zeros((1, 1))) == [expected]

    def test_matches_decision_sign(self):
        rng = np.random.default_rng(4)
        m = LinearModel(rng.standard_normal(5), 0.1, "hinge")
        X = rng.standard_normal((50, 5))
        scores = decision_function(m, X)
        labels = predict(m, X)
        assert labels == ["real" if s > 0 else "fake" for s in scores]


class TestPredictProba:
    def test_score_zero_is_half(self):
        m = LinearModel(np.zeros(2), 0.0, "log")
        assert predict_proba(m, np.zeros((1, 2)))[0] == pytest.approx(0.5)

    def test_closed_form_ln3(self):
        m = LinearModel(np.zeros(1), math.log(3.0), "log")
        assert predict_proba(m, np.zeros((1, 1)))[0] == pytest.approx(0.75, abs=1e-12)

    def test_saturates_to_one(self):
        m = LinearModel(np.array([1000.0]), 0.0, "log")
        assert predict_proba(m, np.array([[10.0]]))[0] == pytest.approx(1.0)

    def test_hinge_model_rejected(self):
        m = LinearModel(np.zeros(1), 0.0, "hinge")
        with pytest.raises(StateError):
            predict_proba(m, np.zeros((1, 1)))

    def test_proba_in_open_interval_and_consistent_with_predict(self):
        rng = np.random.default_rng(9)
        m = LinearModel(rng.standard_normal(3), -0.2, "log")
        X = rng.standard_normal((40, 3))
        p = predict_proba(m, X)
        assert ((p > 0) & (p < 1)).all()
        assert predict(m, X) == ["real" if v > 0.5 else "fake" for v in p]


class TestPresets:
    def test_table_rows(self):
        lsa_lr = LINEAR_PRESETS["lsa-lr"]
        assert (lsa_lr.loss, lsa_lr.penalty, lsa_lr.l1_ratio, lsa_lr.power_t) == (
            "log", "elasticnet", 0.05, 0.5,
        )
        hand = LINEAR_PRESETS["handcrafted-svm"]
        assert (hand.loss, hand.l1_ratio, hand.power_t) == ("hinge", 0.95, 0.1)
        assert LINEAR_PRESETS["distilbert-emb-lr"].C == 0.1
        assert LINEAR_PRESETS["roberta-emb-lr"].C == 0.01
        assert LINEAR_PRESETS["xlm-emb-svm"].loss == "hinge"
        stack = LINEAR_PRESETS["linear-stacking"]
        assert (stack.loss, stack.penalty, stack.l1_ratio) == ("hinge", "elasticnet", 0.3)
        probs = LINEAR_PRESETS["linear-stacking-probs"]
        assert (probs.loss, probs.penalty, probs.l1_ratio) == ("hinge", "elasticnet", 0.8)
        t2v = LINEAR_PRESETS["tax2vec-tfidf-sgd"]
        assert (t2v.alpha, t2v.l1_ratio, t2v.loss, t2v.power_t) == (1e-4, 0.15, "hinge", 0.5)


class TestPersistence:
    def test_round_trip(self, tmp_path):
        model = train_sgd(SEP_X, SEP_Y, SgdConfig(loss="hinge", epochs=20, seed=3))
        prefix = str(tmp_path / "lin")
        save_linear(model, prefix)
        again = load_linear(prefix)
        assert np.array_equal(again.weights, model.weights)
        assert again.bias == model.bias
        assert again.loss == model.loss
        assert predict(again, SEP_X) == predict(model, SEP_X)
