import numpy as np
import pytest

from veristack.errors import StateError, ValidationError
from veristack.linear import predict as linear_predict
from veristack.metrics import f1_score
from veristack.mlp import MlpConfig
from veristack.stacking import (
    CANONICAL_STACK,
    Normalizer,
    StackInputSpec,
    assemble_stack_input,
    concat_blocks,
    labels_to_binary,
    load_mlp,
    mlp_forward,
    mlp_predict,
    one_hot,
    save_mlp,
    stack_base_outputs,
    train_linear_stack,
    train_mlp,
)


class TestStackInputSpec:
    def test_canonical_totals_2576(self):
        assert CANONICAL_STACK.total_dim == 2576
        assert [d for _, d in CANONICAL_STACK.blocks] == [256, 16, 768, 768, 768]

    def test_block_order(self):
        assert [n for n, _ in CANONICAL_STACK.blocks] == [
            "lsa", "handcrafted", "distilbert-emb", "roberta-emb", "xlm-emb",
        ]


class TestNormalizer:
    def test_training_columns_standardized(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((500, 8)) * rng.uniform(0.5, 5.0, 8) + rng.uniform(-3, 3, 8)
        norm = Normalizer.fit(X)
        Z = norm.transform(X)
        np.testing.assert_allclose(Z.mean(axis=0), 0.0, atol=1e-9)
        np.testing.assert_allclose(Z.std(axis=0), 1.0, atol=1e-9)

    def test_constant_column_clamped_to_zero(self):
        X = np.column_stack([np.full(10, 7.0), np.arange(10.0)])
        norm = Normalizer.fit(X)
        Z = norm.transform(X)
        assert np.allclose(Z[:, 0], 0.0)
        assert norm.std[0] == 1.0

    def test_l2_mode_unit_rows(self):
        X = np.array([[3.0, 4.0], [0.0, 0.0]])
        norm = Normalizer.fit(X, kind="l2")
        Z = norm.transform(X)
        assert np.allclose(Z[0], [0.6, 0.8])
        assert np.allclose(Z[1], 0.0)


class TestAssemble:
    def test_canonical_dims_enforced(self):
        n = 4
        blocks = [(name, np.zeros((n, dim))) for name, dim in CANONICAL_STACK.blocks]
        X, norm = assemble_stack_input(blocks, spec=CANONICAL_STACK)
        assert X.shape == (n, 2576)

    def test_wrong_dim_names_block(self):
        n = 4
        blocks = [(name, np.zeros((n, dim))) for name, dim in CANONICAL_STACK.blocks]
        blocks[2] = ("distilbert-emb", np.zeros((n, 767)))
        with pytest.raises(ValidationError, match="distilbert-emb"):
            assemble_stack_input(blocks, spec=CANONICAL_STACK)

    def test_row_mismatch_names_block(self):
        blocks = [("a", np.zeros((3, 2))), ("b", np.zeros((4, 2)))]
        with pytest.raises(ValidationError, match="'b'"):
            concat_blocks(blocks)

    def test_normalizer_fit_on_train_rows_only(self):
        X_block = np.array([[0.0], [1.0], [100.0], [101.0]])
        _, norm = assemble_stack_input([("x", X_block)], train_rows=[0, 1])
        assert norm.mean[0] == pytest.approx(0.5)

    def test_concatenation_order(self):
        a = np.ones((2, 1))
        b = 2 * np.ones((2, 2))
        X = concat_blocks([("a", a), ("b", b)])
        assert X.tolist() == [[1.0, 2.0, 2.0], [1.0, 2.0, 2.0]]


def stacked_blobs(n=200, seed=0, separation=4.0):
    """Class-separated Gaussians shaped like the canonical 2576-dim input."""
    rng = np.random.default_rng(seed)
    labels = ["real" if i < n // 2 else "fake" for i in range(n)]
    signs = np.array([1.0 if lab == "real" else -1.0 for lab in labels])
    X = rng.standard_normal((n, 2576))
    X += signs[:, None] * (separation / np.sqrt(2576))
    return X, labels


class TestMlpModel:
    def test_blob_training_f1(self):
        X, labels = stacked_blobs()
        cfg = MlpConfig(dropout_p=0.7, learning_rate=0.001, batch_size=32,
                        epochs=30, seed=0)
        model = train_mlp(X, labels, cfg)
        predictions = mlp_predict(model, X)
        assert f1_score(labels, predictions) >= 0.99

    def test_epochs_zero_returns_initialized_model(self):
        X, labels = stacked_blobs(n=40)
        cfg = MlpConfig(epochs=0, seed=3)
        model = train_mlp(X, labels, cfg)
        assert model.loss_history == []
        out = mlp_forward(model, X)
        assert out.shape == (40, 2)

    def test_tie_resolves_to_fake(self):
        X, labels = stacked_blobs(n=20)
        model = train_mlp(X, labels, MlpConfig(epochs=0, seed=0))
        for l in range(model.network.n_layers):
            model.network.weights[l][:] = 0.0
            model.network.biases[l][:] = 0.0
        assert mlp_predict(model, X[:3]) == ["fake", "fake", "fake"]

    def test_single_class_rejected(self):
        X = np.zeros((4, 2576))
        with pytest.raises(StateError):
            train_mlp(X, ["real"] * 4, MlpConfig(epochs=0))

    def test_one_hot_slots(self):
        T = one_hot(["fake", "real"])
        assert T.tolist() == [[1.0, 0.0], [0.0, 1.0]]

    def test_persistence_round_trip(self, tmp_path):
        X, labels = stacked_blobs(n=64)
        cfg = MlpConfig(dropout_p=0.5, learning_rate=0.01, batch_size=16,
                        epochs=2, seed=5)
        model = train_mlp(X, labels, cfg)
        prefix = str(tmp_path / "mlp")
        save_mlp(model, prefix)
        again = load_mlp(prefix)
        assert again.config == model.config
        assert np.array_equal(again.normalizer.mean, model.normalizer.mean)
        for a, b in zip(again.network.weights, model.network.weights):
            assert np.array_equal(a, b)
        assert np.array_equal(mlp_forward(again, X), mlp_forward(model, X))


class TestStackBaseOutputs:
    def test_six_columns(self):
        cols = [(f"m{i}", np.zeros(5)) for i in range(6)]
        assert stack_base_outputs(cols, "labels").shape == (5, 6)

    def test_all_real_row_of_ones(self):
        cols = [("a", np.ones(3)), ("b", np.ones(3))]
        meta = stack_base_outputs(cols, "labels")
        assert np.array_equal(meta, np.ones((3, 2)))

    def test_labels_mode_rejects_non_binary(self):
        cols = [("a", np.array([0.0, 0.5])), ("b", np.zeros(2))]
        with pytest.raises(ValidationError, match="'a'"):
            stack_base_outputs(cols, "labels")

    def test_decision_mode_keeps_raw_values(self):
        cols = [("a", np.array([-1.3, 2.4])), ("b", np.array([0.5, 0.7]))]
        meta = stack_base_outputs(cols, "decision")
        assert meta[:, 0].tolist() == [-1.3, 2.4]

    def test_needs_two_models(self):
        with pytest.raises(ValidationError):
            stack_base_outputs([("only", np.zeros(3))], "labels")

    def test_length_mismatch_named(self):
        cols = [("a", np.zeros(3)), ("bad", np.zeros(4))]
        with pytest.raises(ValidationError, match="bad"):
            stack_base_outputs(cols, "labels")

    def test_dim1_external_column_shape(self):
        # an ingested dim-1 prediction file arrives as one flat column
        col = np.array([[0.0], [1.0], [1.0]]).reshape(-1)
        meta = stack_base_outputs([("ext", col), ("other", np.zeros(3))], "labels")
        assert meta.shape == (3, 2)


class TestTrainLinearStack:
    def test_perfect_base_column_gives_f1_one(self):
        labels = ["real", "fake"] * 20
        oracle = labels_to_binary(labels)
        noise = np.array([0.0, 1.0] * 20)[::-1]
        meta = stack_base_outputs([("oracle", oracle), ("noise", noise)], "labels")
        model = train_linear_stack(meta, labels)
        assert f1_score(labels, linear_predict(model, meta)) == 1.0

    def test_mode_presets(self):
        from veristack.stacking import STACKER_PRESETS

        assert STACKER_PRESETS["labels"].l1_ratio == 0.3
        assert STACKER_PRESETS["decision"].l1_ratio == 0.8
        for preset in STACKER_PRESETS.values():
            assert preset.loss == "hinge" and preset.penalty == "elasticnet"
