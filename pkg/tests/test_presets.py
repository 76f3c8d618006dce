from veristack.lsa import grid_candidates
from veristack.presets import (
    LINEAR_PRESETS,
    LSA_PRESETS,
    MLP_BATCH_SIZES,
    MLP_DROPOUTS,
    MLP_EPOCHS,
    MLP_LEARNING_RATES,
    MLP_PRESETS,
    mlp_grid_candidates,
    mlp_preset,
)


class TestMlpPreset:
    def test_reference_configuration(self):
        cfg = mlp_preset("reference")
        assert cfg.layer_dims == (2576, 896, 640, 512, 216, 2)
        assert cfg.learning_rate == 0.001
        assert cfg.dropout_p == 0.7
        assert cfg.batch_size == 32
        assert cfg.epochs == 100

    def test_alias(self):
        assert MLP_PRESETS["paper"] == MLP_PRESETS["reference"]


class TestMlpGrid:
    def test_learning_rates_deduplicated(self):
        assert len(MLP_LEARNING_RATES) == len(set(MLP_LEARNING_RATES)) == 6

    def test_grid_size(self):
        grid = mlp_grid_candidates()
        assert len(grid) == 6 * 4 * 5 * 3 == 360

    def test_grid_contains_reference_point(self):
        assert {"learning_rate": 0.001, "dropout_p": 0.7,
                "batch_size": 32, "epochs": 100} in mlp_grid_candidates()

    def test_axis_values(self):
        assert MLP_DROPOUTS == (0.1, 0.3, 0.5, 0.7)
        assert MLP_BATCH_SIZES == (16, 32, 64, 128, 256)
        assert MLP_EPOCHS == (10, 100, 1000)


class TestLsaPresets:
    def test_best_and_stack(self):
        assert (LSA_PRESETS["best"].n, LSA_PRESETS["best"].d) == (2500, 512)
        assert (LSA_PRESETS["stack"].n, LSA_PRESETS["stack"].d) == (2500, 256)


class TestCatalogCoverage:
    def test_eight_linear_presets(self):
        # every SGD-expressible tuned row; the rbf-kernel row has no SGD form
        assert len(LINEAR_PRESETS) == 8

    def test_lsa_grid_times_two_models_is_70(self):
        assert len(grid_candidates()) * 2 == 70
