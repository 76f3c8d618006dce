"""Dataset-level estimators tying representations to classifiers.

Every pipeline exposes fit(Dataset) and predict(Dataset) -> labels, which
is the contract the evaluation harness and CLI drive. Base pipelines also
expose output_column(ds, mode) so the linear stacker can consume their
predictions or decision values.
"""

import warnings
from typing import Callable, Sequence

import numpy as np

from . import linear
from .corpus import Dataset
from .embeddings_io import EmbeddingSet, align
from .errors import StateError, ValidationError
from .evaluate import kfold
from .handcrafted import handcrafted_matrix
from .linear import LinearModel, SgdConfig
from .lsa import LsaConfig, LsaModel, fit_lsa, transform_docs
from .mlp import MlpConfig
from .preprocess import DEFAULT_CLEAN, CleanConfig, clean_text
from .stacking import (
    MlpModel,
    concat_blocks,
    labels_to_binary,
    mlp_predict,
    stack_base_outputs,
    train_linear_stack,
    train_mlp,
)


class _SgdPipeline:
    """Shared train/predict plumbing for a representation + SGD classifier."""

    def __init__(self, sgd_cfg: SgdConfig):
        self.sgd_cfg = sgd_cfg
        self.model: LinearModel | None = None

    def _fit_features(self, ds: Dataset) -> np.ndarray:
        return self._features(ds)

    def _features(self, ds: Dataset) -> np.ndarray:
        raise NotImplementedError

    def fit(self, ds: Dataset) -> "_SgdPipeline":
        X = self._fit_features(ds)
        self.model = linear.train_sgd(X, ds.labels(), self.sgd_cfg)
        return self

    def _require_model(self) -> LinearModel:
        if self.model is None:
            raise StateError("pipeline is not fitted")
        return self.model

    def predict(self, ds: Dataset) -> list[str]:
        return linear.predict(self._require_model(), self._features(ds))

    def decision(self, ds: Dataset) -> np.ndarray:
        return linear.decision_function(self._require_model(), self._features(ds))

    def output_column(self, ds: Dataset, mode: str) -> np.ndarray:
        """labels mode: 0/1 predictions; decision mode: raw scores for
        hinge models, sigmoid probabilities for logistic ones."""
        model = self._require_model()
        if mode == "labels":
            return labels_to_binary(self.predict(ds))
        if mode == "decision":
            if model.loss == "log":
                return linear.predict_proba(model, self._features(ds))
            return self.decision(ds)
        raise StateError(f"unknown stacking mode {mode!r}")


class LsaSgdPipeline(_SgdPipeline):
    def __init__(self, lsa_cfg: LsaConfig, sgd_cfg: SgdConfig,
                 clean_cfg: CleanConfig = DEFAULT_CLEAN):
        super().__init__(sgd_cfg)
        self.lsa_cfg = lsa_cfg
        self.clean_cfg = clean_cfg
        self.lsa_model: LsaModel | None = None

    def _clean(self, ds: Dataset) -> list[str]:
        return [clean_text(t, self.clean_cfg) for t in ds.texts()]

    def _fit_features(self, ds: Dataset) -> np.ndarray:
        self.lsa_model = fit_lsa(self._clean(ds), self.lsa_cfg)
        return transform_docs(self.lsa_model, self._clean(ds))

    def _features(self, ds: Dataset) -> np.ndarray:
        if self.lsa_model is None:
            raise StateError("LSA model is not fitted")
        return transform_docs(self.lsa_model, self._clean(ds))


class HandcraftedSgdPipeline(_SgdPipeline):
    def _features(self, ds: Dataset) -> np.ndarray:
        return handcrafted_matrix(ds.texts())


class EmbeddingSgdPipeline(_SgdPipeline):
    """Classifies pre-computed vectors, aligned to each dataset by id."""

    def __init__(self, embeddings: EmbeddingSet, sgd_cfg: SgdConfig):
        super().__init__(sgd_cfg)
        self.embeddings = embeddings

    def _features(self, ds: Dataset) -> np.ndarray:
        return align(self.embeddings, ds)


class ExternalColumnSource:
    """Static per-record outputs of an out-of-toolkit model, read from an
    embedding-format file with dim 1 (decision value / 0-1 prediction) or
    dim 2 (per-class scores; the real-class column is used)."""

    def __init__(self, name: str, predictions: EmbeddingSet):
        if predictions.manifest.dim not in (1, 2):
            raise ValidationError(
                f"external column {name!r} must have dim 1 or 2, "
                f"got {predictions.manifest.dim}"
            )
        self.name = name
        self.predictions = predictions

    def output_column(self, ds: Dataset, mode: str) -> np.ndarray:
        values = align(self.predictions, ds)
        col = values[:, -1]  # dim 1 -> the value; dim 2 -> real-class score
        if mode == "labels":
            uniq = np.unique(col)
            if not np.isin(uniq, (0.0, 1.0)).all():
                col = (col > 0.5).astype(np.float64)
        return col.astype(np.float64)


class NeuralStackPipeline:
    """The five-block stacked representation fed to the deep network.

    The LSA block is refitted on each training set; handcrafted features
    come from raw text; the three embedding blocks are ingested sets keyed
    by block name. The input normalizer is fitted on training rows only.
    """

    def __init__(
        self,
        mlp_cfg: MlpConfig,
        lsa_cfg: LsaConfig,
        embeddings: dict[str, EmbeddingSet],
        clean_cfg: CleanConfig = DEFAULT_CLEAN,
    ):
        self.mlp_cfg = mlp_cfg
        self.lsa_cfg = lsa_cfg
        self.embeddings = dict(embeddings)
        self.clean_cfg = clean_cfg
        self.lsa_model: LsaModel | None = None
        self.model: MlpModel | None = None

    def _blocks(self, ds: Dataset) -> list[tuple[str, np.ndarray]]:
        if self.lsa_model is None:
            raise StateError("LSA block is not fitted")
        cleaned = [clean_text(t, self.clean_cfg) for t in ds.texts()]
        blocks: list[tuple[str, np.ndarray]] = [
            ("lsa", transform_docs(self.lsa_model, cleaned)),
            ("handcrafted", handcrafted_matrix(ds.texts())),
        ]
        for name, es in self.embeddings.items():
            blocks.append((name, align(es, ds)))
        return blocks

    def fit(self, ds: Dataset) -> "NeuralStackPipeline":
        cleaned = [clean_text(t, self.clean_cfg) for t in ds.texts()]
        self.lsa_model = fit_lsa(cleaned, self.lsa_cfg)
        X = concat_blocks(self._blocks(ds))
        self.model = train_mlp(X, ds.labels(), self.mlp_cfg)
        return self

    def predict(self, ds: Dataset) -> list[str]:
        if self.model is None:
            raise StateError("pipeline is not fitted")
        return mlp_predict(self.model, concat_blocks(self._blocks(ds)))


class LinearStackPipeline:
    """Linear stacking over base-model output columns.

    Base models are given as (name, factory) pairs; the factory builds a
    fresh unfitted pipeline, which lets stacker training use out-of-fold
    base predictions (the default). External prediction files join as
    static columns. After the stacker is trained, bases are refitted on
    the full training set for inference.
    """

    def __init__(
        self,
        bases: Sequence[tuple[str, Callable[[], object]]],
        mode: str = "labels",
        cfg: SgdConfig | None = None,
        externals: Sequence[ExternalColumnSource] = (),
        out_of_fold: bool = True,
        k: int = 10,
        seed: int = 0,
    ):
        self.bases = list(bases)
        self.mode = mode
        self.cfg = cfg
        self.externals = list(externals)
        self.out_of_fold = out_of_fold
        self.k = k
        self.seed = seed
        self.stacker: LinearModel | None = None
        self.fitted_bases: list[tuple[str, object]] = []

    def _training_columns(self, ds: Dataset) -> list[tuple[str, np.ndarray]]:
        columns: list[tuple[str, np.ndarray]] = []
        if self.out_of_fold:
            plan = kfold(ds, k=min(self.k, len(ds)), seed=self.seed)
            for name, factory in self.bases:
                col = np.empty(len(ds))
                for train_idx, eval_idx in plan.splits():
                    base = factory()
                    base.fit(ds.subset(train_idx))
                    col[eval_idx] = base.output_column(ds.subset(eval_idx), self.mode)
                columns.append((name, col))
        else:
            for name, factory in self.bases:
                base = factory()
                base.fit(ds)
                columns.append((name, base.output_column(ds, self.mode)))
        for ext in self.externals:
            columns.append((ext.name, ext.output_column(ds, self.mode)))
        return columns

    def fit(self, ds: Dataset) -> "LinearStackPipeline":
        if not self.externals:
            warnings.warn(
                "no external prediction columns supplied; stacking over "
                "internal base models only",
                stacklevel=2,
            )
        columns = self._training_columns(ds)
        meta = stack_base_outputs(columns, self.mode)
        self.stacker = train_linear_stack(meta, ds.labels(), self.cfg, self.mode)
        self.fitted_bases = [(name, factory().fit(ds)) for name, factory in self.bases]
        return self

    def _inference_columns(self, ds: Dataset) -> list[tuple[str, np.ndarray]]:
        columns = [
            (name, base.output_column(ds, self.mode)) for name, base in self.fitted_bases
        ]
        columns.extend((ext.name, ext.output_column(ds, self.mode)) for ext in self.externals)
        return columns

    def predict(self, ds: Dataset) -> list[str]:
        if self.stacker is None:
            raise StateError("pipeline is not fitted")
        meta = stack_base_outputs(self._inference_columns(ds), self.mode)
        return linear.predict(self.stacker, meta)
