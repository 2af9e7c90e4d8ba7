"""Kernel ridge regression with the GS kernel.

Two predictors are produced from the same dual solution:

* unnormalized ``h(x) = sum_i alpha_i K(x_i, x)``
* normalized ``h*(x) = sum_i beta_i K(x_i, x) / sqrt(K(x, x))`` with
  ``beta_i = alpha_i / sqrt(K(x_i, x_i))``, which is the same as using the
  cosine-normalized kernel with ``alpha``.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .encoding import DescriptorTable, Sequence, decode, encode
from .kernel import GSParams, gram_matrix, gs, normalized_kernel

FORMAT_VERSION = 1


class NumericError(ArithmeticError):
    pass


class ModelFormatError(ValueError):
    pass


@dataclass
class TrainingSet:
    sequences: list
    activities: np.ndarray

    def __post_init__(self):
        self.sequences = [tuple(s) for s in self.sequences]
        self.activities = np.asarray(self.activities, dtype=np.float64)
        if len(self.sequences) != len(self.activities):
            raise ValueError("sequences and activities differ in length")
        if any(len(s) == 0 for s in self.sequences):
            raise ValueError("training sequences must be non-empty")

    def __len__(self):
        return len(self.sequences)

    def subset(self, idx) -> "TrainingSet":
        return TrainingSet([self.sequences[i] for i in idx], self.activities[idx])


@dataclass(eq=False)
class TrainedModel:
    sequences: list
    alpha: np.ndarray
    beta: np.ndarray
    params: GSParams
    lam: float
    normalized: bool
    table: DescriptorTable = field(repr=False)
    self_kernels: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.sequences = [tuple(s) for s in self.sequences]
        self.alpha = np.asarray(self.alpha, dtype=np.float64)
        self.beta = np.asarray(self.beta, dtype=np.float64)
        if not (len(self.sequences) == len(self.alpha) == len(self.beta)):
            raise ValueError("sequences, alpha and beta must have equal length")
        if self.self_kernels is None:
            self.self_kernels = np.array(
                [gs(s, s, self.params, self.table) for s in self.sequences]
            )

    @property
    def weights(self) -> np.ndarray:
        """Coefficients of the linear kernel expansion the predictor maximizes."""
        return self.beta if self.normalized else self.alpha

    def to_json(self) -> str:
        doc = {
            "format_version": FORMAT_VERSION,
            "sequences": [decode(s, self.table) for s in self.sequences],
            "alpha": [float(a) for a in self.alpha],
            "beta": [float(b) for b in self.beta],
            "params": self.params.to_dict(),
            "lambda": float(self.lam),
            "normalized": bool(self.normalized),
            "descriptor_digest": self.table.digest(),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str, table: DescriptorTable) -> "TrainedModel":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"model file is not valid JSON: {exc}") from None
        missing = {"format_version", "sequences", "alpha", "beta", "params", "lambda",
                   "normalized", "descriptor_digest"} - set(doc)
        if missing:
            raise ModelFormatError(f"model file lacks fields: {sorted(missing)}")
        if doc["format_version"] != FORMAT_VERSION:
            raise ModelFormatError(f"unsupported model format {doc['format_version']!r}")
        if doc["descriptor_digest"] != table.digest():
            raise ModelFormatError("model was trained with a different descriptor table")
        return cls(
            sequences=[encode(s, table, "model file") for s in doc["sequences"]],
            alpha=doc["alpha"],
            beta=doc["beta"],
            params=GSParams.from_dict(doc["params"]),
            lam=float(doc["lambda"]),
            normalized=bool(doc["normalized"]),
            table=table,
        )


def solve_dual(G: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    """Solve (G + lam I) alpha = y with a symmetric dense factorization."""
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    A = G + lam * np.eye(len(G))
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            return scipy.linalg.solve(A, y, assume_a="sym")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning):
            hint = " use lambda > 0" if lam == 0 else " increase lambda"
            raise NumericError("kernel system is singular or ill-conditioned;" + hint) from None


def fit(train: TrainingSet, params: GSParams, lam: float, normalized: bool,
        table: DescriptorTable) -> TrainedModel:
    G = gram_matrix(train.sequences, params, table, normalized=False)
    self_k = np.diag(G).copy()
    if normalized:
        G = gram_matrix(train.sequences, params, table, normalized=True)
    alpha = solve_dual(G, train.activities, lam)
    beta = alpha / np.sqrt(self_k)
    return TrainedModel(train.sequences, alpha, beta, params, lam, normalized, table, self_k)


def predict_h(model: TrainedModel, x: Sequence) -> float:
    if model.normalized:
        raise ValueError("predict_h needs an unnormalized model")
    return float(sum(a * gs(s, x, model.params, model.table)
                     for a, s in zip(model.alpha, model.sequences)))


def predict_h_star(model: TrainedModel, x: Sequence) -> float:
    if not model.normalized:
        raise ValueError("predict_h_star needs a normalized model")
    if len(x) == 0:
        raise ValueError("cannot score an empty sequence")
    kxx = gs(x, x, model.params, model.table)
    lin = sum(b * gs(s, x, model.params, model.table)
              for b, s in zip(model.beta, model.sequences))
    return float(lin / math.sqrt(kxx))


def predict_h_star_alpha(model: TrainedModel, x: Sequence) -> float:
    """The normalized predictor written with alpha and the normalized kernel."""
    return float(sum(a * normalized_kernel(s, x, model.params, model.table)
                     for a, s in zip(model.alpha, model.sequences)))


def predict(model: TrainedModel, x: Sequence) -> float:
    return predict_h_star(model, x) if model.normalized else predict_h(model, x)


def contiguous_folds(m: int, folds: int, seed: int | None = None) -> list[np.ndarray]:
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if folds > m:
        raise ValueError(f"{folds} folds requested for {m} examples")
    order = np.arange(m)
    if seed is not None:
        order = np.random.default_rng(seed).permutation(m)
    return np.array_split(order, folds)


def cross_validate(train: TrainingSet, param_grid, lambda_grid, folds: int,
                   table: DescriptorTable, normalized: bool = False,
                   seed: int | None = None):
    """Grid search by k-fold mean squared validation error.

    Returns ``(params, lambda, score)`` of the first grid point (params
    outer, lambda inner) reaching the smallest error.
    """
    param_grid, lambda_grid = list(param_grid), list(lambda_grid)
    if not param_grid or not lambda_grid:
        raise ValueError("empty hyperparameter grid")
    parts = contiguous_folds(len(train), folds, seed)
    y = train.activities

    best = None
    for params in param_grid:
        G = gram_matrix(train.sequences, params, table, normalized=normalized)
        for lam in lambda_grid:
            sq_err = 0.0
            for test_idx in parts:
                train_idx = np.setdiff1d(np.arange(len(train)), test_idx)
                alpha = solve_dual(G[np.ix_(train_idx, train_idx)], y[train_idx], lam)
                pred = G[np.ix_(test_idx, train_idx)] @ alpha
                sq_err += float(np.sum((pred - y[test_idx]) ** 2))
            score = sq_err / len(train)
            if best is None or score < best[2]:
                best = (params, float(lam), score)
    return best


def expand_grid(ks, sigma_ps, sigma_cs) -> list[GSParams]:
    return [GSParams(k, sp, sc) for k, sp, sc in itertools.product(ks, sigma_ps, sigma_cs)]
