"""Linear max-margin classifier trained by projected stochastic subgradient steps.

Pegasos-style updates on the regularized hinge loss, with the bias handled
as the weight of a constant feature. The returned model is the average of
the iterates from the second half of training.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np

from utils.exceptions import DegenerateLabelsError, DimensionError, LabelError
from utils.logger import Logger
from utils.utils import STREAM_SVM, derive_rng

logger = Logger.get_logger(__name__)

DEFAULT_LAMBDA = 1e-3
DEFAULT_EPOCHS = 200


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    bias: float
    lam: float = DEFAULT_LAMBDA
    epochs: int = DEFAULT_EPOCHS
    seed: int = 0
    objective_history: List[float] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.weights)


def _check_training_data(x: np.ndarray, y: np.ndarray):
    if x.ndim != 2:
        raise DimensionError(f"Features must be a d x p matrix, got shape {x.shape}")
    if y.shape != (x.shape[1],):
        raise DimensionError(f"Expected {x.shape[1]} labels, got shape {y.shape}")
    if not np.all((y == 1) | (y == -1)):
        raise LabelError("Binary labels must be -1 or +1")
    if x.shape[1] < 2 or len(np.unique(y)) < 2:
        raise DegenerateLabelsError("Training needs at least two points covering both labels")


def hinge_objective(weights: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray, lam: float) -> float:
    """lam/2 * ||(w, b)||^2 + mean hinge loss"""
    margins = y * (weights @ x + bias)
    return 0.5 * lam * (weights @ weights + bias * bias) + float(np.mean(np.maximum(0.0, 1.0 - margins)))


def train_linear(x: np.ndarray, y: np.ndarray, lam: float = DEFAULT_LAMBDA,
                 epochs: int = DEFAULT_EPOCHS, seed: int = 0) -> LinearModel:
    """Fit w, b minimizing the regularized hinge loss on columns of x (d x p) with labels in {-1, +1}"""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    _check_training_data(x, y)
    if lam <= 0 or epochs < 1:
        raise ValueError(f"Need lam > 0 and epochs >= 1, got lam={lam}, epochs={epochs}")

    d, p = x.shape
    augmented = np.vstack([x, np.ones(p)])
    w = np.zeros(d + 1)
    average = np.zeros(d + 1)
    averaged = 0
    radius = 1.0 / np.sqrt(lam)
    rng = derive_rng(seed, STREAM_SVM)
    history = []
    step = 0

    for epoch in range(epochs):
        for i in rng.permutation(p):
            step += 1
            eta = 1.0 / (lam * step)
            column = augmented[:, i]
            violated = y[i] * (w @ column) < 1.0
            w *= (1.0 - eta * lam)
            if violated:
                w += eta * y[i] * column
            norm = np.linalg.norm(w)
            if norm > radius:
                w *= radius / norm
            if epoch >= epochs // 2:
                averaged += 1
                average += (w - average) / averaged

        current = average if averaged else w
        history.append(hinge_objective(current[:d], current[d], x, y, lam))

    logger.debug(f"Linear model trained: {epochs} epochs, final objective {history[-1]:.6f}")
    return LinearModel(average[:d].copy(), float(average[d]), lam, epochs, seed, history)


def decision_function(model: LinearModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != model.dimension:
        raise DimensionError(f"Model expects {model.dimension} features, got {x.shape[0]}")
    return model.weights @ x + model.bias


def predict(model: LinearModel, x_col: np.ndarray) -> int:
    """sign(<w, x> + b) with sign(0) = +1"""
    return 1 if decision_function(model, np.ravel(x_col)) >= 0 else -1


def predict_batch(model: LinearModel, x: np.ndarray) -> np.ndarray:
    return np.where(decision_function(model, x) >= 0, 1, -1)
