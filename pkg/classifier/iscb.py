"""Iterative application of the sign-pattern classifier.

Each application's normalized score vectors become the data of the next
one: they are re-measured by a fresh mixed-sign hyperplane arrangement and
the resulting codes train the next membership table. Scores are never
recentered between applications.

The "rhat" variant feeds forward the per-level scores (an L*G vector,
level-major) instead of their sum over levels.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from utils.exceptions import ConfigError, DimensionError, IterationError
from utils.logger import Logger
from utils.utils import accuracy
from . import scb
from .quantize import MeasurementMatrix, binarize, check_sign_matrix, mixed_sign_matrix

logger = Logger.get_logger(__name__)

RTILDE = "rtilde"
RHAT = "rhat"
VARIANTS = (RTILDE, RHAT)


@dataclass(frozen=True)
class IscbLayer:
    """One application; next_measurement re-measures its scores for the following layer"""
    scb: scb.ScbModel
    next_measurement: Optional[MeasurementMatrix] = None


@dataclass(frozen=True)
class RHatVector:
    """Per-level scores of one point, level-major: values[(l-1)*G + (g-1)]"""
    values: np.ndarray
    L: int
    G: int

    def as_matrix(self) -> np.ndarray:
        return self.values.reshape(self.L, self.G)

    def marginal(self) -> np.ndarray:
        return self.as_matrix().sum(axis=0)


@dataclass(frozen=True)
class IscbModel:
    layers: Tuple[IscbLayer, ...]
    variant: str
    G: int

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"Unknown variant {self.variant!r}, expected one of {VARIANTS}")
        if not self.layers:
            raise IterationError("A model needs at least one layer")
        for k, layer in enumerate(self.layers[:-1]):
            nxt = layer.next_measurement
            width = feature_width(layer.scb, self.variant)
            if nxt is None or nxt.cols != width or nxt.rows != self.layers[k + 1].scb.m:
                raise DimensionError(f"Layer {k + 1} output width {width} does not feed layer {k + 2}")

    @property
    def K(self) -> int:
        return len(self.layers)

    @property
    def m(self) -> int:
        return self.layers[0].scb.m

    @property
    def widths(self) -> List[int]:
        """Input dimension of every layer's hyperplanes (first entry: code length m)"""
        return [self.m] + [layer.next_measurement.cols for layer in self.layers[:-1]]


def feature_width(model: scb.ScbModel, variant: str) -> int:
    return model.G if variant == RTILDE else model.L * model.G


def layer_features(batch: scb.ScoreBatch, variant: str) -> np.ndarray:
    """Data matrix handed to the next application, one column per point"""
    if variant == RTILDE:
        return batch.values
    L, G, p = batch.level_values.shape
    return batch.level_values.reshape(L * G, p)


def _per_layer(values: Optional[Sequence[int]], default: int, K: int, name: str) -> List[int]:
    if values is None:
        return [default] * K
    if len(values) != K:
        raise ConfigError(f"Expected {K} per-layer values for {name}, got {len(values)}")
    return [int(v) for v in values]


def train_iterative(q: np.ndarray, labels, G: int, L: int, K: int, m: Optional[int] = None,
                    seed: int = 0, variant: str = RTILDE,
                    layer_levels: Optional[Sequence[int]] = None,
                    layer_measurements: Optional[Sequence[int]] = None,
                    reuse_measurement: bool = False,
                    measurement: Optional[MeasurementMatrix] = None) -> IscbModel:
    """Train K stacked applications on training codes q (m x p).

    `measurement`, when given, is the matrix that produced q; it is kept on
    the first layer so the model can also be applied to raw data.

    Layer k uses tuple stream k and mixed-sign stream k+1 of `seed`, so a
    K-layer model's first k layers equal the k-layer model with the same
    seed.
    """
    if K < 1:
        raise IterationError(f"K must be at least 1, got {K}")
    if variant not in VARIANTS:
        raise ConfigError(f"Unknown variant {variant!r}, expected one of {VARIANTS}")
    q = check_sign_matrix(q)
    if q.ndim != 2:
        raise DimensionError("Training codes must be an m x p matrix")
    levels = _per_layer(layer_levels, L, K, "levels")
    measurements = _per_layer(layer_measurements, m or q.shape[0], K, "measurements")
    if measurements[0] != q.shape[0]:
        raise DimensionError(f"First layer reads codes of length {q.shape[0]}, not {measurements[0]}")

    layers = []
    shared = None
    codes = q
    for k in range(K):
        plan = scb.sample_tuples(levels[k], codes.shape[0], seed, stream=k)
        model = scb.train(codes, labels, G, levels[k], plan, measurement if k == 0 else None)
        if k == K - 1:
            layers.append(IscbLayer(model))
            break
        features = layer_features(scb.score_batch(model, codes), variant)
        if reuse_measurement and shared is not None:
            if shared.cols != features.shape[0] or shared.rows != measurements[k + 1]:
                raise ConfigError("Cannot reuse the measurement matrix: layer widths differ")
            nxt = shared
        else:
            nxt = mixed_sign_matrix(measurements[k + 1], features.shape[0], seed, layer=k + 1)
            shared = nxt
        layers.append(IscbLayer(model, nxt))
        codes = binarize(nxt, features)
        logger.debug(f"Trained layer {k + 1}/{K} ({variant}, L={levels[k]}, width {features.shape[0]})")

    return IscbModel(tuple(layers), variant, G)


def score_layers(model: IscbModel, q: np.ndarray) -> List[scb.ScoreBatch]:
    """Scores of every column of q after each application"""
    codes = check_sign_matrix(q, rows=model.m)
    if codes.ndim == 1:
        codes = codes[:, None]
    batches = []
    for layer in model.layers:
        batch = scb.score_batch(layer.scb, codes)
        batches.append(batch)
        if layer.next_measurement is not None:
            codes = binarize(layer.next_measurement, layer_features(batch, model.variant))
    return batches


def score_iterative(model: IscbModel, q_col: np.ndarray, upto: Optional[int] = None) -> scb.ScoreVector:
    """Final-layer scores of one code column (or layer `upto`'s)"""
    q_col = np.asarray(q_col)
    if q_col.ndim != 1:
        raise DimensionError(f"Expected a single code column, got shape {q_col.shape}")
    batches = score_layers(_truncate(model, upto), q_col)
    return batches[-1].column(0)


def classify_iterative(model: IscbModel, q_col: np.ndarray, upto: Optional[int] = None) -> int:
    return int(np.argmax(score_iterative(model, q_col, upto).values)) + 1


def classify_layers(model: IscbModel, q: np.ndarray) -> np.ndarray:
    """(K, p) predicted class ids, row k-1 using only the first k applications"""
    return np.stack([batch.predictions() for batch in score_layers(model, q)])


def layer_accuracies(model: IscbModel, q: np.ndarray, labels) -> List[float]:
    return [accuracy(row, labels) for row in classify_layers(model, q)]


def rhat_features(model: IscbModel, layer: int, q_col: np.ndarray) -> RHatVector:
    """Per-level scores of a point at application `layer`, given that layer's input code"""
    if model.variant != RHAT:
        raise ConfigError(f"Per-level features belong to the {RHAT} variant, model is {model.variant}")
    if not 1 <= layer <= model.K:
        raise ConfigError(f"Layer must be in 1..{model.K}, got {layer}")
    layer_model = model.layers[layer - 1].scb
    q_col = np.asarray(q_col)
    if q_col.ndim != 1:
        raise DimensionError(f"Expected a single code column, got shape {q_col.shape}")
    values = scb.level_scores(layer_model, q_col)[:, :, 0].reshape(-1)
    return RHatVector(values, layer_model.L, layer_model.G)


def _truncate(model: IscbModel, upto: Optional[int]) -> IscbModel:
    if upto is None or upto == model.K:
        return model
    if not 1 <= upto <= model.K:
        raise ConfigError(f"Layer must be in 1..{model.K}, got {upto}")
    layers = list(model.layers[:upto])
    layers[-1] = IscbLayer(layers[-1].scb)
    return IscbModel(tuple(layers), model.variant, model.G)
