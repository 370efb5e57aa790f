"""Single application of the sign-pattern classifier.

Training records, for every hyperplane tuple, how many points of each class
produced each sign pattern and turns those counts into membership scores.
Classification sums the scores of the patterns a test point produces.

Tables are stored level by level. Within a level, measurement index i and
pattern t are packed into one int64 key ``(i << 32) | t``; keys are sorted,
so slot order and pattern order coincide and lookups are a single
searchsorted per level.
"""
from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple

import numpy as np

from utils.exceptions import (ConfigError, DimensionError, EmptyDataError, LabelError,
                              PatternWidthError, TupleError, UnobservedPatternError)
from utils.logger import Logger
from utils.utils import STREAM_TUPLES, derive_rng
from .quantize import MeasurementMatrix, check_sign_matrix

logger = Logger.get_logger(__name__)

MAX_LEVEL = 32
SLOT_SHIFT = 32
PATTERN_MASK = (1 << SLOT_SHIFT) - 1
SCORE_CHUNK = 512  # test columns scored per block


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class TuplePlan:
    """Hyperplane tuples per level: levels[l-1] is an (m, l) array of row indices"""
    levels: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.levels:
            raise TupleError("A tuple plan needs at least one level")
        m = len(self.levels[0])
        if m == 0:
            raise TupleError("A tuple plan needs at least one measurement")
        checked = []
        for number, tuples in enumerate(self.levels, start=1):
            tuples = np.array(tuples, dtype=np.int64)
            if tuples.ndim == 1:
                tuples = tuples.reshape(-1, 1)
            if tuples.shape != (m, number):
                raise TupleError(f"Level {number} must hold {m} tuples of {number} indices, got {tuples.shape}")
            if tuples.size and (tuples.min() < 0 or tuples.max() >= m):
                raise TupleError(f"Level {number} references hyperplanes outside 0..{m - 1}")
            if number > 1 and np.any(np.diff(np.sort(tuples, axis=1), axis=1) == 0):
                raise TupleError(f"Level {number} has a tuple with repeated hyperplanes")
            checked.append(_frozen(tuples))
        object.__setattr__(self, "levels", tuple(checked))

    @property
    def m(self) -> int:
        return self.levels[0].shape[0]

    @property
    def L(self) -> int:
        return len(self.levels)

    def tuple_at(self, level: int, index: int) -> np.ndarray:
        return self.levels[level - 1][index]

    @classmethod
    def single_level(cls, indices) -> 'TuplePlan':
        """Level-1 plan with measurement i looking at hyperplane indices[i]"""
        return cls((np.asarray(indices, dtype=np.int64).reshape(-1, 1),))


def sample_tuples(L: int, m: int, seed: int, stream: int = 0) -> TuplePlan:
    """Draw m tuples of l distinct hyperplanes for each level l = 1..L.

    Indices within a tuple are drawn without replacement; tuples of the same
    level are drawn independently and may coincide.
    """
    if L > MAX_LEVEL:
        raise PatternWidthError(f"At most {MAX_LEVEL} levels fit a pattern word, got L={L}")
    if L < 1:
        raise TupleError(f"L must be at least 1, got {L}")
    if L > m:
        raise TupleError(f"Cannot choose {L} distinct hyperplanes out of m={m}")
    levels = []
    for level in range(1, L + 1):
        rng = derive_rng(seed, STREAM_TUPLES, stream, level)
        levels.append(np.stack([rng.choice(m, size=level, replace=False) for _ in range(m)]))
    return TuplePlan(tuple(levels))


def membership(counts) -> np.ndarray:
    """Membership scores of one pattern from its per-class counts.

    r(g) = (P_g / sum P) * (sum_j |P_g - P_j|) / sum P
    """
    counts = np.asarray(counts)
    if counts.ndim != 1:
        raise DimensionError(f"Expected a vector of class counts, got shape {counts.shape}")
    if np.any(counts < 0):
        raise ValueError("Class counts must be non-negative")
    if counts.sum() == 0:
        raise UnobservedPatternError("Pattern was never observed; it has no membership scores")
    return membership_rows(counts[None, :])[0]


def membership_rows(counts: np.ndarray) -> np.ndarray:
    """Row-wise membership for a (patterns, G) count matrix with no all-zero rows"""
    counts = counts.astype(np.float64)
    total = counts.sum(axis=1, keepdims=True)
    balance = np.zeros_like(counts)
    for j in range(counts.shape[1]):
        balance += np.abs(counts - counts[:, j:j + 1])
    return (counts / total) * (balance / total)


@dataclass(frozen=True)
class LevelTable:
    """Observed patterns of one level, sorted by packed (index, pattern) key"""
    level: int
    keys: np.ndarray
    counts: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        for name in ("keys", "counts", "values"):
            _frozen(getattr(self, name))

    def find(self, index: int, pattern: int) -> Optional[int]:
        key = (int(index) << SLOT_SHIFT) | int(pattern)
        pos = int(np.searchsorted(self.keys, key))
        if pos < len(self.keys) and self.keys[pos] == key:
            return pos
        return None


@dataclass(frozen=True)
class MembershipTable:
    """(level, measurement index, pattern) -> G membership scores, plus the counts behind them"""
    G: int
    levels: Tuple[LevelTable, ...]

    @property
    def L(self) -> int:
        return len(self.levels)

    def lookup(self, level: int, index: int, pattern: int) -> Optional[np.ndarray]:
        table = self.levels[level - 1]
        pos = table.find(index, pattern)
        return None if pos is None else table.values[pos]

    def class_counts(self, level: int, index: int, pattern: int) -> Optional[np.ndarray]:
        table = self.levels[level - 1]
        pos = table.find(index, pattern)
        return None if pos is None else table.counts[pos]

    def __contains__(self, key) -> bool:
        level, index, pattern = key
        return 1 <= level <= self.L and self.levels[level - 1].find(index, pattern) is not None

    def __len__(self) -> int:
        return sum(len(table.keys) for table in self.levels)

    def entries(self) -> Iterator[Tuple[int, int, int, np.ndarray, np.ndarray]]:
        """All (level, index, pattern, counts, values) in sorted key order"""
        for table in self.levels:
            for key, counts, values in zip(table.keys, table.counts, table.values):
                yield (table.level, int(key >> SLOT_SHIFT), int(key & PATTERN_MASK), counts, values)


@dataclass(frozen=True)
class ScbModel:
    plan: TuplePlan
    table: MembershipTable
    G: int
    measurement: Optional[MeasurementMatrix] = None

    def __post_init__(self):
        if self.table.L > self.plan.L:
            raise ConfigError(f"Table has {self.table.L} levels but the plan only {self.plan.L}")
        if self.measurement is not None and self.measurement.rows != self.plan.m:
            raise DimensionError(f"Plan uses {self.plan.m} hyperplanes, measurement has {self.measurement.rows}")

    @property
    def L(self) -> int:
        return self.table.L

    @property
    def m(self) -> int:
        return self.plan.m


@dataclass(frozen=True)
class ScoreVector:
    values: np.ndarray
    normalized: bool = True
    matched: int = 0

    @property
    def G(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ScoreBatch:
    """Scores of many columns: level_values is (L, G, p), values its sum over levels"""
    level_values: np.ndarray
    matched: np.ndarray
    normalized: bool = True
    values: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "values", self.level_values.sum(axis=0))

    def column(self, j: int) -> ScoreVector:
        return ScoreVector(self.values[:, j].copy(), self.normalized, int(self.matched[j]))

    def predictions(self) -> np.ndarray:
        # argmax returns the first maximum, i.e. ties go to the lowest class id
        return np.argmax(self.values, axis=0) + 1


def pattern_codes(q: np.ndarray, tuples: np.ndarray) -> np.ndarray:
    """Packed sign patterns, shape (m, p): bit j is set iff the j-th hyperplane of the tuple reads +1"""
    positive = (q > 0)
    codes = np.zeros((tuples.shape[0], q.shape[1]), dtype=np.int64)
    for bit in range(tuples.shape[1]):
        codes |= positive[tuples[:, bit]].astype(np.int64) << bit
    return codes


def _slot_keys(codes: np.ndarray) -> np.ndarray:
    slots = np.arange(codes.shape[0], dtype=np.int64)[:, None] << SLOT_SHIFT
    return slots | codes


def check_labels(labels, G: int, p: int) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.shape != (p,):
        raise DimensionError(f"Expected {p} labels, got shape {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        if not np.all(np.mod(labels, 1) == 0):
            raise LabelError("Labels must be integer class ids")
        labels = labels.astype(np.int64)
    if G < 1:
        raise LabelError(f"G must be at least 1, got {G}")
    if p and (labels.min() < 1 or labels.max() > G):
        raise LabelError(f"Labels must lie in 1..{G}, got range {labels.min()}..{labels.max()}")
    return labels.astype(np.int64)


def train(q: np.ndarray, labels, G: int, L: int, plan: TuplePlan,
          measurement: Optional[MeasurementMatrix] = None) -> ScbModel:
    """Build the membership table for levels 1..L of `plan` from training codes q (m x p)"""
    q = check_sign_matrix(q)
    if q.ndim != 2:
        raise DimensionError("Training codes must be an m x p matrix")
    if q.shape[1] == 0:
        raise EmptyDataError("Cannot train on an empty training set")
    if q.shape[0] != plan.m:
        raise DimensionError(f"Plan uses {plan.m} hyperplanes but codes have {q.shape[0]} rows")
    if not 1 <= L <= plan.L:
        raise ConfigError(f"L={L} is outside the plan's 1..{plan.L} levels")
    labels = check_labels(labels, G, q.shape[1]) - 1

    levels = []
    for level in range(1, L + 1):
        keys = _slot_keys(pattern_codes(q, plan.levels[level - 1])).ravel()
        unique, inverse = np.unique(keys, return_inverse=True)
        flat = inverse.reshape(-1) * G + np.tile(labels, plan.m)
        counts = np.bincount(flat, minlength=len(unique) * G).reshape(-1, G).astype(np.int64)
        levels.append(LevelTable(level, unique, counts, membership_rows(counts)))
        logger.debug(f"Level {level}: {len(unique)} observed patterns over {plan.m} measurements")

    return ScbModel(plan, MembershipTable(G, tuple(levels)), G, measurement)


def score_batch(model: ScbModel, q: np.ndarray) -> ScoreBatch:
    """Score every column of q; unseen patterns contribute nothing. Results are divided by L*m."""
    q = check_sign_matrix(q, rows=model.m)
    if q.ndim == 1:
        q = q[:, None]
    p = q.shape[1]
    level_values = np.zeros((model.L, model.G, p))
    matched = np.zeros(p, dtype=np.int64)

    for table in model.table.levels:
        tuples = model.plan.levels[table.level - 1]
        if len(table.keys) == 0:
            continue
        for start in range(0, p, SCORE_CHUNK):
            stop = min(start + SCORE_CHUNK, p)
            keys = _slot_keys(pattern_codes(q[:, start:stop], tuples))
            pos = np.minimum(np.searchsorted(table.keys, keys), len(table.keys) - 1)
            hit = table.keys[pos] == keys
            contribution = np.where(hit[..., None], table.values[pos], 0.0)
            level_values[table.level - 1, :, start:stop] = contribution.sum(axis=0).T
            matched[start:stop] += hit.sum(axis=0)

    level_values /= model.L * model.m
    return ScoreBatch(level_values, matched)


def score(model: ScbModel, q_col: np.ndarray) -> ScoreVector:
    q_col = np.asarray(q_col)
    if q_col.ndim != 1:
        raise DimensionError(f"Expected a single code column, got shape {q_col.shape}")
    return score_batch(model, q_col).column(0)


def level_scores(model: ScbModel, q: np.ndarray) -> np.ndarray:
    """Per-level scores (L, G, p), normalized like score_batch; summing over levels gives the scores"""
    return score_batch(model, q).level_values


def classify_batch(model: ScbModel, q: np.ndarray) -> np.ndarray:
    return score_batch(model, q).predictions()


def classify(model: ScbModel, q_col: np.ndarray) -> int:
    # lowest class id wins ties
    return int(np.argmax(score(model, q_col).values)) + 1
