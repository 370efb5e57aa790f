"""Random hyperplane arrangements and one-bit sign measurements.

Every row of a generated matrix is drawn from its own random stream addressed
by (seed, layer, row), so a matrix is bit-identical no matter how its rows
are produced or in which order.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from utils.exceptions import DimensionError
from utils.logger import Logger
from utils.utils import STREAM_MATRIX, derive_rng

logger = Logger.get_logger(__name__)

UNCONSTRAINED = "unconstrained"
MIXED_SIGN = "mixed-sign"
MIRRORED = "mirrored"
KINDS = (UNCONSTRAINED, MIXED_SIGN, MIRRORED)


@dataclass(frozen=True)
class MeasurementMatrix:
    """m x n matrix whose rows are hyperplane normals.

    `offsets`, when present, turns row i into the affine cut
    <a_i, x> = offsets[i]. Homogeneous hyperplanes leave it as None.
    """
    matrix: np.ndarray
    kind: str = UNCONSTRAINED
    offsets: Optional[np.ndarray] = None

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] == 0 or matrix.shape[1] == 0:
            raise DimensionError(f"Measurement matrix must be a non-empty 2D array, got shape {matrix.shape}")
        if self.kind not in KINDS:
            raise ValueError(f"Unknown measurement kind {self.kind!r}")
        if self.kind == MIXED_SIGN and not np.all(is_mixed_sign(matrix)):
            raise DimensionError("Mixed-sign matrix has a row without both signs")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        if self.offsets is not None:
            offsets = np.array(self.offsets, dtype=np.float64).reshape(-1)
            if offsets.shape[0] != matrix.shape[0]:
                raise DimensionError(f"Expected {matrix.shape[0]} offsets, got {offsets.shape[0]}")
            offsets.setflags(write=False)
            object.__setattr__(self, "offsets", offsets)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def affine(self) -> bool:
        return self.offsets is not None


def is_mixed_sign(matrix: np.ndarray) -> np.ndarray:
    """Per-row flag: at least one strictly positive and one strictly negative entry"""
    matrix = np.atleast_2d(matrix)
    return np.any(matrix > 0, axis=1) & np.any(matrix < 0, axis=1)


def _check_count(name: str, value: int, minimum: int = 1):
    if int(value) != value or value < minimum:
        raise DimensionError(f"{name} must be an integer >= {minimum}, got {value}")


def gaussian_matrix(m: int, n: int, seed: int, layer: int = 0,
                    offsets_from: Optional[np.ndarray] = None) -> MeasurementMatrix:
    """m x n matrix of i.i.d. standard normal entries.

    With `offsets_from` (an n x p data matrix), every hyperplane is also
    shifted to pass through a point drawn uniformly from the bounding box of
    the data. The normals are the same with or without offsets.
    """
    _check_count("m", m)
    _check_count("n", n)
    if offsets_from is not None:
        offsets_from = np.asarray(offsets_from, dtype=np.float64)
        if offsets_from.ndim != 2 or offsets_from.shape[0] != n or offsets_from.shape[1] == 0:
            raise DimensionError(f"Offset data must be {n} x p with p >= 1, got {offsets_from.shape}")
        low, high = offsets_from.min(axis=1), offsets_from.max(axis=1)

    rows = np.empty((m, n))
    offsets = np.empty(m) if offsets_from is not None else None
    for i in range(m):
        rng = derive_rng(seed, STREAM_MATRIX, layer, i)
        rows[i] = rng.standard_normal(n)
        if offsets is not None:
            anchor = rng.uniform(low, high)
            offsets[i] = rows[i] @ anchor
    logger.debug(f"Drew {m}x{n} Gaussian measurement matrix (seed={seed}, layer={layer}, affine={offsets is not None})")
    return MeasurementMatrix(rows, UNCONSTRAINED, offsets)


def mixed_sign_matrix(m: int, g: int, seed: int, layer: int = 1) -> MeasurementMatrix:
    """m x g Gaussian matrix conditioned on every row having both signs.

    Rows are resampled until they pass, which keeps each row distributed as
    a standard Gaussian restricted to the mixed-sign set.
    """
    _check_count("m", m)
    _check_count("g", g, minimum=2)
    rows = np.empty((m, g))
    draws = 0
    for i in range(m):
        rng = derive_rng(seed, STREAM_MATRIX, layer, i)
        while True:
            row = rng.standard_normal(g)
            draws += 1
            if np.any(row > 0) and np.any(row < 0):
                break
        rows[i] = row
    logger.debug(f"Drew {m}x{g} mixed-sign matrix with {draws} raw rows (layer={layer})")
    return MeasurementMatrix(rows, MIXED_SIGN)


def mirrored_pair_matrix(m: int, seed: int, layer: int = 0) -> MeasurementMatrix:
    """m x 2 Gaussian matrix of hyperplanes in pairs mirrored about y = x.

    Row 2k is a Gaussian normal (a, b) and row 2k+1 is its reflection (b, a).
    """
    _check_count("m", m, minimum=2)
    if m % 2:
        raise DimensionError(f"Mirrored hyperplanes come in pairs, m must be even, got {m}")
    rows = np.empty((m, 2))
    for k in range(m // 2):
        a, b = derive_rng(seed, STREAM_MATRIX, layer, k).standard_normal(2)
        rows[2 * k] = (a, b)
        rows[2 * k + 1] = (b, a)
    return MeasurementMatrix(rows, MIRRORED)


def binarize(a: MeasurementMatrix, x: np.ndarray) -> np.ndarray:
    """Sign measurements Q = sign(A X) with sign(0) = +1.

    `x` is an n x p data matrix (one point per column) or a single n-vector;
    the result is an int8 array of the matching shape over {-1, +1}.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim not in (1, 2) or x.shape[0] != a.cols:
        raise DimensionError(f"Data with leading dimension {x.shape[0] if x.ndim else 0} "
                             f"cannot be measured by a {a.rows}x{a.cols} matrix")
    projections = a.matrix @ x
    if a.offsets is not None:
        projections = projections - (a.offsets if x.ndim == 1 else a.offsets[:, None])
    return np.where(projections >= 0, 1, -1).astype(np.int8)


def check_sign_matrix(q: np.ndarray, rows: Optional[int] = None) -> np.ndarray:
    """Validate a {-1, +1} code matrix (or single code column) and return it as int8"""
    q = np.asarray(q)
    if q.ndim not in (1, 2):
        raise DimensionError(f"Sign data must be 1D or 2D, got {q.ndim}D")
    if rows is not None and q.shape[0] != rows:
        raise DimensionError(f"Expected codes of length {rows}, got {q.shape[0]}")
    if not np.all((q == 1) | (q == -1)):
        raise ValueError("Sign data may only contain -1 and +1")
    return q.astype(np.int8, copy=False)
