"""Seeded synthetic two-class datasets in the plane.

Points are columns of an n x p matrix. Class 1 is always the first class
listed in each generator's docstring. Geometry parameters that the
generators fix are recorded in the dataset's metadata.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np
import pandas as pd
from scipy import optimize

from utils.exceptions import DimensionError, LabelError
from utils.logger import Logger
from utils.utils import STREAM_DATA, derive_rng

logger = Logger.get_logger(__name__)

TRAIN = "train"
TEST = "test"

# sandwich geometry: class 1 bands at x = 1 and x = 3, class 2 band at x = 2
SANDWICH_X = (1.0, 2.0, 3.0)
SANDWICH_Y = 3.0
SANDWICH_JITTER = 0.1

# arcs: class 2 is a cup nested in the concavity of the class-1 half-moon
ARC_RADIUS = 1.0
ARC_THICKNESS = 0.1
ARC_INNER_RADIUS = 0.35
ARC_INNER_CENTER = (0.0, 0.75)

SYMMETRIC_GAP = 0.05
SYMMETRIC_RADII = (0.5, 1.5)


@dataclass
class LabeledDataset:
    points: np.ndarray
    labels: np.ndarray
    train_index: np.ndarray
    test_index: np.ndarray
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.train_index = np.asarray(self.train_index, dtype=np.int64)
        self.test_index = np.asarray(self.test_index, dtype=np.int64)
        if self.points.ndim != 2:
            raise DimensionError(f"Points must be an n x p matrix, got shape {self.points.shape}")
        if self.labels.shape != (self.p,):
            raise DimensionError(f"Expected {self.p} labels, got shape {self.labels.shape}")
        if self.p and self.labels.min() < 1:
            raise LabelError("Class ids start at 1")
        together = np.concatenate([self.train_index, self.test_index])
        if len(together) != self.p or not np.array_equal(np.sort(together), np.arange(self.p)):
            raise DimensionError("Train and test indices must be disjoint and cover every point")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def p(self) -> int:
        return self.points.shape[1]

    @property
    def G(self) -> int:
        return int(self.labels.max()) if self.p else 0

    def train(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.points[:, self.train_index], self.labels[self.train_index]

    def test(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.points[:, self.test_index], self.labels[self.test_index]

    def split_column(self) -> np.ndarray:
        split = np.full(self.p, TEST, dtype=object)
        split[self.train_index] = TRAIN
        return split


def _halves(count: int, offset: int) -> Tuple[np.ndarray, np.ndarray]:
    """First ceil(count/2) indices of a block train, the rest test"""
    cut = offset + (count + 1) // 2
    return np.arange(offset, cut), np.arange(cut, offset + count)


def _assemble(blocks, meta: Dict[str, Any]) -> LabeledDataset:
    """Stack (points, label) blocks; every block is split in half on its own"""
    points, labels, train, test = [], [], [], []
    offset = 0
    for block, label in blocks:
        count = block.shape[1]
        points.append(block)
        labels.append(np.full(count, label))
        tr, te = _halves(count, offset)
        train.append(tr)
        test.append(te)
        offset += count
    return LabeledDataset(np.hstack(points), np.concatenate(labels),
                          np.concatenate(train), np.concatenate(test), meta)


def _unit(angles: np.ndarray) -> np.ndarray:
    return np.vstack([np.cos(angles), np.sin(angles)])


def gen_point_masses(count1: int, count2: int, angle12: float, seed: int) -> LabeledDataset:
    """Class 1: count1 copies of a unit vector at angle phi; class 2: count2 copies at phi + angle12"""
    if count1 < 1 or count2 < 1:
        raise ValueError(f"Both classes need at least one point, got {count1}, {count2}")
    if not 0 < angle12 < np.pi / 2:
        raise ValueError(f"angle12 must lie in (0, pi/2), got {angle12}")
    phi = derive_rng(seed, STREAM_DATA).uniform(0.0, np.pi / 2 - angle12)
    first = np.repeat(_unit(np.array([phi])), count1, axis=1)
    second = np.repeat(_unit(np.array([phi + angle12])), count2, axis=1)
    # cos at pi/2 is a tiny positive or negative float; the quadrant is closed
    first, second = np.maximum(first, 0.0), np.maximum(second, 0.0)
    meta = {"generator": "point-mass", "count1": count1, "count2": count2,
            "angle12": angle12, "phi": phi, "seed": seed}
    return _assemble([(first, 1), (second, 2)], meta)


def gen_symmetric(n: int, spread: float, seed: int, gap: float = SYMMETRIC_GAP) -> LabeledDataset:
    """Class 1 above y = x at angles in (pi/4 + gap, pi/4 + spread); class 2 is its exact mirror image"""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if not 0 < gap < spread <= np.pi / 4:
        raise ValueError(f"Need 0 < gap < spread <= pi/4, got gap={gap}, spread={spread}")
    rng = derive_rng(seed, STREAM_DATA)
    angles = rng.uniform(np.pi / 4 + gap, np.pi / 4 + spread, n)
    radii = rng.uniform(*SYMMETRIC_RADII, n)
    first = radii * _unit(angles)
    second = first[::-1].copy()
    meta = {"generator": "symmetric", "n": n, "spread": spread, "gap": gap, "seed": seed}
    return _assemble([(first, 1), (second, 2)], meta)


def gen_sandwich(n_blue: int, n_red: int, seed: int) -> LabeledDataset:
    """Class 1 (red): two vertical bands either side of class 2 (blue).

    Each band is split in half on its own so both red bands contribute the
    same number of training points. n_blue == n_red gives the balanced variant.
    """
    if n_red < 2 or n_red % 2:
        raise ValueError(f"n_red must be a positive even number, got {n_red}")
    if n_blue < 1:
        raise ValueError(f"n_blue must be at least 1, got {n_blue}")
    rng = derive_rng(seed, STREAM_DATA)

    def band(x: float, count: int) -> np.ndarray:
        xs = x + SANDWICH_JITTER * rng.standard_normal(count)
        ys = SANDWICH_Y + SANDWICH_JITTER * rng.standard_normal(count)
        return np.vstack([xs, ys])

    left, right = SANDWICH_X[0], SANDWICH_X[2]
    blocks = [(band(left, n_red // 2), 1), (band(SANDWICH_X[1], n_blue), 2), (band(right, n_red // 2), 1)]
    meta = {"generator": "sandwich", "n_blue": n_blue, "n_red": n_red, "band_x": list(SANDWICH_X),
            "band_y": SANDWICH_Y, "jitter": SANDWICH_JITTER, "seed": seed}
    return _assemble(blocks, meta)


def gen_wedges(a1: float, a2: float, a12: float, count: int, seed: int) -> Tuple[LabeledDataset, np.ndarray, np.ndarray]:
    """Class 1 uniform in angle over a wedge of width a1, class 2 over a wedge of width a2, a12 apart.

    Also returns x1 and x2, the unit points on the facing edges of the two wedges.
    """
    if min(a1, a2, a12) <= 0:
        raise ValueError("Wedge angles must be positive")
    room = np.pi / 2 - (a1 + a2 + a12)
    if room < 0:
        raise ValueError(f"Wedges of total width {a1 + a2 + a12} do not fit the positive quadrant")
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    rng = derive_rng(seed, STREAM_DATA)
    start = rng.uniform(0.0, room)
    inner1 = start + a1
    inner2 = inner1 + a12
    first = _unit(rng.uniform(start, inner1, count))
    second = _unit(rng.uniform(inner2, inner2 + a2, count))
    x1, x2 = _unit(np.array([inner1]))[:, 0], _unit(np.array([inner2]))[:, 0]
    meta = {"generator": "wedges", "a1": a1, "a2": a2, "a12": a12, "count": count,
            "start": start, "x1": x1.tolist(), "x2": x2.tolist(), "seed": seed}
    return _assemble([(np.maximum(first, 0.0), 1), (np.maximum(second, 0.0), 2)], meta), x1, x2


def gen_arcs(n: int, seed: int) -> LabeledDataset:
    """Two interleaved half-moons: class 1 the upper arc, class 2 a smaller inverted arc inside it.

    The inner arc lies in the convex hull of the outer one, so no line
    separates them; its tips stay ARC_THICKNESS clear of the outer arc.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    rng = derive_rng(seed, STREAM_DATA)

    def arc(count: int, radius: float) -> Tuple[np.ndarray, np.ndarray]:
        t = rng.uniform(0.0, np.pi, count)
        r = radius + rng.uniform(-ARC_THICKNESS / 2, ARC_THICKNESS / 2, count)
        return t, r

    t, r = arc(n, ARC_RADIUS)
    first = np.vstack([r * np.cos(t), r * np.sin(t)])
    t, r = arc(n, ARC_INNER_RADIUS)
    cx, cy = ARC_INNER_CENTER
    second = np.vstack([cx + r * np.cos(t), cy - r * np.sin(t)])
    meta = {"generator": "arcs", "n": n, "radius": ARC_RADIUS, "thickness": ARC_THICKNESS,
            "inner_radius": ARC_INNER_RADIUS, "inner_center": list(ARC_INNER_CENTER), "seed": seed}
    return _assemble([(first, 1), (second, 2)], meta)


def is_linearly_separable(points: np.ndarray, labels: np.ndarray) -> bool:
    """Feasibility of y_i (<w, x_i> + b) >= 1 for two classes, solved as a linear program"""
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if len(classes) != 2:
        raise LabelError(f"Separability is defined for two classes, got {len(classes)}")
    y = np.where(labels == classes[0], 1.0, -1.0)
    n, p = points.shape
    a_ub = -y[:, None] * np.hstack([points.T, np.ones((p, 1))])
    result = optimize.linprog(np.zeros(n + 1), A_ub=a_ub, b_ub=-np.ones(p),
                              bounds=[(None, None)] * (n + 1), method="highs")
    return result.status == 0


def to_frame(dataset: LabeledDataset) -> pd.DataFrame:
    frame = pd.DataFrame({f"x{i + 1}": dataset.points[i] for i in range(dataset.n)})
    frame["label"] = dataset.labels
    frame["split"] = dataset.split_column()
    return frame


def _meta_path(path: Path) -> Path:
    return path.with_suffix(path.suffix + ".json")


def write_csv(dataset: LabeledDataset, path: Union[str, Path]) -> Path:
    """Write points as CSV (x1..xd, label, split) and the metadata as a JSON sidecar"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    to_frame(dataset).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    with open(_meta_path(path), "w", newline="\n") as f:
        json.dump(dataset.meta, f, indent=2, sort_keys=True)
    logger.info(f"Wrote {dataset.p} points to {path}")
    return path


def read_dataset_csv(path: Union[str, Path]) -> LabeledDataset:
    path = Path(path)
    frame = pd.read_csv(path, float_precision="round_trip")
    features = [c for c in frame.columns if c.startswith("x")]
    if not features or "label" not in frame or "split" not in frame:
        raise DimensionError(f"{path} needs columns x1..xd, label and split")
    split = frame["split"].to_numpy()
    unknown = set(split) - {TRAIN, TEST}
    if unknown:
        raise DimensionError(f"Unknown split values in {path}: {sorted(unknown)}")
    meta = {}
    if _meta_path(path).exists():
        with open(_meta_path(path)) as f:
            meta = json.load(f)
    return LabeledDataset(frame[features].to_numpy(dtype=np.float64).T,
                          frame["label"].to_numpy(),
                          np.flatnonzero(split == TRAIN),
                          np.flatnonzero(split == TEST),
                          meta)
