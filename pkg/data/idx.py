"""Reader and writer for IDX files, the container format of the MNIST digits.

Layout (big endian):
  u8 u8    zero
  u8       data type (0x08 = unsigned byte)
  u8       rank
  i32[rank] dimension sizes
  u8[]     payload, row-major
"""
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from utils.exceptions import ConsistencyError, IdxFormatError, IdxLengthError
from utils.logger import Logger
from utils.utils import STREAM_SPLIT, derive_rng

logger = Logger.get_logger(__name__)

UNSIGNED_BYTE = 0x08
IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
DATA_DIR_ENV = "ITERSCB_DATA_DIR"
DEFAULT_DATA_DIR = Path("datasets") / "mnist"

MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}


@dataclass(frozen=True)
class IdxHeader:
    magic: int
    dimensions: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return self.magic & 0xFF

    @property
    def size(self) -> int:
        return int(np.prod(self.dimensions, dtype=np.int64))

    @property
    def length(self) -> int:
        """Header size in bytes"""
        return 4 + 4 * self.rank


def data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, DEFAULT_DATA_DIR))


def read_header(raw: bytes, expected_magic: int) -> IdxHeader:
    if len(raw) < 4:
        raise IdxLengthError("File is too short for an IDX header")
    magic, = struct.unpack(">I", raw[:4])
    if magic != expected_magic:
        raise IdxFormatError(f"Magic number mismatch: expected {expected_magic:#010x}, got {magic:#010x}")
    rank = magic & 0xFF
    if len(raw) < 4 + 4 * rank:
        raise IdxLengthError(f"Header declares rank {rank} but the file ends early")
    dimensions = struct.unpack(f">{rank}I", raw[4:4 + 4 * rank])
    return IdxHeader(magic, tuple(int(d) for d in dimensions))


def _read(path: Union[str, Path], expected_magic: int) -> Tuple[IdxHeader, np.ndarray]:
    with open(path, "rb") as f:
        raw = f.read()
    header = read_header(raw, expected_magic)
    payload = raw[header.length:]
    if len(payload) != header.size:
        raise IdxLengthError(f"{path}: payload has {len(payload)} bytes, header promises {header.size}")
    return header, np.frombuffer(payload, dtype=np.uint8).reshape(header.dimensions)


def load_idx_images(path: Union[str, Path]) -> np.ndarray:
    """Images as an n x p matrix: one column per image, pixels row-major and scaled to [0, 1]"""
    header, images = _read(path, IMAGE_MAGIC)
    count = header.dimensions[0]
    logger.debug(f"Loaded {count} images of shape {header.dimensions[1:]} from {path}")
    return images.reshape(count, -1).T.astype(np.float64) / 255.0


def load_idx_labels(path: Union[str, Path]) -> np.ndarray:
    """Digit labels 0..9 mapped to class ids 1..10"""
    header, labels = _read(path, LABEL_MAGIC)
    return labels.astype(np.int64) + 1


def write_idx(path: Union[str, Path], array: np.ndarray) -> Path:
    """Write an unsigned-byte array as IDX"""
    array = np.asarray(array)
    if array.dtype != np.uint8:
        raise IdxFormatError(f"Only unsigned byte payloads are supported, got {array.dtype}")
    path = Path(path)
    magic = (UNSIGNED_BYTE << 8) | array.ndim
    with open(path, "wb") as f:
        f.write(struct.pack(f">I{array.ndim}I", magic, *array.shape))
        f.write(np.ascontiguousarray(array).tobytes())
    return path


def load_mnist(kind: str = "train", directory: Union[str, Path, None] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(784 x p images, p labels) of the MNIST train or test split"""
    if kind not in MNIST_FILES:
        raise ValueError(f"kind must be one of {sorted(MNIST_FILES)}, got {kind!r}")
    directory = Path(directory) if directory is not None else data_dir()
    image_name, label_name = MNIST_FILES[kind]
    images = load_idx_images(directory / image_name)
    labels = load_idx_labels(directory / label_name)
    if images.shape[1] != len(labels):
        raise ConsistencyError(f"{images.shape[1]} images but {len(labels)} labels in {directory}")
    logger.info(f"Loaded MNIST {kind}: {len(labels)} images from {directory}")
    return images, labels


def mnist_available(directory: Union[str, Path, None] = None) -> bool:
    directory = Path(directory) if directory is not None else data_dir()
    return all((directory / name).exists() for names in MNIST_FILES.values() for name in names)


def select_per_class(labels: np.ndarray, per_class: int, seed: int) -> np.ndarray:
    """Indices of the first per_class examples of every class after a seeded shuffle"""
    labels = np.asarray(labels)
    order = derive_rng(seed, STREAM_SPLIT).permutation(len(labels))
    chosen = []
    for g in np.unique(labels):
        members = order[labels[order] == g]
        if len(members) < per_class:
            raise ConsistencyError(f"Class {g} has only {len(members)} examples, {per_class} requested")
        chosen.append(members[:per_class])
    return np.sort(np.concatenate(chosen))
