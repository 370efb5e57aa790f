from typing import Sequence

import numpy as np

# Leading stream keys, one per consumer of randomness
STREAM_DATA = 0
STREAM_MATRIX = 1
STREAM_TUPLES = 2
STREAM_SVM = 3
STREAM_THEORY = 4
STREAM_SPLIT = 5


def derive_seed_sequence(seed: int, *keys: int) -> np.random.SeedSequence:
    """SeedSequence for the stream addressed by (seed, *keys).

    Streams with different keys are statistically independent, and a given
    address always reproduces the same stream, so work split across rows,
    layers or trials generates the same numbers as a sequential run.
    """
    if seed < 0 or any(k < 0 for k in keys):
        raise ValueError(f"Seeds and stream keys must be non-negative, got {seed}, {keys}")
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Generator for the stream addressed by (seed, *keys)"""
    return np.random.default_rng(derive_seed_sequence(seed, *keys))


def accuracy(predicted: Sequence[int], truth: Sequence[int]) -> float:
    """Fraction of matching entries"""
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise ValueError(f"Shape mismatch: {predicted.shape} vs {truth.shape}")
    if truth.size == 0:
        return 0.0
    return float(np.mean(predicted == truth))


def format_duration(seconds: float) -> str:
    """Format elapsed seconds to human readable string"""
    for unit, size in (('s', 60), ('min', 60)):
        if seconds < size:
            return f"{seconds:.1f} {unit}"
        seconds /= size
    return f"{seconds:.1f} h"


def format_size(size_bytes: float) -> str:
    """Format size in bytes to human readable string"""
    for unit in ['B', 'KB', 'MB', 'GB']:
        if size_bytes < 1024:
            return f"{size_bytes:.1f} {unit}"
        size_bytes /= 1024
    return f"{size_bytes:.1f} TB"
