"""Linear SVM on raw points vs on classifier score features, on the arc dataset."""
import time
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np
import pandas as pd

from classifier import scb
from classifier.process_pool import ProcessPool
from classifier.quantize import binarize, gaussian_matrix
from classifier.svm import predict_batch, train_linear
from data.generators import gen_arcs, is_linearly_separable
from data.tables import write_summary, write_table
from utils.exceptions import AcceptanceError
from utils.logger import Logger
from utils.utils import accuracy, format_duration
from .config import ExperimentConfig

logger = Logger.get_logger(__name__)

# (m, L) pairs compared when the command line fixes neither
SETTINGS = ((100, 1), (200, 4))
MIN_GAIN = 0.07
MIN_FEATURE_ACCURACY = 0.90


def _signed(labels: np.ndarray) -> np.ndarray:
    """Class 1 -> +1, class 2 -> -1"""
    return np.where(labels == 1, 1, -1)


def _svm_accuracy(x_train, y_train, x_test, y_test, seed: int) -> Tuple[float, float]:
    model = train_linear(x_train, _signed(y_train), seed=seed)
    return (accuracy(predict_batch(model, x_train), _signed(y_train)),
            accuracy(predict_batch(model, x_test), _signed(y_test)))


def preprocess_trial(config: ExperimentConfig, seed: int, m: int, L: int) -> Dict[str, Any]:
    dataset = gen_arcs(config.arc_n, seed)
    x_train, y_train = dataset.train()
    x_test, y_test = dataset.test()
    # the arcs straddle the origin, so cuts are affine
    a = gaussian_matrix(m, 2, seed, offsets_from=x_train)
    plan = scb.sample_tuples(L, m, seed)
    model = scb.train(binarize(a, x_train), y_train, 2, L, plan, a)
    train_batch = scb.score_batch(model, binarize(a, x_train))
    test_batch = scb.score_batch(model, binarize(a, x_test))
    f_train, f_test = train_batch.values, test_batch.values

    raw_train, raw_test = _svm_accuracy(x_train, y_train, x_test, y_test, seed)
    feat_train, feat_test = _svm_accuracy(f_train, y_train, f_test, y_test, seed)
    scb_train = accuracy(train_batch.predictions(), y_train)
    return {
        "seed": seed, "m": m, "L": L,
        "scb_train_accuracy": scb_train,
        "scb_test_accuracy": accuracy(test_batch.predictions(), y_test),
        "raw_svm_train_accuracy": raw_train,
        "raw_svm_test_accuracy": raw_test,
        "feature_svm_train_accuracy": feat_train,
        "feature_svm_test_accuracy": feat_test,
        "raw_separable": is_linearly_separable(x_train, y_train),
        "features_separable": is_linearly_separable(f_train, y_train),
        "features": {"train": f_train, "test": f_test, "train_labels": y_train, "test_labels": y_test},
    }


def _feature_frame(features: Dict[str, np.ndarray], split: str) -> pd.DataFrame:
    values = features[split]
    return pd.DataFrame({"r1": values[0], "r2": values[1], "label": features[f"{split}_labels"]})


def preprocess_checks(rows: List[Dict[str, Any]]) -> List[Tuple[str, bool]]:
    checks = []
    frame = pd.DataFrame(rows)
    for (m, L), group in frame.groupby(["m", "L"], sort=True):
        gain = group["feature_svm_test_accuracy"].mean() - group["raw_svm_test_accuracy"].mean()
        if L == 1:
            checks.append((f"m={m}, L=1: feature SVM beats raw SVM by >= {MIN_GAIN:g}", gain >= MIN_GAIN))
        else:
            checks.append((f"m={m}, L={L}: feature SVM accuracy >= {MIN_FEATURE_ACCURACY:g}",
                           group["feature_svm_test_accuracy"].mean() >= MIN_FEATURE_ACCURACY))
    perfect = frame[frame["scb_train_accuracy"] == 1.0]
    checks.append(("perfect training classification gives separable features",
                   bool((perfect["feature_svm_train_accuracy"] == 1.0).all())))
    return checks


def run_preprocess(config: ExperimentConfig) -> Dict[str, Any]:
    config.validate()
    started = time.time()
    out = Path(config.out_dir)
    settings = [(config.m or 100, config.L or 1)] if config.m or config.L else list(SETTINGS)
    jobs = [(config, seed, m, L) for m, L in settings for seed in config.seeds]
    with ProcessPool(max_processes=config.workers) as pool:
        results = pool.map(preprocess_trial, jobs)

    rows = []
    for result in results:
        features = result.pop("features")
        tag = f"m{result['m']}_L{result['L']}_seed{result['seed']}"
        for split in ("train", "test"):
            write_table(_feature_frame(features, split), out / "features" / f"{tag}_{split}.csv")
        rows.append(result)
    write_table(rows, out / "preprocess.csv")

    checks = preprocess_checks(rows)
    summary = {
        "experiment": "preprocess",
        "config": config.to_dict(),
        "settings": [list(s) for s in settings],
        "checks": {name: passed for name, passed in checks},
    }
    write_summary(summary, out / "summary.json")
    logger.info(f"preprocess finished in {format_duration(time.time() - started)}")
    failed = [name for name, passed in checks if not passed]
    if config.check and failed:
        raise AcceptanceError(f"Acceptance checks failed: {', '.join(failed)}")
    return summary
