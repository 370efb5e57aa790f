"""CSV and JSON report files written by experiment runs."""
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from utils.logger import Logger

logger = Logger.get_logger(__name__)

FLOAT_FORMAT = "%.17g"


def write_table(rows: Union[List[Dict[str, Any]], pd.DataFrame], path: Union[str, Path],
                columns: Sequence[str] = None) -> Path:
    """One CSV row per dict, columns in first-seen order unless given"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(rows, columns=columns)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def read_table(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def write_summary(summary: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as f:
        json.dump(summary, f, indent=2, sort_keys=True, default=_plain)
        f.write("\n")
    logger.info(f"Wrote summary to {path}")
    return path


def score_frame(batches, labels: np.ndarray, variant_levels: bool = False) -> pd.DataFrame:
    """Long table of every point's scores after each application.

    One row per (layer, point) with columns r1..rG; with variant_levels the
    per-level scores follow as r<level>_<class>.
    """
    frames = []
    for layer, batch in enumerate(batches, start=1):
        L, G, p = batch.level_values.shape
        columns = {"layer": np.full(p, layer), "point": np.arange(p), "label": labels,
                   "predicted": batch.predictions()}
        for g in range(G):
            columns[f"r{g + 1}"] = batch.values[g]
        if variant_levels:
            for level in range(L):
                for g in range(G):
                    columns[f"r{level + 1}_{g + 1}"] = batch.level_values[level, g]
        frames.append(pd.DataFrame(columns))
    return pd.concat(frames, ignore_index=True)
