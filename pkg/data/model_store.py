"""Structured-text (JSON) storage for trained iterative models.

Files carry a format version, explicit field names, matrices as nested
lists and membership entries sorted by (level, index, pattern). Floats are
written in shortest round-trip form, so a loaded model reproduces every
score bit for bit.
"""
import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from classifier import scb
from classifier.iscb import IscbLayer, IscbModel
from classifier.quantize import MeasurementMatrix
from utils.exceptions import IterScbError, MigrationError, ModelFormatError
from utils.logger import Logger

logger = Logger.get_logger(__name__)

FORMAT_VERSION = 1


def _measurement_to_dict(a: Optional[MeasurementMatrix]) -> Optional[Dict[str, Any]]:
    if a is None:
        return None
    return {
        "kind": a.kind,
        "rows": a.rows,
        "cols": a.cols,
        "matrix": a.matrix.tolist(),
        "offsets": None if a.offsets is None else a.offsets.tolist(),
    }


def _measurement_from_dict(data: Optional[Dict[str, Any]]) -> Optional[MeasurementMatrix]:
    if data is None:
        return None
    matrix = np.array(data["matrix"], dtype=np.float64)
    if matrix.shape != (data["rows"], data["cols"]):
        raise ModelFormatError(f"Matrix shape {matrix.shape} disagrees with rows/cols {data['rows']}x{data['cols']}")
    return MeasurementMatrix(matrix, data["kind"], data["offsets"])


def _scb_to_dict(model: scb.ScbModel) -> Dict[str, Any]:
    entries = [{
        "level": level,
        "index": index,
        "pattern": pattern,
        "width": level,
        "counts": counts.tolist(),
        "values": values.tolist(),
    } for level, index, pattern, counts, values in model.table.entries()]
    return {
        "L": model.L,
        "m": model.m,
        "G": model.G,
        "measurement": _measurement_to_dict(model.measurement),
        "plan": [tuples.tolist() for tuples in model.plan.levels],
        "table": entries,
    }


def _scb_from_dict(data: Dict[str, Any]) -> scb.ScbModel:
    plan = scb.TuplePlan(tuple(np.array(tuples, dtype=np.int64) for tuples in data["plan"]))
    G, L = int(data["G"]), int(data["L"])
    grouped = {level: [] for level in range(1, L + 1)}
    for entry in data["table"]:
        if entry["width"] != entry["level"] or entry["pattern"] >> entry["width"]:
            raise ModelFormatError(f"Pattern {entry['pattern']} does not fit width {entry['width']}")
        grouped[entry["level"]].append(entry)
    levels = []
    for level, entries in grouped.items():
        keys = np.array([(e["index"] << scb.SLOT_SHIFT) | e["pattern"] for e in entries], dtype=np.int64)
        if np.any(np.diff(keys) <= 0):
            raise ModelFormatError(f"Level {level} entries are not sorted by (index, pattern)")
        counts = np.array([e["counts"] for e in entries], dtype=np.int64).reshape(-1, G)
        values = np.array([e["values"] for e in entries], dtype=np.float64).reshape(-1, G)
        levels.append(scb.LevelTable(level, keys, counts, values))
    model = scb.ScbModel(plan, scb.MembershipTable(G, tuple(levels)), G, _measurement_from_dict(data["measurement"]))
    if model.m != data["m"]:
        raise ModelFormatError(f"Plan has {model.m} measurements, file says {data['m']}")
    return model


def model_to_dict(model: IscbModel, meta: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "variant": model.variant,
        "G": model.G,
        "K": model.K,
        "meta": meta or {},
        "layers": [{
            "scb": _scb_to_dict(layer.scb),
            "next_measurement": _measurement_to_dict(layer.next_measurement),
        } for layer in model.layers],
    }


def model_from_dict(data: Dict[str, Any]) -> IscbModel:
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise MigrationError(f"Model format version {version} cannot be read, this build reads {FORMAT_VERSION}")
    layers = tuple(IscbLayer(_scb_from_dict(layer["scb"]), _measurement_from_dict(layer["next_measurement"]))
                   for layer in data["layers"])
    if len(layers) != data["K"]:
        raise ModelFormatError(f"File declares K={data['K']} but holds {len(layers)} layers")
    return IscbModel(layers, data["variant"], int(data["G"]))


def save_model(model: IscbModel, path: Union[str, Path], meta: Optional[Dict[str, Any]] = None) -> Path:
    """Write the model; `meta` (seeds, dataset name, ...) is stored alongside"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as f:
        json.dump(model_to_dict(model, meta), f, indent=1)
        f.write("\n")
    logger.info(f"Saved {model.K}-layer model to {path}")
    return path


def load_model(path: Union[str, Path]) -> IscbModel:
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ModelFormatError(f"{path} is not a model file: {str(e)}")
    if not isinstance(data, dict):
        raise ModelFormatError(f"{path} does not hold a model object")
    try:
        return model_from_dict(data)
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError, IterScbError) as e:
        raise ModelFormatError(f"{path} is corrupted: {str(e)}")


def load_model_meta(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path) as f:
        return json.load(f).get("meta", {})
