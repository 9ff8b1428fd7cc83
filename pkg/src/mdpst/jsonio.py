"""Canonical JSON output: sorted keys, floats rounded to 12 significant digits."""
from __future__ import annotations

import json
import math

import numpy as np


def _canon(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(f"{x:.12g}")
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return [_canon(v) for v in sorted(obj)]
    if isinstance(obj, np.ndarray):
        return [_canon(v) for v in obj.tolist()]
    return obj


def dumps(obj) -> str:
    return json.dumps(_canon(obj), sort_keys=True, indent=1) + "\n"


def dump(obj, path):
    with open(path, "w") as f:
        f.write(dumps(obj))
