from __future__ import annotations

import logging
from typing import Any

import fsspec
import numpy as np
import pandas as pd

log = logging.getLogger(__name__)

SCAN_COLUMNS = ("x", "y", "abs_sigma")


def scan_frame(x: Any, y: Any, abs_sigma: Any) -> pd.DataFrame:
    """Frame of a sigma scan with columns ``x``, ``y``, ``abs_sigma``."""
    return pd.DataFrame(
        {
            "x": np.asarray(x, dtype=np.float64),
            "y": np.asarray(y, dtype=np.float64),
            "abs_sigma": np.asarray(abs_sigma, dtype=np.float64),
        },
        columns=list(SCAN_COLUMNS),
    )


def write_scan(
    frame: pd.DataFrame,
    path: str,
    storage_options: dict | None = None,
) -> None:
    """Write a scan as CSV with 17 significant digits."""
    with fsspec.open(path, "w", newline="", **(storage_options or {})) as f:
        frame.to_csv(f, index=False, float_format="%.17g")
    log.debug("wrote %d scan rows to %s", len(frame), path)


def read_scan(path: str, storage_options: dict | None = None) -> pd.DataFrame:
    with fsspec.open(path, "r", **(storage_options or {})) as f:
        frame = pd.read_csv(f, float_precision="round_trip")
    if tuple(frame.columns) != SCAN_COLUMNS:
        raise ValueError(f"{path} is not a sigma scan: columns {list(frame.columns)}")
    return frame
