from __future__ import annotations

import math
import os
from collections.abc import Mapping

import dask.config
import yaml

config = dask.config.config

fn = os.path.join(os.path.dirname(__file__), "hodge-sigma.yaml")
with open(fn) as f:
    defaults = yaml.safe_load(f)

dask.config.update_defaults(defaults)

TOLERANCE_ENV_VAR = "HODGE_SIGMA_TOL"


def apply_environment(environ: Mapping[str, str] | None = None) -> None:
    """Apply the ``HODGE_SIGMA_TOL`` override to the dask config.

    Parameters
    ----------
    environ : Mapping[str, str], optional
        Environment to read; defaults to ``os.environ``.

    Raises
    ------
    ValueError
        If the variable is set but is not a positive finite number.

    """
    environ = os.environ if environ is None else environ
    value = environ.get(TOLERANCE_ENV_VAR)
    if value is None or value.strip() == "":
        return
    try:
        tol = float(value)
    except ValueError as err:
        raise ValueError(f"{TOLERANCE_ENV_VAR}={value!r} is not a number") from err
    if not (math.isfinite(tol) and tol > 0):
        raise ValueError(f"{TOLERANCE_ENV_VAR}={value!r} must be positive and finite")
    dask.config.set({"hodge-sigma.tolerance": tol})


apply_environment()
