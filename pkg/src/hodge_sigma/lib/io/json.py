"""JSON files of matrices, operators, Hodge types and reports.

Floats are written with 17 significant digits (``format(x, ".17g")``)
so every double survives a round trip; ``-0.0`` is written as ``0``.
All file access goes through ``fsspec``, so any URL it understands
works as a path.

"""

from __future__ import annotations

import json
import logging
import math
import numbers
import os
from collections.abc import Mapping
from typing import Any, NamedTuple, Optional

import fsspec
import numpy as np

from hodge_sigma.lib.hodge_ops import HodgeType, OperatorTriple, Summand
from hodge_sigma.utils import MatrixFileError

log = logging.getLogger(__name__)

SCHEMA_DIR = os.path.join(os.path.dirname(__file__), "schemas")

MATRIX_KEYS = frozenset({"n", "entries"})
OPERATOR_KEYS = frozenset({"E", "T", "S", "type"})
SUMMAND_KEYS = frozenset({"p", "q", "mult"})


def format_float(x: float) -> str:
    """17 significant digits; ``-0.0`` becomes ``0``.

    Examples
    --------
    >>> format_float(0.5), format_float(-0.0), format_float(2.0)
    ('0.5', '0', '2')

    """
    if not math.isfinite(x):
        raise ValueError(f"JSON output cannot hold the non-finite number {x!r}")
    if x == 0:
        return "0"
    return format(x, ".17g")


def _encode(value: Any, indent: int | None, level: int) -> str:
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return format_float(float(value))
    if isinstance(value, numbers.Complex):
        return _encode({"re": value.real, "im": value.imag}, indent, level)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, np.ndarray):
        return _encode(value.tolist(), indent, level)
    if isinstance(value, Mapping):
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in value.items()]
        return _join(items, "{", "}", indent, level)
    if isinstance(value, (list, tuple)):
        flat = all(isinstance(v, (numbers.Number, type(None))) for v in value)
        items = [_encode(v, indent, level + 1) for v in value]
        return _join(items, "[", "]", None if flat else indent, level)
    raise TypeError(f"cannot encode {type(value).__name__} as JSON")


def _join(items: list[str], open_: str, close: str, indent: int | None, level: int) -> str:
    if not items:
        return open_ + close
    if indent is None:
        return open_ + ", ".join(items) + close
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    return open_ + "\n" + ",\n".join(pad + i for i in items) + "\n" + end + close


def dumps(value: Any, indent: int | None = 2) -> str:
    """Serialize plain data, numpy arrays and complex numbers to JSON.

    Rows of numbers stay on one line so matrices read as grids.
    Complex numbers become ``{"re": ..., "im": ...}``.

    """
    return _encode(value, indent, 0)


def write_json(value: Any, path: str, storage_options: dict | None = None) -> None:
    with fsspec.open(path, "w", **(storage_options or {})) as f:
        f.write(dumps(value) + "\n")
    log.debug("wrote %s", path)


def read_json(path: str, storage_options: dict | None = None) -> Any:
    """Load a JSON document.

    Raises
    ------
    MatrixFileError
        If the file is missing or is not valid JSON.

    """
    try:
        with fsspec.open(path, "r", **(storage_options or {})) as f:
            return json.load(f)
    except FileNotFoundError as err:
        raise MatrixFileError(f"no such file: {path}") from err
    except json.JSONDecodeError as err:
        raise MatrixFileError(f"{path} is not valid JSON: {err}") from err


def load_schema(name: str) -> dict:
    """A JSON schema shipped with the package, e.g. ``"report"``."""
    with open(os.path.join(SCHEMA_DIR, f"{name}.schema.json")) as f:
        return json.load(f)


def matrix_to_dict(M: Any) -> dict[str, Any]:
    A = np.asarray(M, dtype=np.float64)
    return {"n": int(A.shape[0]), "entries": A.tolist()}


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise MatrixFileError(f"{where} must be a number, got {value!r}")
    x = float(value)
    if not math.isfinite(x):
        raise MatrixFileError(f"{where} must be finite, got {value!r}")
    return x


def matrix_from_dict(obj: Any, name: str = "matrix") -> np.ndarray:
    """Validate ``{"n": n, "entries": [[...], ...]}`` into an array.

    Raises
    ------
    MatrixFileError
        On unknown keys, a wrong shape or non-finite entries.

    """
    if not isinstance(obj, Mapping):
        raise MatrixFileError(f"{name} must be an object with keys n and entries")
    keys = set(obj)
    if keys != MATRIX_KEYS:
        extra = sorted(keys - MATRIX_KEYS)
        missing = sorted(MATRIX_KEYS - keys)
        raise MatrixFileError(f"{name}: unknown keys {extra}, missing keys {missing}")
    n = obj["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise MatrixFileError(f"{name}.n must be a positive integer, got {n!r}")
    rows = obj["entries"]
    if not isinstance(rows, list) or len(rows) != n:
        raise MatrixFileError(f"{name}.entries must hold {n} rows")
    out = np.empty((n, n))
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise MatrixFileError(f"{name}.entries[{i}] must hold {n} numbers")
        for j, value in enumerate(row):
            out[i, j] = _number(value, f"{name}.entries[{i}][{j}]")
    return out


def hodge_type_from_list(obj: Any) -> HodgeType:
    if not isinstance(obj, list) or not obj:
        raise MatrixFileError("a Hodge type must be a nonempty list of {p, q, mult}")
    summands = []
    for i, entry in enumerate(obj):
        if not isinstance(entry, Mapping) or set(entry) != SUMMAND_KEYS:
            raise MatrixFileError(f"type[{i}] must have exactly the keys p, q, mult")
        values = []
        for key in ("p", "q", "mult"):
            v = entry[key]
            if isinstance(v, bool) or not isinstance(v, int):
                raise MatrixFileError(f"type[{i}].{key} must be an integer, got {v!r}")
            values.append(v)
        if values[2] < 1:
            raise MatrixFileError(f"type[{i}].mult must be positive")
        summands.append(Summand(*values))
    return HodgeType(tuple(summands))


class OperatorFile(NamedTuple):
    """Contents of an operator file; absent entries are None."""

    E: Optional[np.ndarray] = None
    T: Optional[np.ndarray] = None
    S: Optional[np.ndarray] = None
    hodge_type: Optional[HodgeType] = None

    def triple(self) -> OperatorTriple:
        """The operators as a triple, filling ``S = E + T`` when absent.

        Raises
        ------
        MatrixFileError
            If ``E`` or ``T`` is missing.

        """
        if self.E is None or self.T is None:
            raise MatrixFileError("this command needs both E and T in the operator file")
        S = self.E + self.T if self.S is None else self.S
        return OperatorTriple(self.E, self.T, S)

    def require_S(self) -> np.ndarray:
        if self.S is not None:
            return self.S
        if self.E is not None and self.T is not None:
            return self.E + self.T
        raise MatrixFileError("this command needs S, or both E and T, in the operator file")


def operator_from_dict(obj: Any) -> OperatorFile:
    """Validate an operator document.

    A bare matrix document ``{"n", "entries"}`` is read as ``S``.

    """
    if isinstance(obj, Mapping) and set(obj) == MATRIX_KEYS:
        return OperatorFile(S=matrix_from_dict(obj, "S"))
    if not isinstance(obj, Mapping):
        raise MatrixFileError("an operator file must be a JSON object")
    unknown = sorted(set(obj) - OPERATOR_KEYS)
    if unknown:
        raise MatrixFileError(f"unknown keys in operator file: {unknown}")
    if not set(obj) & {"E", "T", "S"}:
        raise MatrixFileError("an operator file needs at least one of E, T, S")
    mats = {k: matrix_from_dict(obj[k], k) for k in ("E", "T", "S") if k in obj}
    shapes = {m.shape for m in mats.values()}
    if len(shapes) > 1:
        raise MatrixFileError(f"operator shapes differ: { {k: m.shape for k, m in mats.items()} }")
    ht = hodge_type_from_list(obj["type"]) if "type" in obj else None
    return OperatorFile(hodge_type=ht, **mats)


def operator_to_dict(
    E: Any | None = None,
    T: Any | None = None,
    S: Any | None = None,
    hodge_type: HodgeType | None = None,
) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, M in (("E", E), ("T", T), ("S", S)):
        if M is not None:
            out[key] = matrix_to_dict(M)
    if hodge_type is not None:
        out["type"] = hodge_type.to_list()
    return out


def load_operator(path: str, storage_options: dict | None = None) -> OperatorFile:
    return operator_from_dict(read_json(path, storage_options))
