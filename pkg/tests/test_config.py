from __future__ import annotations

import dask
import pytest

import hodge_sigma  # noqa: F401
from hodge_sigma.config import TOLERANCE_ENV_VAR, apply_environment


def test_defaults_loaded() -> None:
    assert dask.config.get("hodge-sigma.tolerance") == 1e-8
    assert dask.config.get("hodge-sigma.sigma.max-modulus") == 20
    assert dask.config.get("hodge-sigma.sigma.quasi-periodic") is False
    assert dask.config.get("hodge-sigma.generate.max-dim") == 20


def test_environment_override() -> None:
    with dask.config.set({"hodge-sigma.tolerance": 1e-8}):
        apply_environment({TOLERANCE_ENV_VAR: "1e-6"})
        assert dask.config.get("hodge-sigma.tolerance") == 1e-6
    assert dask.config.get("hodge-sigma.tolerance") == 1e-8


@pytest.mark.parametrize("environ", [{}, {TOLERANCE_ENV_VAR: ""}, {TOLERANCE_ENV_VAR: "  "}])
def test_environment_unset(environ) -> None:
    apply_environment(environ)
    assert dask.config.get("hodge-sigma.tolerance") == 1e-8


@pytest.mark.parametrize("value", ["abc", "0", "-1e-3", "nan", "inf"])
def test_environment_rejects(value: str) -> None:
    with pytest.raises(ValueError, match=TOLERANCE_ENV_VAR):
        apply_environment({TOLERANCE_ENV_VAR: value})

