from __future__ import annotations

import dask
import numpy as np
import pytest

import hodge_sigma.lib.testutils as hstu
from hodge_sigma.lib.instance_gen import Instance
from hodge_sigma.lib.io.json import matrix_to_dict, write_json


@pytest.fixture(autouse=True)
def sync_scheduler():
    with dask.config.set({"hodge-sigma.scan.scheduler": hstu.DEFAULT_SCHEDULER}):
        yield


@pytest.fixture(scope="session")
def battery() -> list[Instance]:
    return hstu.instance_battery(100)


@pytest.fixture(scope="session")
def small_battery(battery: list[Instance]) -> list[Instance]:
    return battery[:20]


@pytest.fixture(scope="session")
def pure_battery() -> list[Instance]:
    return hstu.pure_battery(20)


@pytest.fixture(scope="session")
def rotation_S() -> np.ndarray:
    return np.array([[1.0, -1.0], [1.0, 1.0]])


@pytest.fixture(scope="session")
def parity_S() -> np.ndarray:
    return np.array([[1.0]])


@pytest.fixture(scope="session")
def defective_S() -> np.ndarray:
    return np.array([[0.0, 1.0], [0.0, 0.0]])


@pytest.fixture(scope="session")
def rotation_file(tmp_path_factory: pytest.TempPathFactory, rotation_S: np.ndarray) -> str:
    fname = tmp_path_factory.mktemp("data") / "rotation.json"
    write_json(matrix_to_dict(rotation_S), str(fname))
    return str(fname)


@pytest.fixture(scope="session")
def parity_file(tmp_path_factory: pytest.TempPathFactory, parity_S: np.ndarray) -> str:
    fname = tmp_path_factory.mktemp("data") / "parity.json"
    write_json({"S": matrix_to_dict(parity_S)}, str(fname))
    return str(fname)


@pytest.fixture(scope="session")
def defective_file(tmp_path_factory: pytest.TempPathFactory, defective_S: np.ndarray) -> str:
    fname = tmp_path_factory.mktemp("data") / "defective.json"
    write_json({"S": matrix_to_dict(defective_S)}, str(fname))
    return str(fname)
