from __future__ import annotations

import math

import dask
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import hodge_sigma.lib.testutils as hstu
from hodge_sigma.lib.gaussian_lattice import (
    LatticePoint,
    disk_arrays,
    enumerate,
    estimated_count,
    gaussian_parts,
    generators,
    is_lattice_point,
    lambda_of_pq,
    nearest_lattice_point,
    pq_of_lambda,
)
from hodge_sigma.utils import NonIntegerInputError, NotALatticePoint, ResourceLimitError

ints = st.integers(min_value=-10**6, max_value=10**6)


def test_generators() -> None:
    w1, w2 = generators()
    assert complex(w1) == 1 - 1j
    assert complex(w2) == 1 + 1j
    assert w1.coordinates() == (1, 0)
    assert w2.coordinates() == (0, 1)


def test_is_lattice_point() -> None:
    assert is_lattice_point(0)
    assert is_lattice_point(1 + 1j)
    assert is_lattice_point((3, -5))
    assert is_lattice_point(2)
    assert not is_lattice_point(1)
    assert not is_lattice_point(1j)
    assert not is_lattice_point(2 + 1j)


@pytest.mark.parametrize("bad", [0.5, 1 + 0.5j, float("nan"), "x", complex(float("inf"), 0)])
def test_non_integer_input(bad) -> None:
    with pytest.raises(NonIntegerInputError):
        is_lattice_point(bad)


def test_lattice_point_validation() -> None:
    with pytest.raises(NotALatticePoint):
        LatticePoint(1, 0)
    with pytest.raises(NonIntegerInputError):
        LatticePoint(1.5, 0.5)  # type: ignore[arg-type]
    with pytest.raises(NonIntegerInputError):
        LatticePoint(True, True)  # type: ignore[arg-type]
    assert LatticePoint(np.int64(3), np.int64(1)) == LatticePoint(3, 1)


@pytest.mark.parametrize(
    "a,b,text",
    [(0, 0, "0"), (1, 1, "1+i"), (-1, -1, "-1-i"), (0, 2, "2i"), (3, -1, "3-i"), (2, 0, "2")],
)
def test_str(a: int, b: int, text: str) -> None:
    assert str(LatticePoint(a, b)) == text


@given(p=ints, q=ints)
def test_pq_round_trip(p: int, q: int) -> None:
    lam = lambda_of_pq(p, q)
    assert is_lattice_point(complex(lam))
    assert pq_of_lambda(lam) == (p, q)
    assert lam.conj() == lambda_of_pq(q, p)


@given(k1=ints, k2=ints)
def test_coordinates_round_trip(k1: int, k2: int) -> None:
    w = LatticePoint.from_coordinates(k1, k2)
    assert w.coordinates() == (k1, k2)
    assert (w.a - w.b) % 2 == 0


def test_pq_of_lambda_examples() -> None:
    assert pq_of_lambda(1 + 1j) == (1, 0)
    assert pq_of_lambda(1 - 1j) == (0, 1)
    assert pq_of_lambda(2) == (1, 1)
    with pytest.raises(NotALatticePoint):
        pq_of_lambda(1)


def test_gaussian_parts() -> None:
    assert gaussian_parts(3 - 4j) == (3, -4)
    assert gaussian_parts((2, 0)) == (2, 0)
    assert gaussian_parts(np.complex128(1 + 1j)) == (1, 1)


def test_enumerate_small() -> None:
    assert [str(w) for w in enumerate(0)] == ["0"]
    assert [str(w) for w in enumerate(1.5)] == ["0", "1+i", "-1+i", "-1-i", "1-i"]
    assert [str(w) for w in enumerate(2)][5:] == ["2", "2i", "-2", "-2i"]


def test_enumerate_count_at_five() -> None:
    assert len(enumerate(5)) == 37


@pytest.mark.parametrize("radius", [0, 0.9, 1, math.sqrt(2), 3.3, 5, 7.5, 12])
def test_enumerate_matches_brute_force(radius: float) -> None:
    got = [(w.a, w.b) for w in enumerate(radius)]
    assert got == hstu.brute_force_lattice(radius)
    assert len(got) <= estimated_count(radius)


def test_enumerate_sorted_by_norm_then_argument() -> None:
    points = enumerate(9)
    keys = [w.sort_key() for w in points]
    assert keys == sorted(keys)
    assert len(set(points)) == len(points)


def test_disk_arrays() -> None:
    a, b = disk_arrays(4)
    points = enumerate(4)
    assert len(a) == len(points)
    assert [(int(x), int(y)) for x, y in zip(a, b)] == [(w.a, w.b) for w in points]


def test_enumerate_negative_radius() -> None:
    with pytest.raises(ValueError):
        enumerate(-1)


def test_enumerate_cap() -> None:
    with dask.config.set({"hodge-sigma.lattice.max-points": 100}):
        enumerate(5)
        with pytest.raises(ResourceLimitError):
            enumerate(10)
    with pytest.raises(ResourceLimitError):
        enumerate(float("inf"))


@given(
    x=st.floats(min_value=-50, max_value=50),
    y=st.floats(min_value=-50, max_value=50),
)
def test_nearest_lattice_point(x: float, y: float) -> None:
    z = complex(x, y)
    w = nearest_lattice_point(z)
    best = abs(z - complex(w))
    assert best <= 1 + 1e-12
    for dk1, dk2 in [(1, 0), (-1, 0), (0, 1), (0, -1)]:
        k1, k2 = w.coordinates()
        other = LatticePoint.from_coordinates(k1 + dk1, k2 + dk2)
        assert best <= abs(z - complex(other)) + 1e-12


def test_argument_range() -> None:
    assert LatticePoint(0, 0).argument == 0
    assert LatticePoint(1, -1).argument == pytest.approx(7 * math.pi / 4)
    assert LatticePoint(-2, 0).argument == pytest.approx(math.pi)
