from __future__ import annotations

import cmath
import math

import dask
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import hodge_sigma.lib.testutils as hstu
from hodge_sigma.lib.gaussian_lattice import (
    OMEGA1,
    OMEGA2,
    LatticePoint,
    disk_arrays,
    enumerate,
)
from hodge_sigma.lib.weierstrass import (
    eisenstein,
    evaluate_plan,
    psi,
    quasi_periods,
    sigma,
    sigma_derivative_at,
    sigma_grid,
    sigma_many,
    sigma_matrix,
    truncation_bound,
    truncation_plan,
    zeta,
)
from hodge_sigma.utils import PoleError, ResourceLimitError

# 2 exp(pi/4) Gamma(3/4)**2 / pi**(3/2)
SIGMA_AT_ONE = 1.182951300500129


def _odd_parity_points(radius: float) -> list[complex]:
    m = math.floor(radius)
    return [
        complex(a, b)
        for a in range(-m, m + 1)
        for b in range(-m, m + 1)
        if (a - b) % 2 and a * a + b * b <= radius * radius
    ]


def test_sigma_vanishes_exactly_on_lattice() -> None:
    points = enumerate(5)
    assert len(points) == 37
    for w in points:
        assert sigma(complex(w), 1e-10) == 0


def test_sigma_nonzero_off_lattice() -> None:
    zs = _odd_parity_points(5)
    assert len(zs) == 44
    for z in zs:
        assert abs(sigma(z, 1e-10)) > 1e-3


def test_sigma_odd() -> None:
    rng = np.random.default_rng(11)
    r = 3 * np.sqrt(rng.random(100))
    theta = 2 * np.pi * rng.random(100)
    for z in r * np.exp(1j * theta):
        assert abs(sigma(-z) + sigma(z)) <= 1e-9


def test_sigma_odd_bitwise() -> None:
    zs = np.array([0.3 + 0.1j, 2.5 - 1.7j, -1.1 + 2.9j])
    np.testing.assert_array_equal(sigma_many(-zs), -sigma_many(zs))


def test_sigma_normalization() -> None:
    assert abs(sigma(1e-4) / 1e-4 - 1) <= 1e-6
    assert sigma(0) == 0


def test_sigma_conjugate_symmetry() -> None:
    z = 1.3 + 0.4j
    assert sigma(z.conjugate()) == pytest.approx(sigma(z).conjugate(), rel=1e-11)


def test_sigma_rotation() -> None:
    z = 0.9 - 0.6j
    assert sigma(1j * z) == pytest.approx(1j * sigma(z), rel=1e-9)


def test_sigma_many_matches_scalar() -> None:
    zs = np.array([[0.5 + 0.5j, -2.0 + 0.1j], [3.3j, 4.0 + 1.0j]])
    values = sigma_many(zs)
    assert values.shape == zs.shape
    for z, v in zip(zs.ravel(), values.ravel()):
        assert v == pytest.approx(sigma(z), rel=1e-9)


def test_sigma_golden_value() -> None:
    closed_form = 2 * math.exp(math.pi / 4) * math.gamma(0.75) ** 2 / math.pi**1.5
    assert SIGMA_AT_ONE == pytest.approx(closed_form, rel=1e-14)
    value = sigma(1)
    assert abs(value) > 0.1
    assert value == pytest.approx(SIGMA_AT_ONE, rel=1e-8)
    with dask.config.set({"hodge-sigma.sigma.min-radius": 200}):
        assert truncation_plan(1, 1e-10).radius >= 200
        assert sigma(1, 1e-10) == pytest.approx(SIGMA_AT_ONE, rel=1e-8)


@pytest.mark.parametrize("z", [0.3 + 0.2j, 1.0, 2.5 + 1.1j, -3.2 + 0.7j, 4.4 - 2.9j])
def test_sigma_matches_theta_series(z: complex) -> None:
    assert sigma(z) == pytest.approx(hstu.theta_sigma(z), rel=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize("fraction", [0.2, 0.4, 0.6, 0.8, 1.0])
def test_sigma_default_settings_up_to_max_modulus(fraction: float) -> None:
    bound = float(dask.config.get("hodge-sigma.sigma.max-modulus"))
    z = fraction * (bound - 0.01) * cmath.exp(0.3j)
    assert sigma(z) == pytest.approx(hstu.theta_sigma(z), rel=1e-8)
    assert sigma(-z) == -sigma(z)


def test_sigma_reduces_into_cell_beyond_product_reach() -> None:
    z = 10 + 0.3j
    with dask.config.set({"hodge-sigma.lattice.max-points": 2000}):
        with pytest.raises(ResourceLimitError):
            truncation_plan(abs(z), 1e-10)
        value = sigma(z, 1e-10)
        lattice_value = sigma(10 + 2j, 1e-10)
    assert value == pytest.approx(hstu.theta_sigma(z), rel=1e-8)
    assert lattice_value == 0


def test_zeta_beyond_product_reach() -> None:
    z = 9.6 + 3.3j
    h = 1e-6
    with dask.config.set({"hodge-sigma.lattice.max-points": 2000}):
        with pytest.raises(ResourceLimitError):
            truncation_plan(abs(z), 1e-10, derivative=True)
        value = zeta(z, 1e-10)
    quotient = (hstu.theta_sigma(z + h) - hstu.theta_sigma(z - h)) / (2 * h * hstu.theta_sigma(z))
    assert value == pytest.approx(quotient, rel=1e-6)


def test_sigma_derivative_beyond_product_reach() -> None:
    lam = LatticePoint(11, 5)
    with dask.config.set({"hodge-sigma.lattice.max-points": 2000}):
        value = sigma_derivative_at(lam, 1e-10)
    expected = psi(lam) * math.exp(math.pi * lam.norm / 4)
    assert value == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("z", [0.4 + 0.3j, 2.2 - 0.9j, -3.7 + 1.4j, 4.6 + 0.2j])
def test_sigma_tolerance_levels_agree(z: complex) -> None:
    coarse = sigma(z, 1e-6)
    fine = sigma(z, 1e-10)
    assert abs(coarse - fine) <= 2e-6 * abs(fine)


@pytest.mark.parametrize("z", [0.25 + 0.5j, -0.4 + 0.1j, 0.6 - 0.3j])
def test_quasi_periodicity(z: complex) -> None:
    eta1, eta2 = quasi_periods()
    for omega, eta in ((OMEGA1, eta1), (OMEGA2, eta2)):
        lhs = sigma(z + omega)
        rhs = -cmath.exp(eta * (z + omega / 2)) * sigma(z)
        assert lhs == pytest.approx(rhs, rel=1e-8)


def test_quasi_periods_closed_form() -> None:
    eta1, eta2 = quasi_periods(1e-12)
    assert eta1 == pytest.approx(math.pi / OMEGA1, rel=1e-9)
    assert eta2 == pytest.approx(math.pi / OMEGA2, rel=1e-9)
    assert eta1 * OMEGA2 - eta2 * OMEGA1 == pytest.approx(2j * math.pi, rel=1e-9)


@pytest.mark.parametrize("z", [0.3 + 0.2j, 2.7 - 1.6j, -4.1 + 3.2j, 5.5j])
def test_quasi_periodic_mode_matches_product(z: complex) -> None:
    direct = sigma(z, 1e-10)
    with dask.config.set({"hodge-sigma.sigma.quasi-periodic": True}):
        reduced = sigma(z, 1e-10)
    assert reduced == pytest.approx(direct, rel=1e-8)


def test_quasi_periodic_mode_zeros() -> None:
    with dask.config.set({"hodge-sigma.sigma.quasi-periodic": True}):
        for w in enumerate(4):
            assert sigma(complex(w)) == 0


@pytest.mark.parametrize("w", [(1, 1), (1, -1), (2, 0), (0, -2), (3, 1), (-2, 4)])
def test_sigma_derivative_at_lattice_points(w: tuple[int, int]) -> None:
    lam = LatticePoint(*w)
    expected = psi(lam) * math.exp(math.pi * lam.norm / 4)
    assert sigma_derivative_at(lam) == pytest.approx(expected, rel=1e-8)


def test_sigma_derivative_matches_difference_quotient() -> None:
    h = 1e-5
    w = 1 + 1j
    quotient = (sigma(w + h) - sigma(w - h)) / (2 * h)
    assert sigma_derivative_at(w) == pytest.approx(quotient, rel=1e-6)
    assert sigma_derivative_at(0) == 1


def test_psi() -> None:
    assert psi(0) == 1
    assert psi(OMEGA1) == -1
    assert psi(OMEGA2) == -1
    assert psi(2) == -1
    assert psi(2 * OMEGA1) == 1


def test_eisenstein_closed_form() -> None:
    g4 = math.gamma(0.25) ** 8 / (960 * math.pi**2) / -4
    assert eisenstein(4) == pytest.approx(g4, rel=1e-12)


@pytest.mark.parametrize("k", [5, 6, 7, 10, 14])
def test_eisenstein_vanishes_off_multiples_of_four(k: int) -> None:
    assert eisenstein(k) == 0


@pytest.mark.parametrize("k", [8, 12])
def test_eisenstein_direct_sum(k: int) -> None:
    a, b = disk_arrays(40)
    w = (a[1:] + 1j * b[1:]).astype(np.complex128)
    direct = complex(np.sum(w ** (-k)))
    assert direct.real == pytest.approx(eisenstein(k), rel=1e-9)
    assert abs(direct.imag) < 1e-12


def test_eisenstein_bad_weight() -> None:
    with pytest.raises(ValueError):
        eisenstein(2)


def test_truncation_plan_properties() -> None:
    plan = truncation_plan(5, 1e-10)
    assert plan.pair_symmetric
    assert plan.radius >= 10
    assert plan.estimated_error <= 1e-10
    assert plan.c2 == 0
    assert plan.npairs == (len(enumerate(plan.radius)) - 1) // 2
    assert truncation_plan(5, 1e-10) is plan


def test_truncation_plan_no_tail() -> None:
    plan = truncation_plan(1, 1e-1, tail_terms=0)
    assert plan.tail_terms == 0
    assert plan.radius >= 8 / 0.05
    with pytest.raises(ResourceLimitError):
        truncation_plan(3, 1e-12, tail_terms=0)


def test_truncation_bound() -> None:
    assert truncation_bound(0, 0, 4) == 0
    assert truncation_bound(2, 3, 5) == math.inf
    assert truncation_bound(0, 1, 100) == pytest.approx(0.08)
    assert truncation_bound(2, 1, 100) < truncation_bound(1, 1, 100)


def test_plan_respects_min_radius() -> None:
    with dask.config.set({"hodge-sigma.sigma.min-radius": 9}):
        assert truncation_plan(0.5, 1e-4).radius >= 9


def test_evaluate_plan_agrees_with_sigma() -> None:
    plan = truncation_plan(2, 1e-10)
    zs = np.array([1.5 + 0.5j, -0.2j])
    np.testing.assert_allclose(evaluate_plan(plan, zs), sigma_many(zs, 1e-10), rtol=1e-9)
    with dask.config.set({"hodge-sigma.sigma.max-modulus": 1}):
        evaluate_plan(plan, [1.9j])


def test_sigma_range_checks() -> None:
    with pytest.raises(ValueError):
        sigma(25)
    with pytest.raises(ValueError):
        sigma(complex(float("nan"), 0))
    with pytest.raises(ValueError):
        sigma(1, tol=0)


def test_sigma_unreachable_tolerance() -> None:
    with dask.config.set({"hodge-sigma.lattice.max-points": 30}):
        with pytest.raises(ResourceLimitError):
            sigma(4.5 + 0.5j, 1e-12)


def test_zeta_is_log_derivative() -> None:
    z = 0.7 + 0.3j
    h = 1e-5
    quotient = (sigma(z + h) - sigma(z - h)) / (2 * h * sigma(z))
    assert zeta(z) == pytest.approx(quotient, rel=1e-6)
    assert zeta(-z) == pytest.approx(-zeta(z), rel=1e-12)


def test_zeta_poles() -> None:
    with pytest.raises(PoleError):
        zeta(0)
    with pytest.raises(PoleError):
        zeta(1 + 1j)
    with pytest.raises(ZeroDivisionError):
        zeta(-2)


def test_sigma_matrix_scalar() -> None:
    z = 1.7 - 0.8j
    assert sigma_matrix([[z]])[0, 0] == pytest.approx(sigma(z), rel=1e-8)


def test_sigma_matrix_nilpotent_exact() -> None:
    N = np.array([[0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_array_equal(sigma_matrix(N), N)


def test_sigma_matrix_zero_on_lattice_diagonal() -> None:
    D = np.diag([2.0, 0.0, -4.0])
    assert np.all(sigma_matrix(D) == 0)


def test_sigma_matrix_block() -> None:
    z = 0.6 + 1.1j
    a, b = z.real, z.imag
    M = np.array([[a, b], [-b, a]])
    value = sigma(z)
    expected = np.array([[value.real, value.imag], [-value.imag, value.real]])
    np.testing.assert_allclose(sigma_matrix(M, 1e-10), expected, rtol=1e-8, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(
    x=st.floats(min_value=-3, max_value=3),
    y=st.floats(min_value=-3, max_value=3),
)
def test_sigma_many_odd_property(x: float, y: float) -> None:
    z = np.array([complex(x, y)])
    np.testing.assert_array_equal(sigma_many(-z), -sigma_many(z))


def test_sigma_grid() -> None:
    x, y, values = sigma_grid(2, 5)
    assert len(x) == len(y) == len(values) == 25
    assert list(x[:5]) == [-2.0] * 5
    assert list(y[:5]) == [-2.0, -1.0, 0.0, 1.0, 2.0]
    # (-2, -2), (0, 0) and (2, 2) are lattice points
    assert values[0] == 0
    assert values[12] == 0
    assert values[24] == 0
    for xi, yi, v in zip(x, y, values):
        assert v == pytest.approx(abs(sigma(complex(xi, yi))), rel=1e-9, abs=1e-300)


@pytest.mark.slow
def test_sigma_grid_default_settings() -> None:
    x, y, values = sigma_grid(5, 4)
    for xi, yi, v in zip(x, y, values):
        if abs(xi) == abs(yi) == 5:
            assert v == 0
        else:
            assert v == pytest.approx(abs(hstu.theta_sigma(complex(xi, yi))), rel=1e-8)


def test_sigma_grid_chunking_is_invisible() -> None:
    with dask.config.set({"hodge-sigma.scan.rows-per-task": 1}):
        one = sigma_grid(1.5, 7)
    with dask.config.set({"hodge-sigma.scan.rows-per-task": 4}):
        four = sigma_grid(1.5, 7)
    for a, b in zip(one, four):
        np.testing.assert_array_equal(a, b)


def test_sigma_grid_rejects_bad_input() -> None:
    with pytest.raises(ValueError):
        sigma_grid(-1, 4)
    with pytest.raises(ValueError):
        sigma_grid(1, 0)
