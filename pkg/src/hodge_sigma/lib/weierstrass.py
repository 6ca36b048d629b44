"""Weierstrass sigma and zeta functions of the lattice Z(1-i) + Z(1+i).

Both functions are evaluated from the canonical product over the
lattice points in a disk ``|w| <= R``. The disk is symmetric under
``w -> -w`` so the factors of a pair ``(w, -w)`` combine into
``1 - z**2/w**2`` and the first order exponentials cancel. Points
outside the disk contribute ``exp(-sum_k z**k T_k(R) / k)`` where
``T_k(R)`` is the Eisenstein series of weight ``k`` restricted to
``|w| > R``. The lattice is invariant under multiplication by ``i`` so
only ``k = 0 mod 4`` survives, and the first few orders are summed in
closed form from the Eisenstein series of the square lattice.

"""

from __future__ import annotations

import cmath
import functools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import cachetools
import dask
import dask.config
import numpy as np

from hodge_sigma.lib.gaussian_lattice import (
    OMEGA1,
    OMEGA2,
    GaussianLike,
    LatticePoint,
    disk_arrays,
    estimated_count,
    nearest_lattice_point,
)
from hodge_sigma.lib.linalg import (
    as_square_matrix,
    mat_exp,
    spectral_radius_bound,
)
from hodge_sigma.utils import PoleError, ResourceLimitError, resolve_tolerance

log = logging.getLogger(__name__)

EPS = float(np.finfo(np.float64).eps)

# |z - w| below which zeta reports a pole
POLE_RADIUS = 1e-12

# quasi-periods from Legendre's relation and sigma(iz) = i sigma(z)
LEGENDRE_ETAS: tuple[complex, complex] = (math.pi / OMEGA1, math.pi / OMEGA2)

# lattice pairs multiplied per vectorized block
_BLOCK = 256

_plan_cache: cachetools.LRUCache = cachetools.LRUCache(maxsize=64)
_eisenstein_cache: cachetools.LRUCache = cachetools.LRUCache(maxsize=32)
_eta_cache: cachetools.LRUCache = cachetools.LRUCache(maxsize=16)


def _bernoulli(k: int) -> Fraction:
    a = [Fraction(0)] * (k + 1)
    for m in range(k + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0]


def _divisor_power_sum(n: int, power: int) -> int:
    return sum(d**power for d in range(1, n + 1) if n % d == 0)


def eisenstein(k: int) -> float:
    """Eisenstein series ``G_k = sum' w**-k`` of the lattice.

    For the square lattice ``Z[i]`` the series is
    ``2 zeta(k) E_k(i)`` with ``E_k`` the normalized Eisenstein series
    at ``tau = i`` (its q-expansion converges like ``exp(-2 pi n)``).
    The lattice here is ``(1+i) Z[i]`` and ``(1+i)**4 = -4``, so
    ``G_{4m} = (-1/4)**m G_{4m}(Z[i])``. Orders not divisible by 4
    vanish.

    Parameters
    ----------
    k : int
        Even weight, at least 4.

    Returns
    -------
    float
        ``G_k``, which is real for this lattice.

    Examples
    --------
    >>> round(eisenstein(4), 4)
    -0.7878

    """
    if k < 3 or k != int(k):
        raise ValueError(f"the Eisenstein series needs an integer weight >= 3, got {k}")
    k = int(k)
    if k % 4 != 0:
        return 0.0
    if k in _eisenstein_cache:
        return _eisenstein_cache[k]
    bk = _bernoulli(k)
    two_zeta = (-1) ** (k // 2 + 1) * float(bk) * (2 * math.pi) ** k / math.factorial(k)
    q = math.exp(-2 * math.pi)
    series = math.fsum(
        _divisor_power_sum(n, k - 1) * q**n for n in range(1, 31)
    )
    e_k = 1.0 - float(Fraction(2 * k) / bk) * series
    value = two_zeta * e_k / (-4.0) ** (k // 4)
    _eisenstein_cache[k] = value
    return value


def truncation_bound(
    tail_terms: int,
    modulus: float,
    radius: float,
    derivative: bool = False,
) -> float:
    """Bound on the log-error of the product truncated at `radius`.

    With no tail terms the bound is ``8|z|**3/R``. With ``M`` tail terms
    the leading omitted order is ``k = 4M + 4`` and the bound is
    ``8 pi/(15 (k-2)) (1 + 1/R)**2 |z|**k / R**(k-2)``, from counting at
    most ``pi (r+1)**2 / 2`` lattice points in a disk of radius ``r``.
    Both hold for ``R >= 2|z|``. The derivative variant bounds the
    error of zeta.

    """
    r = float(modulus)
    if r == 0:
        return 0.0
    if radius < 2 * r:
        return math.inf
    if tail_terms == 0:
        return 24 * r * r / radius if derivative else 8 * r**3 / radius
    k = 4 * tail_terms + 4
    c = 8 * math.pi / (15 * (k - 2))
    log_bound = (
        math.log(c)
        + 2 * math.log1p(1 / radius)
        + k * math.log(r)
        - (k - 2) * math.log(radius)
    )
    if derivative:
        log_bound += math.log(k / r)
    return math.exp(log_bound)


def _radius_for(
    tail_terms: int,
    r: float,
    budget: float,
    min_radius: float,
    derivative: bool,
) -> float:
    floor = max(2 * r, float(min_radius))
    if r == 0:
        return floor
    if tail_terms == 0:
        scale = 24 * r * r if derivative else 8 * r**3
        return max(floor, scale / budget)
    k = 4 * tail_terms + 4
    c = 8 * math.pi / (15 * (k - 2))
    log_c = math.log(c) + k * math.log(r) + (math.log(k / r) if derivative else 0.0)
    radius = max(floor, math.exp((log_c - math.log(budget)) / (k - 2)))
    while truncation_bound(tail_terms, r, radius, derivative) > budget:
        radius *= 1.05
    return radius


@dataclass(frozen=True, eq=False)
class TruncationPlan:
    """A symmetric truncation of the canonical product.

    Attributes
    ----------
    radius : float
        Lattice points with ``0 < |w| <= radius`` are multiplied out.
    pair_symmetric : bool
        Always True: with ``w`` the disk contains ``-w``.
    estimated_error : float
        Bound on the relative error (truncation plus rounding).
    tail_terms : int
        Number of tail orders summed in closed form.
    modulus : float
        Largest ``|z|`` the plan is valid for.
    points : numpy.ndarray
        One representative ``w`` of each pair ``(w, -w)``: the points
        with ``b > 0``, or ``b == 0`` and ``a > 0``.
    inv_squares : numpy.ndarray
        ``1/w**2`` of each representative, from exact integer parts.
    tail : numpy.ndarray
        Coefficient of ``z**(4m)`` in the tail exponent, ``m = 1..M``.
    c2 : complex
        ``sum 1/w**2`` over the representatives; zero on this lattice.

    """

    radius: float
    pair_symmetric: bool
    estimated_error: float
    tail_terms: int = 0
    modulus: float = 0.0
    points: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    inv_squares: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    tail: np.ndarray = field(default_factory=lambda: np.zeros(0))
    c2: complex = 0j

    def __post_init__(self) -> None:
        if not self.pair_symmetric:
            raise ValueError("truncations of the sigma product must be pair symmetric")
        for arr in (self.points, self.inv_squares, self.tail):
            arr.setflags(write=False)

    @property
    def npairs(self) -> int:
        return len(self.points)

    def tail_exponent(self, z2: Any) -> Any:
        """``c2 z**2 + sum_m tail[m] z**(4m)`` evaluated from ``z**2``."""
        z4 = z2 * z2
        acc = 0 * z4
        for coeff in self.tail[::-1]:
            acc = (acc + coeff) * z4
        return self.c2 * z2 + acc

    def tail_exponent_derivative(self, z: Any) -> Any:
        """Derivative in ``z`` of :meth:`tail_exponent`."""
        z2 = z * z
        z4 = z2 * z2
        acc = 0 * z4
        for m in range(len(self.tail), 0, -1):
            acc = acc * z4 + 4 * m * self.tail[m - 1]
        return 2 * self.c2 * z + acc * z2 * z


def _pair_arrays(radius: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a, b = disk_arrays(radius)
    keep = (b > 0) | ((b == 0) & (a > 0))
    a = a[keep].astype(np.float64)
    b = b[keep].astype(np.float64)
    norm = a * a + b * b
    inv = ((a * a - b * b) - 2j * a * b) / (norm * norm)
    return a + 1j * b, inv, norm


def truncation_plan(
    modulus: float,
    tol: float | None = None,
    *,
    tail_terms: int | None = None,
    derivative: bool = False,
) -> TruncationPlan:
    """Choose a truncation radius for ``|z| <= modulus``.

    Tail orders from ``tail_terms`` down to zero are tried in turn; the
    first whose truncation bound and rounding floor each fit in half of
    `tol` below the enumeration cap is returned.

    Parameters
    ----------
    modulus : float
        Bound on ``|z|``; rounded up to a multiple of 1/16 so nearby
        arguments share a plan.
    tol : float, optional
        Relative tolerance; defaults to ``hodge-sigma.sigma.tolerance``.
    tail_terms : int, optional
        Defaults to ``hodge-sigma.sigma.tail-terms``.
    derivative : bool
        Plan for zeta instead of sigma.

    Raises
    ------
    ResourceLimitError
        If no tail order reaches `tol` within
        ``hodge-sigma.lattice.max-points``.

    """
    r = math.ceil(float(modulus) * 16) / 16
    if not math.isfinite(r) or r < 0:
        raise ValueError(f"modulus must be finite and nonnegative, got {modulus!r}")
    tol = resolve_tolerance(tol, "hodge-sigma.sigma.tolerance")
    if tail_terms is None:
        tail_terms = int(dask.config.get("hodge-sigma.sigma.tail-terms"))
    min_radius = float(dask.config.get("hodge-sigma.sigma.min-radius"))
    cap = int(dask.config.get("hodge-sigma.lattice.max-points"))
    key = (r, tol, tail_terms, min_radius, cap, derivative)
    if key not in _plan_cache:
        _plan_cache[key] = _build_plan(r, tol, tail_terms, min_radius, cap, derivative)
    plan = _plan_cache[key]
    if plan is None:
        raise ResourceLimitError(
            f"sigma tolerance {tol:g} at |z| = {r:g} is unreachable within "
            f"hodge-sigma.lattice.max-points = {cap}"
        )
    return plan


def _build_plan(
    r: float,
    tol: float,
    tail_terms: int,
    min_radius: float,
    cap: int,
    derivative: bool,
) -> TruncationPlan | None:
    budget = tol / 2
    for m in range(tail_terms, -1, -1):
        radius = _radius_for(m, r, budget, min_radius, derivative)
        if estimated_count(radius) > cap:
            log.debug("tail order %d needs radius %g, above the point cap", m, radius)
            continue
        points, inv, norms = _pair_arrays(radius)
        tail = np.zeros(m)
        rounding = 4 * len(points) * max(1.0, r if derivative else 1.0)
        for j in range(1, m + 1):
            k = 4 * j
            g = eisenstein(k)
            partial = 2 * math.fsum((inv ** (2 * j)).real)
            tail[j - 1] = -(g - partial) / k
            weight = 2 * math.fsum(norms ** (-2 * j))
            if derivative:
                rounding += r ** (k - 1) * (abs(g) + weight)
            else:
                rounding += r**k / k * (abs(g) + weight)
        rounding *= EPS
        if rounding > budget:
            log.debug("tail order %d has rounding floor %g above %g", m, rounding, budget)
            continue
        c2 = complex(math.fsum(inv.real), math.fsum(inv.imag))
        error = truncation_bound(m, r, radius, derivative) + rounding
        plan = TruncationPlan(
            radius=radius,
            pair_symmetric=True,
            estimated_error=error,
            tail_terms=m,
            modulus=r,
            points=points,
            inv_squares=inv,
            tail=tail,
            c2=c2,
        )
        log.debug(
            "truncation plan for |z| <= %g: radius %g, %d pairs, %d tail terms, "
            "error bound %g",
            r,
            radius,
            len(points),
            m,
            error,
        )
        return plan
    return None


def _check_modulus(modulus: float) -> None:
    bound = float(dask.config.get("hodge-sigma.sigma.max-modulus"))
    if modulus > bound:
        raise ValueError(
            f"|z| = {modulus:g} exceeds hodge-sigma.sigma.max-modulus = {bound:g}"
        )


def evaluate_plan(plan: TruncationPlan, zs: Any) -> np.ndarray:
    """Truncated product of `plan` at every entry of `zs`, without range checks."""
    z = np.asarray(zs, dtype=np.complex128)
    return _product(plan, z.ravel()).reshape(z.shape)


def _product(plan: TruncationPlan, z: np.ndarray) -> np.ndarray:
    z2 = z * z
    acc = z.copy()
    w2 = plan.points * plan.points
    for start in range(0, plan.npairs, _BLOCK):
        stop = start + _BLOCK
        factors = (w2[start:stop, None] - z2[None, :]) * plan.inv_squares[start:stop, None]
        acc = acc * np.prod(factors, axis=0)
    return acc * np.exp(plan.tail_exponent(z2))


def _quasi_periodic(z: np.ndarray, tol: float) -> np.ndarray:
    eta1, eta2 = LEGENDRE_ETAS
    k1 = np.round((z.real - z.imag) / 2)
    k2 = np.round((z.real + z.imag) / 2)
    omega = (k1 + k2) + 1j * (k2 - k1)
    z0 = z - omega
    parity = (k1 + k2 + k1 * k2) % 2
    psi = np.where(parity == 0, 1.0, -1.0)
    eta = k1 * eta1 + k2 * eta2
    plan = truncation_plan(float(np.max(np.abs(z0), initial=0.0)), tol)
    return psi * np.exp(eta * (z0 + omega / 2)) * _product(plan, z0)


def _product_or_reduced(z: np.ndarray, modulus: float, tol: float) -> np.ndarray:
    try:
        plan = truncation_plan(modulus, tol)
    except ResourceLimitError:
        log.debug("no product plan for |z| <= %g at %g; reducing into the cell", modulus, tol)
        return _quasi_periodic(z, tol)
    return _product(plan, z)


def sigma_many(zs: Any, tol: float | None = None) -> np.ndarray:
    """Vectorized :func:`sigma` sharing one truncation plan.

    Parameters
    ----------
    zs : array_like
        Complex arguments of any shape.
    tol : float, optional
        Relative tolerance; defaults to ``hodge-sigma.sigma.tolerance``.

    Returns
    -------
    numpy.ndarray
        Complex array with the shape of `zs`.

    """
    z = np.asarray(zs, dtype=np.complex128)
    shape = z.shape
    z = z.ravel()
    if not np.all(np.isfinite(z)):
        raise ValueError("sigma arguments must be finite")
    tol = resolve_tolerance(tol, "hodge-sigma.sigma.tolerance")
    modulus = float(np.max(np.abs(z), initial=0.0))
    _check_modulus(modulus)
    if dask.config.get("hodge-sigma.sigma.quasi-periodic"):
        values = _quasi_periodic(z, tol)
    else:
        values = _product_or_reduced(z, modulus, tol)
    return values.reshape(shape)


def sigma(z: complex, tol: float | None = None) -> complex:
    """Weierstrass sigma function of the lattice.

    Parameters
    ----------
    z : complex
        Argument with ``|z|`` at most ``hodge-sigma.sigma.max-modulus``.
    tol : float, optional
        Relative tolerance; defaults to ``hodge-sigma.sigma.tolerance``.

    Returns
    -------
    complex
        ``sigma(z)`` within ``tol*|sigma(z)|``. Lattice points covered
        by the truncation give exactly zero, and ``sigma(-z)`` is
        exactly ``-sigma(z)``.

    Raises
    ------
    ResourceLimitError
        If `tol` is unreachable within the enumeration cap even after
        reducing `z` into the fundamental cell.

    Notes
    -----
    When no product plan for `|z|` fits under
    ``hodge-sigma.lattice.max-points`` the argument is reduced with
    the quasi-periodicity law, as in ``hodge-sigma.sigma.quasi-periodic``
    mode.

    Examples
    --------
    >>> sigma(1 + 1j)
    0j

    """
    return complex(sigma_many(np.array([complex(z)]), tol)[0])


def sigma_matrix(M: Any, tol: float | None = None) -> np.ndarray:
    """Sigma of a square matrix by the truncated product.

    Computes ``M prod (I - M**2/w**2) exp(c2 M**2) exp(tail(M))`` over
    the pairs of a plan for the spectral radius bound of `M`. Every
    factor is a power series in `M` so the order of the factors does
    not matter.

    Parameters
    ----------
    M : array_like
        Real or complex square matrix.
    tol : float, optional
        Relative tolerance; defaults to ``hodge-sigma.sigma.tolerance``.

    Returns
    -------
    numpy.ndarray
        Complex matrix of the shape of `M`.

    Raises
    ------
    DimensionMismatch
        If `M` is not square.
    NonFiniteMatrixError
        If `M` has non-finite entries.

    """
    A = as_square_matrix(M, "M").astype(np.complex128)
    tol = resolve_tolerance(tol, "hodge-sigma.sigma.tolerance")
    if dask.config.get("hodge-sigma.sigma.quasi-periodic"):
        log.warning("quasi-periodic reduction does not apply to matrices; using the product")
    n = A.shape[0]
    plan = truncation_plan(spectral_radius_bound(A), tol)
    identity = np.eye(n, dtype=np.complex128)
    A2 = A @ A
    result = A.copy()
    for inv in plan.inv_squares:
        result = result @ (identity - A2 * inv)
    result = result @ mat_exp(plan.c2 * A2, tol)
    if plan.tail_terms:
        A4 = A2 @ A2
        poly = np.zeros_like(A)
        for coeff in plan.tail[::-1]:
            poly = (poly + coeff * identity) @ A4
        result = result @ mat_exp(poly, tol)
    return result


def zeta(z: complex, tol: float | None = None) -> complex:
    """Weierstrass zeta function, the logarithmic derivative of sigma.

    ``1/z + sum [1/(z-w) + 1/w + z/w**2]`` over the truncated disk plus
    the closed form tail, within an absolute error of `tol`.

    Raises
    ------
    PoleError
        If `z` is within 1e-12 of a lattice point.

    """
    z = complex(z)
    tol = resolve_tolerance(tol, "hodge-sigma.sigma.tolerance")
    pole = complex(nearest_lattice_point(z))
    if abs(z - pole) <= POLE_RADIUS:
        raise PoleError(z, pole)
    _check_modulus(abs(z))
    try:
        plan = truncation_plan(abs(z), tol, derivative=True)
    except ResourceLimitError:
        if pole == 0:
            raise
        k1, k2 = LatticePoint.from_complex(pole).coordinates()
        eta1, eta2 = LEGENDRE_ETAS
        return zeta(z - pole, tol) + k1 * eta1 + k2 * eta2
    w2 = plan.points * plan.points
    terms = 2 * z / (z * z - w2)
    total = complex(math.fsum(terms.real), math.fsum(terms.imag))
    return 1 / z + total + complex(plan.tail_exponent_derivative(z))


def quasi_periods(tol: float | None = None) -> tuple[complex, complex]:
    """Quasi-periods ``eta_k = 2 zeta(omega_k / 2)`` of the generators.

    ``sigma(z + omega_k) = -exp(eta_k (z + omega_k/2)) sigma(z)``.

    """
    tol = resolve_tolerance(tol, "hodge-sigma.sigma.tolerance")
    if tol in _eta_cache:
        return _eta_cache[tol]
    etas = (2 * zeta(OMEGA1 / 2, tol), 2 * zeta(OMEGA2 / 2, tol))
    _eta_cache[tol] = etas
    return etas


def psi(w: GaussianLike) -> int:
    """Sign ``(-1)**(k1 + k2 + k1 k2)`` of the lattice point ``k1 w1 + k2 w2``."""
    k1, k2 = LatticePoint.from_complex(w).coordinates()
    return -1 if (k1 + k2 + k1 * k2) % 2 else 1


def sigma_derivative_at(w: GaussianLike, tol: float | None = None) -> complex:
    """``sigma'(w)`` at a lattice point `w`.

    The zero at `w` is simple: removing the vanishing factor of the
    pair ``(w, -w)`` leaves ``-2 prod (1 - w**2/v**2) exp(tail(w))``
    over the other pairs. Beyond the reach of the product the value
    comes from quasi-periodicity, ``psi(w) exp(eta_w w/2)``.

    """
    lam = LatticePoint.from_complex(w)
    if lam.norm == 0:
        return 1 + 0j
    tol = resolve_tolerance(tol, "hodge-sigma.sigma.tolerance")
    _check_modulus(abs(lam))
    rep = lam if (lam.b > 0 or (lam.b == 0 and lam.a > 0)) else -lam
    wc = complex(lam)
    try:
        plan = truncation_plan(abs(lam), tol)
    except ResourceLimitError:
        k1, k2 = lam.coordinates()
        eta1, eta2 = LEGENDRE_ETAS
        return complex(psi(lam) * cmath.exp((k1 * eta1 + k2 * eta2) * wc / 2))
    keep = plan.points != complex(rep)
    v2 = plan.points[keep] * plan.points[keep]
    factors = (v2 - wc * wc) * plan.inv_squares[keep]
    value = -2 * np.prod(factors) * np.exp(plan.tail_exponent(wc * wc))
    return complex(value)


def _abs_sigma_rows(
    xs: np.ndarray,
    ys: np.ndarray,
    plan: TruncationPlan | None,
    tol: float,
) -> np.ndarray:
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Z = (X + 1j * Y).ravel()
    values = _quasi_periodic(Z, tol) if plan is None else _product(plan, Z)
    return np.abs(values)


def sigma_grid(
    radius: float,
    grid: int,
    tol: float | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``|sigma|`` on an ``N x N`` grid over ``[-R, R]**2``.

    One truncation plan for ``|z| <= R sqrt(2)`` is shared by all
    points. Rows of ``hodge-sigma.scan.rows-per-task`` x values are
    evaluated per dask task with the ``hodge-sigma.scan.scheduler``
    scheduler.

    Returns
    -------
    tuple of numpy.ndarray
        Flat ``x``, ``y`` and ``|sigma(x + iy)|`` in row-major order,
        ``x`` outer and ``y`` inner.

    """
    radius = float(radius)
    grid = int(grid)
    if radius < 0 or not math.isfinite(radius):
        raise ValueError(f"scan radius must be finite and nonnegative, got {radius!r}")
    if grid < 1:
        raise ValueError(f"scan grid must be positive, got {grid}")
    tol = resolve_tolerance(tol, "hodge-sigma.sigma.tolerance")
    modulus = radius * math.sqrt(2)
    _check_modulus(modulus)
    plan = None
    if not dask.config.get("hodge-sigma.sigma.quasi-periodic"):
        try:
            plan = truncation_plan(modulus, tol)
        except ResourceLimitError:
            log.debug("no product plan for |z| <= %g at %g; reducing into the cell", modulus, tol)
    axis = np.linspace(-radius, radius, grid) if grid > 1 else np.zeros(1)
    chunk = max(1, int(dask.config.get("hodge-sigma.scan.rows-per-task")))
    rows = functools.partial(_abs_sigma_rows, plan=plan, tol=tol)
    tasks = [
        dask.delayed(rows)(axis[start : start + chunk], axis)
        for start in range(0, grid, chunk)
    ]
    scheduler = dask.config.get("hodge-sigma.scan.scheduler")
    parts: Sequence[np.ndarray] = dask.compute(*tasks, scheduler=scheduler)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    return X.ravel(), Y.ravel(), np.concatenate(parts)
