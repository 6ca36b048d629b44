from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Any

import numpy as np

from hodge_sigma.lib.hodge_ops import HodgeType, Summand, assemble
from hodge_sigma.lib.instance_gen import (
    GenConfig,
    Instance,
    random_instance,
    random_unimodular,
)
from hodge_sigma.lib.linalg import fro

DEFAULT_SCHEDULER: Any = "sync"

# stream of GenConfig.rng reserved for pure-weight test types
PURE_TYPE_STREAM = 2


def assert_close(a: Any, b: Any, rtol: float = 1e-10, atol: float = 0.0) -> None:
    np.testing.assert_allclose(np.asarray(a), np.asarray(b), rtol=rtol, atol=atol)


def assert_matrix_close(A: Any, B: Any, bound: float) -> None:
    """Frobenius distance of `A` and `B` at most `bound`."""
    A = np.asarray(A)
    B = np.asarray(B)
    assert A.shape == B.shape, (A.shape, B.shape)
    distance = fro(A - B)
    assert distance <= bound, f"||A - B|| = {distance:.3g} > {bound:.3g}"


def series_sin(M: Any, terms: int = 80) -> np.ndarray:
    """Taylor series of ``sin(M)``; only accurate for small ``||M||``."""
    A = np.asarray(M, dtype=np.float64)
    result = np.zeros_like(A)
    term = A.copy()
    for k in range(terms):
        result = result + term
        term = -term @ A @ A / ((2 * k + 2) * (2 * k + 3))
    return result


def series_sinh(M: Any, terms: int = 80) -> np.ndarray:
    """Taylor series of ``sinh(M)``; only accurate for small ``||M||``."""
    A = np.asarray(M, dtype=np.float64)
    result = np.zeros_like(A)
    term = A.copy()
    for k in range(terms):
        result = result + term
        term = term @ A @ A / ((2 * k + 2) * (2 * k + 3))
    return result


def theta_sigma(z: complex) -> complex:
    """Sigma from the Jacobi theta function ``theta_1`` at ``q = exp(-pi)``.

    With ``u = pi z / (1-i)``,
    ``sigma(z) = (1-i)/pi exp(i pi z**2 / 4) theta_1(u) / theta_1'(0)``
    and ``theta_1'(0) = theta_3**3 / sqrt(2)``,
    ``theta_3 = pi**(1/4) / Gamma(3/4)``. Each series term is formed as
    one exponential so large ``|Im u|`` neither overflows nor loses
    digits to cancellation.
    """
    z = complex(z)
    u = math.pi * z / (1 - 1j)
    theta3 = math.pi**0.25 / math.gamma(0.75)
    theta1 = 0j
    for n in range(int(abs(u.imag) / math.pi) + 12):
        decay = -math.pi * (n + 0.5) ** 2
        v = (2 * n + 1) * u
        term = (cmath.exp(decay + 1j * v) - cmath.exp(decay - 1j * v)) / 2j
        theta1 += term if n % 2 == 0 else -term
    theta1 *= 2
    prime = theta3**3 / math.sqrt(2)
    return (1 - 1j) / math.pi * cmath.exp(1j * math.pi * z * z / 4) * theta1 / prime


def brute_force_lattice(radius: float) -> list[tuple[int, int]]:
    """Lattice points ``(a, b)`` in the closed disk, by a double loop."""
    m = math.floor(radius)
    points = [
        (a, b)
        for a in range(-m, m + 1)
        for b in range(-m, m + 1)
        if (a - b) % 2 == 0 and a * a + b * b <= radius * radius
    ]
    return sorted(points, key=lambda ab: (ab[0] ** 2 + ab[1] ** 2, _angle(*ab)))


def _angle(a: int, b: int) -> float:
    theta = math.atan2(b, a)
    return theta + 2 * math.pi if theta < 0 else theta


def bareiss_det(M: Any) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    A = [[Fraction(int(round(x))) for x in row] for row in np.asarray(M).tolist()]
    n = len(A)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev
        prev = A[k][k]
    return sign * int(A[n - 1][n - 1]) if n else 1


def instance_battery(count: int, conjugate: bool = True, **overrides: Any) -> list[Instance]:
    """Instances for seeds ``0 .. count-1`` with the configured bounds."""
    return [
        random_instance(GenConfig.from_config(seed, **overrides), conjugate)
        for seed in range(count)
    ]


def random_pure_type(cfg: GenConfig, max_dim: int = 8) -> HodgeType:
    """Random Hodge type of a single weight with ``|p|, |q| <= cfg.max_abs_pq``."""
    rng = cfg.rng(PURE_TYPE_STREAM)
    m = max(1, cfg.max_abs_pq)
    weight = int(rng.integers(-m, m + 1))
    tops = [p for p in range(-m, m + 1) if 2 * p > weight and abs(weight - p) <= m]
    remaining = int(rng.integers(2, max_dim + 1))
    summands = []
    while remaining > 0:
        if weight % 2 == 0 and (remaining == 1 or rng.integers(3) == 0):
            summands.append(Summand(weight // 2, weight // 2, 1))
            remaining -= 1
        elif remaining >= 2:
            p = tops[int(rng.integers(len(tops)))]
            summands.append(Summand(p, weight - p, 1))
            remaining -= 2
        else:
            break
    return HodgeType(tuple(summands))


def pure_battery(count: int) -> list[Instance]:
    """Conjugated instances of pure weight for seeds ``0 .. count-1``."""
    out = []
    for seed in range(count):
        cfg = GenConfig.from_config(seed)
        ht = random_pure_type(cfg)
        P = random_unimodular(ht.dimension, cfg)
        out.append(Instance(ht, P, assemble(ht, P)))
    return out


def random_diagonalizable(
    n: int,
    seed: int,
    radius: float = 2.0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Real ``S = P D P^-1`` with ``D`` real block diagonal.

    Returns
    -------
    tuple
        ``(S, P, D)``; blocks of ``D`` are ``[[a, b], [-b, a]]`` for
        complex eigenvalues ``a + ib`` and ``[a]`` for real ones, all of
        modulus at most `radius`.

    """
    rng = np.random.default_rng(seed)
    D = np.zeros((n, n))
    i = 0
    while i < n:
        r = radius * math.sqrt(rng.random())
        theta = 2 * math.pi * rng.random()
        a, b = r * math.cos(theta), r * math.sin(theta)
        if i + 1 < n and rng.random() < 0.5:
            D[i : i + 2, i : i + 2] = [[a, b], [-b, a]]
            i += 2
        else:
            D[i, i] = a
            i += 1
    P = rng.standard_normal((n, n)) + 2 * np.eye(n)
    return P @ D @ np.linalg.inv(P), P, D
