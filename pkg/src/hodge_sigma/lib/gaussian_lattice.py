"""The lattice L = Z(1-i) + Z(1+i) of Gaussian integers with equal parity parts."""

from __future__ import annotations

import logging
import math
import numbers
from dataclasses import dataclass
from typing import Any, Union

import cachetools
import dask.config
import numpy as np
from typing_extensions import TypeAlias

from hodge_sigma.utils import NonIntegerInputError, NotALatticePoint, ResourceLimitError

log = logging.getLogger(__name__)

GaussianLike: TypeAlias = Union[complex, int, float, "LatticePoint", tuple]

OMEGA1: complex = 1 - 1j
OMEGA2: complex = 1 + 1j

# ceil(radius) -> (a, b, norm) of every lattice point in the square, sorted
_disk_cache: cachetools.LRUCache = cachetools.LRUCache(maxsize=32)


@dataclass(frozen=True)
class LatticePoint:
    """A Gaussian integer ``a + ib`` with ``a - b`` even.

    Parameters
    ----------
    a : int
        Real part.
    b : int
        Imaginary part.

    Examples
    --------
    >>> w = LatticePoint(1, 1)
    >>> w.p, w.q
    (1, 0)
    >>> LatticePoint.from_coordinates(1, 0)
    LatticePoint(a=1, b=-1)

    """

    a: int
    b: int

    def __post_init__(self) -> None:
        for value in (self.a, self.b):
            if isinstance(value, bool) or not isinstance(value, numbers.Integral):
                raise NonIntegerInputError(value)
        object.__setattr__(self, "a", int(self.a))
        object.__setattr__(self, "b", int(self.b))
        if (self.a - self.b) % 2 != 0:
            raise NotALatticePoint(self.a, self.b)

    @property
    def p(self) -> int:
        return (self.a + self.b) // 2

    @property
    def q(self) -> int:
        return (self.a - self.b) // 2

    @property
    def norm(self) -> int:
        """Squared modulus ``a**2 + b**2``, exact."""
        return self.a * self.a + self.b * self.b

    @property
    def argument(self) -> float:
        """Argument in ``[0, 2*pi)``; zero for the origin."""
        theta = math.atan2(self.b, self.a)
        return theta + 2 * math.pi if theta < 0 else theta

    def conj(self) -> LatticePoint:
        return LatticePoint(self.a, -self.b)

    def __neg__(self) -> LatticePoint:
        return LatticePoint(-self.a, -self.b)

    def __complex__(self) -> complex:
        return complex(self.a, self.b)

    def __abs__(self) -> float:
        return math.hypot(self.a, self.b)

    def __str__(self) -> str:
        if self.b == 0:
            return f"{self.a}"
        im = {1: "i", -1: "-i"}.get(self.b, f"{self.b}i")
        if self.a == 0:
            return im
        sign = "" if self.b < 0 else "+"
        return f"{self.a}{sign}{im}"

    def sort_key(self) -> tuple[int, float]:
        return (self.norm, self.argument)

    def coordinates(self) -> tuple[int, int]:
        """Return ``(k1, k2)`` with ``self == k1*(1-i) + k2*(1+i)``."""
        return ((self.a - self.b) // 2, (self.a + self.b) // 2)

    @classmethod
    def from_coordinates(cls, k1: int, k2: int) -> LatticePoint:
        """Build ``k1*(1-i) + k2*(1+i)``, the product's index set."""
        return cls(k1 + k2, k2 - k1)

    @classmethod
    def from_complex(cls, z: GaussianLike) -> LatticePoint:
        """Coerce `z` to a lattice point.

        Raises
        ------
        NonIntegerInputError
            If `z` does not have integer parts.
        NotALatticePoint
            If the parts have different parity.

        """
        if isinstance(z, LatticePoint):
            return z
        a, b = gaussian_parts(z)
        return cls(a, b)


def generators() -> tuple[LatticePoint, LatticePoint]:
    """The basis ``(1-i, 1+i)`` of the lattice."""
    return LatticePoint(1, -1), LatticePoint(1, 1)


def gaussian_parts(z: Any) -> tuple[int, int]:
    """Split `z` into integer real and imaginary parts.

    Accepts Python and numpy numbers, ``(a, b)`` pairs and
    :class:`LatticePoint`.

    Raises
    ------
    NonIntegerInputError
        If either part is not an integer (or is not finite).

    """
    if isinstance(z, LatticePoint):
        return z.a, z.b
    if isinstance(z, tuple) and len(z) == 2:
        re, im = z
    else:
        try:
            c = complex(z)
        except (TypeError, ValueError) as err:
            raise NonIntegerInputError(z) from err
        re, im = c.real, c.imag
    parts = []
    for value in (re, im):
        if isinstance(value, numbers.Integral) and not isinstance(value, bool):
            parts.append(int(value))
            continue
        if isinstance(value, numbers.Real):
            f = float(value)
            if math.isfinite(f) and f.is_integer():
                parts.append(int(f))
                continue
        raise NonIntegerInputError(z)
    return parts[0], parts[1]


def is_lattice_point(z: GaussianLike) -> bool:
    """Whether the Gaussian integer `z` lies in the lattice.

    Parameters
    ----------
    z : complex, int, tuple or LatticePoint
        Number with integer real and imaginary parts.

    Returns
    -------
    bool
        True iff the real and imaginary parts have equal parity.

    Raises
    ------
    NonIntegerInputError
        If `z` does not have integer parts.

    Examples
    --------
    >>> is_lattice_point(1 + 1j)
    True
    >>> is_lattice_point(1)
    False

    """
    a, b = gaussian_parts(z)
    return (a - b) % 2 == 0


def pq_of_lambda(lam: GaussianLike) -> tuple[int, int]:
    """Hodge indices ``(p, q)`` of the eigenvalue ``lam = (p+q) + i(p-q)``."""
    w = LatticePoint.from_complex(lam)
    return w.p, w.q


def lambda_of_pq(p: int, q: int) -> LatticePoint:
    """Eigenvalue ``(p+q) + i(p-q)`` of the Hodge index ``(p, q)``."""
    return LatticePoint(p + q, p - q)


def estimated_count(radius: float) -> int:
    """Upper bound on the number of lattice points with ``|w| <= radius``.

    Every point owns a unit-area square of the lattice's area-2 cells
    that fits in the disk of radius ``radius + 1``.

    """
    return int(math.pi * (radius + 1.0) ** 2 / 2.0) + 1


def _check_radius(radius: float) -> float:
    radius = float(radius)
    if math.isnan(radius) or radius < 0:
        raise ValueError(f"radius must be nonnegative, got {radius!r}")
    cap = int(dask.config.get("hodge-sigma.lattice.max-points"))
    if not math.isfinite(radius) or estimated_count(radius) > cap:
        raise ResourceLimitError(
            f"enumerating the lattice disk of radius {radius:g} needs about "
            f"{estimated_count(radius) if math.isfinite(radius) else 'infinitely many'} "
            f"points; the cap hodge-sigma.lattice.max-points is {cap}"
        )
    return radius


def _square(m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if m in _disk_cache:
        return _disk_cache[m]
    side = np.arange(-m, m + 1, dtype=np.int64)
    a, b = np.meshgrid(side, side, indexing="ij")
    a = a.ravel()
    b = b.ravel()
    keep = (a - b) % 2 == 0
    a, b = a[keep], b[keep]
    norm = a * a + b * b
    theta = np.arctan2(b, a)
    theta = np.where(theta < 0, theta + 2 * np.pi, theta)
    order = np.lexsort((theta, norm))
    result = (a[order], b[order], norm[order])
    for arr in result:
        arr.setflags(write=False)
    _disk_cache[m] = result
    return result


def disk_arrays(radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Integer parts ``(a, b)`` of the lattice points in the closed disk.

    Same content and order as :func:`enumerate`, without building
    :class:`LatticePoint` objects.

    """
    radius = _check_radius(radius)
    a, b, norm = _square(math.ceil(radius))
    n = int(np.searchsorted(norm, radius * radius, side="right"))
    return a[:n], b[:n]


def enumerate(radius: float) -> list[LatticePoint]:
    """Lattice points in the closed disk of `radius`.

    Parameters
    ----------
    radius : float
        Nonnegative radius.

    Returns
    -------
    list[LatticePoint]
        Points ``w`` with ``|w| <= radius`` sorted by ``(|w|, arg w)``
        with the argument taken in ``[0, 2*pi)``.

    Raises
    ------
    ResourceLimitError
        If the disk holds more points than the configured
        ``hodge-sigma.lattice.max-points``.

    Examples
    --------
    >>> [str(w) for w in enumerate(1.5)]
    ['0', '1+i', '-1+i', '-1-i', '1-i']

    """
    a, b = disk_arrays(radius)
    log.debug("enumerated %d lattice points within radius %g", len(a), radius)
    return [LatticePoint(int(x), int(y)) for x, y in zip(a, b)]


def nearest_lattice_point(z: complex) -> LatticePoint:
    """Closest lattice point to `z`.

    The lattice is a square lattice on the orthogonal basis
    ``(1-i, 1+i)``, so rounding both coordinates finds the nearest
    point. Ties round half to even, which keeps the map odd.

    """
    z = complex(z)
    k1 = round((z.real - z.imag) / 2)
    k2 = round((z.real + z.imag) / 2)
    return LatticePoint.from_coordinates(int(k1), int(k2))
