from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import Any

import dask.config
import numpy as np
from typing_extensions import TypeAlias

from hodge_sigma.lib.gaussian_lattice import LatticePoint, nearest_lattice_point
from hodge_sigma.lib.gaussian_lattice import enumerate as enumerate_lattice
from hodge_sigma.utils import (
    DimensionMismatch,
    InternalConsistencyError,
    NonFiniteMatrixError,
    NotDiagonalizable,
    SpectrumOffLattice,
    Witness,
    WitnessKind,
    format_complex,
    resolve_tolerance,
)

log = logging.getLogger(__name__)

RealMatrix: TypeAlias = np.ndarray
ComplexMatrix: TypeAlias = np.ndarray

# distance from the lattice below which a diagnostic eigenvalue counts
# as a lattice point, relative to max(1, ||S||)
DEFECT_RADIUS = 1e-4


def as_square_matrix(M: Any, name: str = "matrix") -> np.ndarray:
    """Coerce `M` to a finite square float or complex array.

    Raises
    ------
    DimensionMismatch
        If `M` is not a square two dimensional array.
    NonFiniteMatrixError
        If `M` holds NaN or infinite entries.

    """
    A = np.asarray(M)
    if A.dtype == object or A.dtype.kind not in "biufc":
        raise TypeError(f"{name} must hold numbers, got dtype {A.dtype}")
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(name, A.shape)
    A = A.astype(np.complex128 if A.dtype.kind == "c" else np.float64, copy=False)
    if not np.all(np.isfinite(A)):
        raise NonFiniteMatrixError(f"{name} has non-finite entries")
    return A


def as_real_matrix(M: Any, name: str = "matrix") -> RealMatrix:
    """Like :func:`as_square_matrix`, rejecting nonzero imaginary parts."""
    A = as_square_matrix(M, name)
    if A.dtype.kind == "c":
        if np.any(A.imag != 0):
            raise ValueError(f"{name} must be real")
        A = A.real.copy()
    return A


def fro(M: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(M, "fro")) if M.size else 0.0


def complexify(M: Any) -> ComplexMatrix:
    """Embed a real matrix entrywise into the complex matrices."""
    return as_square_matrix(M).astype(np.complex128)


def commutator(A: Any, B: Any) -> np.ndarray:
    """``A @ B - B @ A``.

    Raises
    ------
    DimensionMismatch
        If the inputs are not square matrices of the same shape.

    """
    A = as_square_matrix(A, "A")
    B = as_square_matrix(B, "B")
    if A.shape != B.shape:
        raise DimensionMismatch("commutator", A.shape, B.shape)
    return A @ B - B @ A


def _eliminate(M: np.ndarray, threshold: float) -> tuple[np.ndarray, int, np.ndarray]:
    """Gaussian elimination with complete pivoting.

    Returns the reduced matrix (upper trapezoidal in its leading `rank`
    rows), the rank at `threshold` and the column permutation.

    """
    A = np.array(M, dtype=np.result_type(M, np.float64), copy=True)
    m, n = A.shape
    cols = np.arange(n)
    rank = 0
    for k in range(min(m, n)):
        sub = np.abs(A[k:, k:])
        i, j = divmod(int(np.argmax(sub)), n - k)
        if sub[i, j] <= threshold:
            break
        i += k
        j += k
        if i != k:
            A[[k, i], :] = A[[i, k], :]
        if j != k:
            A[:, [k, j]] = A[:, [j, k]]
            cols[[k, j]] = cols[[j, k]]
        factors = A[k + 1 :, k] / A[k, k]
        A[k + 1 :, k:] -= np.outer(factors, A[k, k:])
        A[k + 1 :, k] = 0
        rank += 1
    return A, rank, cols


def _pivot_threshold(A: np.ndarray, tol: float) -> float:
    norm_inf = float(np.max(np.sum(np.abs(A), axis=1))) if A.size else 0.0
    return tol * max(1.0, norm_inf)


def numerical_rank(M: Any, tol: float | None = None) -> int:
    """Rank of `M` by complete pivoting at threshold ``tol*max(1, ||M||_inf)``."""
    A = as_square_matrix(M)
    tol = resolve_tolerance(tol)
    _, rank, _ = _eliminate(A, _pivot_threshold(A, tol))
    return rank


def kernel_basis(M: Any, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the numerical null space of `M`.

    Parameters
    ----------
    M : array_like
        Square real or complex matrix.
    tol : float, optional
        Relative pivot threshold; defaults to ``hodge-sigma.tolerance``.

    Returns
    -------
    numpy.ndarray
        ``n x k`` array whose columns are orthonormal, where ``k`` is
        ``n`` minus the numerical rank. Real input gives a real basis.

    Examples
    --------
    >>> kernel_basis(np.eye(2)).shape
    (2, 0)

    """
    A = as_square_matrix(M)
    tol = resolve_tolerance(tol)
    n = A.shape[0]
    U, rank, cols = _eliminate(A, _pivot_threshold(A, tol))
    free = n - rank
    if free == 0:
        return np.zeros((n, 0), dtype=A.dtype)
    R = U[:rank, :rank]
    basis = np.zeros((n, free), dtype=U.dtype)
    for k in range(free):
        v = np.zeros(n, dtype=U.dtype)
        v[rank + k] = 1
        if rank:
            v[:rank] = np.linalg.solve(R, -U[:rank, rank + k])
        basis[cols, k] = v
    Q, _ = np.linalg.qr(basis)
    return Q


def mat_exp(M: Any, tol: float | None = None) -> np.ndarray:
    """Matrix exponential by scaling and squaring.

    The matrix is divided by ``2**s`` until its 1-norm is at most
    ``hodge-sigma.linalg.scaled-norm``, the Taylor series is summed
    until its terms fall below ``min(tol, eps)`` relative to the sum,
    and the result is squared ``s`` times.

    Parameters
    ----------
    M : array_like
        Square real or complex matrix.
    tol : float, optional
        Defaults to ``hodge-sigma.tolerance``.

    Returns
    -------
    numpy.ndarray
        ``exp(M)``, real for real input. The zero matrix maps to the
        identity exactly.

    """
    A = as_square_matrix(M)
    tol = resolve_tolerance(tol)
    n = A.shape[0]
    identity = np.eye(n, dtype=A.dtype)
    if not np.any(A):
        return identity
    target = float(dask.config.get("hodge-sigma.linalg.scaled-norm"))
    max_terms = int(dask.config.get("hodge-sigma.linalg.max-series-terms"))
    norm1 = float(np.linalg.norm(A, 1))
    s = max(0, math.ceil(math.log2(norm1 / target))) if norm1 > target else 0
    X = A / (2.0**s)
    stop = min(tol, float(np.finfo(np.float64).eps))
    result = identity.copy()
    term = identity
    for k in range(1, max_terms + 1):
        term = term @ X / k
        result = result + term
        if np.linalg.norm(term, 1) <= stop * np.linalg.norm(result, 1):
            break
    else:
        log.debug("exponential series hit the %d term cap", max_terms)
    for _ in range(s):
        result = result @ result
    return result


def _real_part_checked(C: np.ndarray, tol: float, name: str) -> RealMatrix:
    residue = fro(C.imag)
    if residue > 100 * tol * max(1.0, fro(C.real)):
        raise InternalConsistencyError(
            f"{name} of a real matrix has an imaginary residue of {residue:.3g}"
        )
    return C.real.copy()


def mat_sin(M: Any, tol: float | None = None) -> RealMatrix:
    """``sin(M)`` of a real matrix through ``(exp(iM) - exp(-iM)) / 2i``.

    Raises
    ------
    InternalConsistencyError
        If the imaginary residue exceeds ``100*tol*max(1, ||sin M||)``.

    """
    tol = resolve_tolerance(tol)
    X = complexify(as_real_matrix(M))
    C = (mat_exp(1j * X, tol) - mat_exp(-1j * X, tol)) / 2j
    return _real_part_checked(C, tol, "sin")


def mat_sinh(M: Any, tol: float | None = None) -> RealMatrix:
    """``sinh(M)`` of a real matrix through ``(exp(M) - exp(-M)) / 2``."""
    tol = resolve_tolerance(tol)
    X = complexify(as_real_matrix(M))
    C = (mat_exp(X, tol) - mat_exp(-X, tol)) / 2
    return _real_part_checked(C, tol, "sinh")


def spectral_radius_bound(M: Any, steps: int | None = None) -> float:
    """Upper bound ``min_j ||M^(2^j)||_F^(2^-j)`` on the spectral radius.

    Powers are normalized after every squaring and their scale tracked
    in logarithms, so large norms do not overflow. Returns 0.0 when a
    power vanishes exactly.

    """
    A = as_square_matrix(M)
    if steps is None:
        steps = int(dask.config.get("hodge-sigma.spectrum.gelfand-steps"))
    norm = fro(A)
    if norm == 0:
        return 0.0
    best = norm
    X = A / norm
    log_scale = math.log(norm)
    for j in range(1, steps + 1):
        X = X @ X
        log_scale *= 2
        nx = fro(X)
        if nx == 0:
            return 0.0
        X = X / nx
        log_scale += math.log(nx)
        best = min(best, math.exp(log_scale / 2**j))
    return best


@dataclass(frozen=True)
class SpectralData:
    """Eigenspaces of a matrix at lattice points.

    Attributes
    ----------
    eigenspaces : tuple[tuple[LatticePoint, numpy.ndarray], ...]
        Distinct eigenvalues with an orthonormal ``n x k`` basis of each
        eigenspace, sorted by ``(|lambda|, arg lambda)``.
    tol : float
        Tolerance the spectrum was computed with.
    n : int
        Dimension of the matrix.

    """

    eigenspaces: tuple[tuple[LatticePoint, np.ndarray], ...]
    tol: float
    n: int

    def __iter__(self) -> Iterator[tuple[LatticePoint, np.ndarray]]:
        return iter(self.eigenspaces)

    def __len__(self) -> int:
        return len(self.eigenspaces)

    @property
    def eigenvalues(self) -> list[LatticePoint]:
        return [lam for lam, _ in self.eigenspaces]

    @property
    def dimension(self) -> int:
        return sum(basis.shape[1] for _, basis in self.eigenspaces)

    def multiplicities(self) -> dict[LatticePoint, int]:
        return {lam: basis.shape[1] for lam, basis in self.eigenspaces}

    def basis_matrix(self) -> tuple[ComplexMatrix, np.ndarray]:
        """All bases side by side, with the matching eigenvalue per column."""
        if not self.eigenspaces:
            return np.zeros((self.n, 0), dtype=np.complex128), np.zeros(0, complex)
        V = np.hstack([basis.astype(np.complex128) for _, basis in self.eigenspaces])
        lams = np.concatenate(
            [np.full(basis.shape[1], complex(lam)) for lam, basis in self.eigenspaces]
        )
        return V, lams


def _diagnose(
    A: RealMatrix,
    found: dict[LatticePoint, np.ndarray],
    found_dim: int,
) -> NotDiagonalizable | SpectrumOffLattice:
    n = A.shape[0]
    eigvals = np.linalg.eigvals(A)
    radius = DEFECT_RADIUS * max(1.0, fro(A))
    off: list[complex] = []
    algebraic: dict[LatticePoint, int] = {}
    for z in eigvals:
        z = complex(z)
        lam = nearest_lattice_point(z)
        if abs(z - complex(lam)) <= radius:
            algebraic[lam] = algebraic.get(lam, 0) + 1
        elif not any(abs(z - o) <= radius for o in off):
            off.append(z)
    if off:
        witnesses = [
            Witness(
                WitnessKind.SPECTRUM_OFF_LATTICE,
                f"lambda={format_complex(z, 9)} off-lattice",
            )
            for z in sorted(off, key=lambda z: (abs(z), np.angle(z) % (2 * np.pi)))
        ]
        log.debug("spectrum off the lattice: %s", [w.detail for w in witnesses])
        return SpectrumOffLattice(found_dim, n, witnesses)
    witnesses = []
    for lam in sorted(algebraic, key=LatticePoint.sort_key):
        geometric = found[lam].shape[1] if lam in found else 0
        if geometric < algebraic[lam]:
            witnesses.append(
                Witness(
                    WitnessKind.NOT_DIAGONALIZABLE,
                    f"lambda={lam} defective: geometric multiplicity {geometric} "
                    f"< algebraic multiplicity {algebraic[lam]}",
                )
            )
    if not witnesses:
        witnesses.append(
            Witness(
                WitnessKind.NOT_DIAGONALIZABLE,
                f"eigenspaces span {found_dim} of {n} dimensions",
            )
        )
    log.debug("defective spectrum: %s", [w.detail for w in witnesses])
    return NotDiagonalizable(found_dim, n, witnesses)


def lattice_spectrum(
    S: Any,
    tol: float | None = None,
    *,
    candidates: Iterable[LatticePoint] | None = None,
) -> SpectralData:
    """Diagonalize a real matrix over lattice eigenvalues.

    Candidate eigenvalues are the lattice points inside a spectral
    radius bound of `S`; for each candidate ``lambda`` with nonnegative
    imaginary part the kernel of ``S - lambda*I`` is extracted, and the
    conjugate eigenspace is mirrored from it.

    Parameters
    ----------
    S : array_like
        Real square matrix.
    tol : float, optional
        Kernel threshold; defaults to ``hodge-sigma.tolerance``.
    candidates : iterable of LatticePoint, optional
        Candidate eigenvalues to scan, in the given order. Defaults to
        the lattice points in the disk of :func:`spectral_radius_bound`.

    Returns
    -------
    SpectralData
        When the eigenspaces found span the whole space.

    Raises
    ------
    SpectrumOffLattice
        If some eigenvalue is not a lattice point.
    NotDiagonalizable
        If the spectrum lies in the lattice but the eigenspaces do not
        span the space.
    InternalConsistencyError
        If the eigenspaces found have total dimension above ``n``.

    """
    A = as_real_matrix(S, "S")
    tol = resolve_tolerance(tol)
    n = A.shape[0]
    if candidates is None:
        rho = spectral_radius_bound(A)
        candidates = enumerate_lattice(rho * (1 + 1e-8) + 1e-12)
        log.debug("spectral radius bound %g gives %d candidates", rho, len(candidates))
    found: dict[LatticePoint, np.ndarray] = {}
    total = 0
    for lam in candidates:
        if total >= n:
            break
        if lam.b < 0 or lam in found:
            continue
        if lam.b == 0:
            basis = kernel_basis(A - lam.a * np.eye(n), tol).astype(np.complex128)
        else:
            basis = kernel_basis(complexify(A) - complex(lam) * np.eye(n), tol)
        k = basis.shape[1]
        if k == 0:
            continue
        found[lam] = basis
        total += k
        if lam.b > 0:
            found[lam.conj()] = basis.conj()
            total += k
    if total > n:
        raise InternalConsistencyError(
            f"eigenspaces at lattice points have total dimension {total} > {n}; "
            "the tolerance is too loose for this matrix"
        )
    if total < n:
        raise _diagnose(A, found, total)
    ordered = tuple(sorted(found.items(), key=lambda item: item[0].sort_key()))
    return SpectralData(eigenspaces=ordered, tol=tol, n=n)
