"""Real Hodge structures as commuting pairs of real operators.

A Hodge structure of type ``{(p, q) x m}`` is realized on a real vector
space by ``E`` acting as ``p + q`` and ``T`` acting as ``i (p - q)`` on
``V^{p,q}``; the single operator ``S = E + T`` then has spectrum in the
lattice ``Z(1-i) + Z(1+i)``, is diagonalizable over the complex
numbers, and determines ``E`` and ``T`` (and so everything else) back.

"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Optional

import dask
import dask.config
import numpy as np

from hodge_sigma.lib.gaussian_lattice import (
    LatticePoint,
    lambda_of_pq,
    pq_of_lambda,
)
from hodge_sigma.lib.linalg import (
    RealMatrix,
    SpectralData,
    as_real_matrix,
    commutator,
    fro,
    kernel_basis,
    lattice_spectrum,
    mat_exp,
    mat_sin,
    mat_sinh,
    numerical_rank,
    spectral_radius_bound,
)
from hodge_sigma.lib.weierstrass import evaluate_plan, sigma_matrix, truncation_plan
from hodge_sigma.utils import (
    ConjugateMultiplicityMismatch,
    DecompositionError,
    DimensionMismatch,
    InternalConsistencyError,
    MixedWeightError,
    ResourceLimitError,
    SingularConjugator,
    SpectrumError,
    Witness,
    WitnessKind,
    resolve_tolerance,
)

log = logging.getLogger(__name__)

J = np.array([[0.0, -1.0], [1.0, 0.0]])

# points on the circle |z| = rho used to normalize sigma residuals
CIRCLE_SAMPLES = 64


class Summand(NamedTuple):
    p: int
    q: int
    mult: int

    @property
    def dimension(self) -> int:
        return self.mult * (1 if self.p == self.q else 2)

    @property
    def weight(self) -> int:
        return self.p + self.q


def _canonical_key(pq: tuple[int, int]) -> tuple[int, int]:
    p, q = pq
    return (p + q, p - q)


@dataclass(frozen=True)
class HodgeType:
    """Finite multiset of Hodge indices ``(p, q)`` with ``q <= p``.

    Summands are normalized on construction: ``(q, p)`` with ``q > p``
    is stored as ``(p, q)`` (the real representation of the pair is the
    same), repeated indices are merged, and the summands are sorted by
    ``(p + q, p - q)``.

    Examples
    --------
    >>> str(HodgeType.from_summands([(1, 1, 1), (0, 1, 2)]))
    '(1,0)x2+(1,1)x1'

    """

    summands: tuple[Summand, ...]

    def __post_init__(self) -> None:
        counts: dict[tuple[int, int], int] = {}
        for entry in self.summands:
            p, q, mult = (int(v) for v in entry)
            if mult < 1:
                raise ValueError(f"multiplicity of ({p},{q}) must be positive, got {mult}")
            if q > p:
                p, q = q, p
            counts[(p, q)] = counts.get((p, q), 0) + mult
        if not counts:
            raise ValueError("a Hodge type needs at least one summand")
        ordered = tuple(
            Summand(p, q, counts[(p, q)]) for p, q in sorted(counts, key=_canonical_key)
        )
        object.__setattr__(self, "summands", ordered)

    @classmethod
    def from_summands(cls, summands: Iterable[Sequence[int]]) -> HodgeType:
        return cls(tuple(Summand(*s) for s in summands))

    @classmethod
    def from_mapping(cls, mults: Mapping[tuple[int, int], int]) -> HodgeType:
        return cls(tuple(Summand(p, q, m) for (p, q), m in mults.items()))

    def __iter__(self) -> Iterator[Summand]:
        return iter(self.summands)

    def __str__(self) -> str:
        return "+".join(f"({s.p},{s.q})x{s.mult}" for s in self.summands)

    @property
    def dimension(self) -> int:
        return sum(s.dimension for s in self.summands)

    @property
    def weights(self) -> list[int]:
        return sorted({s.weight for s in self.summands})

    @property
    def is_pure(self) -> bool:
        return len(self.weights) == 1

    def as_dict(self) -> dict[tuple[int, int], int]:
        return {(s.p, s.q): s.mult for s in self.summands}

    def blocks(self) -> list[tuple[int, int]]:
        """Irreducible blocks in layout order, multiplicities expanded."""
        return [(s.p, s.q) for s in self.summands for _ in range(s.mult)]

    def to_list(self) -> list[dict[str, int]]:
        return [{"p": s.p, "q": s.q, "mult": s.mult} for s in self.summands]


@dataclass(frozen=True, eq=False)
class OperatorTriple:
    """Real operators ``E``, ``T`` and ``S = E + T`` on one space."""

    E: RealMatrix
    T: RealMatrix
    S: RealMatrix
    n: int = field(init=False)

    def __post_init__(self) -> None:
        arrays = []
        for name in ("E", "T", "S"):
            arr = np.array(as_real_matrix(getattr(self, name), name), copy=True)
            arr.setflags(write=False)
            arrays.append(arr)
            object.__setattr__(self, name, arr)
        shapes = {a.shape for a in arrays}
        if len(shapes) != 1:
            raise DimensionMismatch("OperatorTriple", *(a.shape for a in arrays))
        object.__setattr__(self, "n", arrays[0].shape[0])

    @classmethod
    def from_pair(cls, E: Any, T: Any) -> OperatorTriple:
        E = as_real_matrix(E, "E")
        T = as_real_matrix(T, "T")
        if E.shape != T.shape:
            raise DimensionMismatch("OperatorTriple", E.shape, T.shape)
        return cls(E, T, E + T)


@dataclass(frozen=True, eq=False)
class HodgeDecomposition:
    """Hodge decomposition ``V_C = sum V^{p,q}`` with its weight grading.

    Attributes
    ----------
    components : dict
        ``(p, q)`` to an orthonormal complex ``n x k`` basis of
        ``V^{p,q}``, in canonical ``(p + q, p - q)`` order.
    weight_map : dict
        Weight ``p + q`` to a real orthonormal basis of the real
        subspace where ``E`` acts as that weight.
    n : int
        Dimension of the space.
    tol : float
        Tolerance used for the decomposition.

    """

    components: dict[tuple[int, int], np.ndarray]
    weight_map: dict[int, np.ndarray]
    n: int
    tol: float

    def dims(self) -> dict[tuple[int, int], int]:
        return {pq: basis.shape[1] for pq, basis in self.components.items()}

    @property
    def weights(self) -> list[int]:
        return sorted({p + q for p, q in self.components})

    @property
    def weight(self) -> int | None:
        """The weight of a pure decomposition, None if mixed."""
        weights = self.weights
        return weights[0] if len(weights) == 1 else None

    def hodge_type(self) -> HodgeType:
        return HodgeType.from_mapping(
            {(p, q): k for (p, q), k in self.dims().items() if q <= p}
        )


@dataclass(frozen=True)
class VerificationReport:
    """Residual norms of the defining equations and the verdict.

    Norms that a given check does not compute are None. ``verdict`` is
    true iff every thresholded norm is at most ``threshold`` and no
    structural witness was found; ``sigma_norm`` is reported as
    evidence and never thresholded.

    """

    verdict: bool
    threshold: float
    commutator_norm: Optional[float] = None
    sin_E_norm: Optional[float] = None
    sinh_T_norm: Optional[float] = None
    parity_norm: Optional[float] = None
    sigma_norm: Optional[float] = None
    sum_norm: Optional[float] = None
    witnesses: tuple[Witness, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "threshold": self.threshold,
            "commutator_norm": self.commutator_norm,
            "sin_E_norm": self.sin_E_norm,
            "sinh_T_norm": self.sinh_T_norm,
            "parity_norm": self.parity_norm,
            "sigma_norm": self.sigma_norm,
            "sum_norm": self.sum_norm,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }

    def kinds(self) -> set[WitnessKind]:
        return {w.kind for w in self.witnesses}


def _threshold(tol: float, *matrices: np.ndarray) -> float:
    return tol * max(1.0, sum(fro(M) for M in matrices))


def build_block(p: int, q: int) -> tuple[RealMatrix, RealMatrix]:
    """Derivatives ``(E, T)`` of the irreducible real representation of type (p, q).

    Examples
    --------
    >>> E, T = build_block(1, 0)
    >>> T.tolist()
    [[0.0, -1.0], [1.0, 0.0]]

    """
    p, q = int(p), int(q)
    if q > p:
        p, q = q, p
    if p == q:
        return np.array([[2.0 * p]]), np.zeros((1, 1))
    return (p + q) * np.eye(2), (p - q) * J.copy()


def _block_diag(blocks: Sequence[np.ndarray], n: int) -> RealMatrix:
    out = np.zeros((n, n))
    i = 0
    for block in blocks:
        k = block.shape[0]
        out[i : i + k, i : i + k] = block
        i += k
    return out


def _conjugator_inverse(P: RealMatrix, tol: float) -> RealMatrix:
    n = P.shape[0]
    if numerical_rank(P, tol) < n:
        raise SingularConjugator(f"the {n}x{n} conjugator is singular")
    try:
        inv = np.linalg.inv(P)
    except np.linalg.LinAlgError as err:
        raise SingularConjugator(str(err)) from err
    if np.array_equal(P, np.rint(P)):
        exact = np.rint(inv)
        if np.array_equal(P @ exact, np.eye(n)):
            return exact
    return inv


def assemble(
    ht: HodgeType,
    conjugator: Any | None = None,
    tol: float | None = None,
) -> OperatorTriple:
    """Operators of the Hodge structure of type `ht`.

    Blocks from :func:`build_block` are laid out along the diagonal in
    canonical order and, when `conjugator` ``P`` is given, conjugated
    to ``P X P^-1``. Integral unimodular conjugators are inverted
    exactly so integer inputs give integer operators.

    Raises
    ------
    DimensionMismatch
        If the conjugator is not ``n x n``.
    SingularConjugator
        If the conjugator is singular.

    """
    tol = resolve_tolerance(tol)
    n = ht.dimension
    pairs = [build_block(p, q) for p, q in ht.blocks()]
    E = _block_diag([e for e, _ in pairs], n)
    T = _block_diag([t for _, t in pairs], n)
    if conjugator is not None:
        P = as_real_matrix(conjugator, "conjugator")
        if P.shape != (n, n):
            raise DimensionMismatch("assemble", (n, n), P.shape)
        Pinv = _conjugator_inverse(P, tol)
        E = P @ E @ Pinv
        T = P @ T @ Pinv
    log.debug("assembled %s in dimension %d", ht, n)
    return OperatorTriple(E, T, E + T)


def verify_pair(E: Any, T: Any, tol: float | None = None) -> VerificationReport:
    """Check ``[E,T] = 0``, ``sin(pi E) = 0``, ``sinh(pi T) = 0`` and
    ``sin(pi/2 (E**2 + T**2)) = 0``.

    Residuals are Frobenius norms; each passes when at most
    ``tol*max(1, ||E|| + ||T||)``. Failures are reported as witnesses,
    never raised.

    """
    tol = resolve_tolerance(tol)
    E = as_real_matrix(E, "E")
    T = as_real_matrix(T, "T")
    if E.shape != T.shape:
        raise DimensionMismatch("verify_pair", E.shape, T.shape)
    threshold = _threshold(tol, E, T)
    norms = {
        WitnessKind.COMMUTATOR: fro(commutator(E, T)),
        WitnessKind.SIN_E: fro(mat_sin(math.pi * E, tol)),
        WitnessKind.SINH_T: fro(mat_sinh(math.pi * T, tol)),
        WitnessKind.PARITY: fro(mat_sin(math.pi / 2 * (E @ E + T @ T), tol)),
    }
    witnesses = tuple(
        Witness(kind, f"{kind.value}: residual {value:.3g} > {threshold:.3g}")
        for kind, value in norms.items()
        if value > threshold
    )
    return VerificationReport(
        verdict=not witnesses,
        threshold=threshold,
        commutator_norm=norms[WitnessKind.COMMUTATOR],
        sin_E_norm=norms[WitnessKind.SIN_E],
        sinh_T_norm=norms[WitnessKind.SINH_T],
        parity_norm=norms[WitnessKind.PARITY],
        witnesses=witnesses,
    )


def _circle_max(plan_values: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(plan_values), initial=0.0)))


def sigma_residual(S: Any, tol: float | None = None) -> float:
    """Normalized residual ``||sigma(S)|| / max(1, max_{|z|=rho} |sigma(z)|)``.

    ``rho`` is the spectral radius bound of `S`; the circle is sampled
    at 64 points with the truncation plan used for the matrix.
    Defaults to ``hodge-sigma.sigma.residual-tolerance``.

    """
    A = as_real_matrix(S, "S")
    tol = resolve_tolerance(tol, "hodge-sigma.sigma.residual-tolerance")
    rho = spectral_radius_bound(A)
    raw = fro(sigma_matrix(A, tol))
    if rho == 0:
        return raw
    plan = truncation_plan(rho, tol)
    circle = rho * np.exp(2j * np.pi * np.arange(CIRCLE_SAMPLES) / CIRCLE_SAMPLES)
    return raw / _circle_max(evaluate_plan(plan, circle))


def verify_sigma(S: Any, tol: float | None = None) -> VerificationReport:
    """Decide ``sigma(S) = 0`` for a real matrix `S`.

    The verdict is structural: `S` must be diagonalizable with all
    eigenvalues in the lattice (:func:`~hodge_sigma.lib.linalg.lattice_spectrum`).
    The normalized residual of :func:`sigma_residual` is recorded as
    ``sigma_norm``.

    """
    tol = resolve_tolerance(tol)
    A = as_real_matrix(S, "S")
    witnesses: tuple[Witness, ...] = ()
    try:
        lattice_spectrum(A, tol)
    except SpectrumError as err:
        witnesses = err.witnesses
        log.debug("sigma(S) != 0: %s", err)
    try:
        sigma_norm: float | None = sigma_residual(A)
    except ResourceLimitError as err:
        log.warning("sigma residual skipped: %s", err)
        sigma_norm = None
    return VerificationReport(
        verdict=not witnesses,
        threshold=_threshold(tol, A),
        sigma_norm=sigma_norm,
        witnesses=witnesses,
    )


def verify_operator(triple: OperatorTriple, tol: float | None = None) -> VerificationReport:
    """All checks on a triple: the pair equations, ``sigma(S) = 0`` and ``S = E + T``."""
    tol = resolve_tolerance(tol)
    pair = verify_pair(triple.E, triple.T, tol)
    sig = verify_sigma(triple.S, tol)
    sum_norm = fro(triple.E + triple.T - triple.S)
    witnesses = pair.witnesses + sig.witnesses
    if sum_norm > pair.threshold:
        witnesses += (
            Witness(
                WitnessKind.SUM,
                f"SumMismatch: ||E + T - S|| = {sum_norm:.3g} > {pair.threshold:.3g}",
            ),
        )
    return VerificationReport(
        verdict=not witnesses,
        threshold=pair.threshold,
        commutator_norm=pair.commutator_norm,
        sin_E_norm=pair.sin_E_norm,
        sinh_T_norm=pair.sinh_T_norm,
        parity_norm=pair.parity_norm,
        sigma_norm=sig.sigma_norm,
        sum_norm=sum_norm,
        witnesses=witnesses,
    )


def _verify_arrays(E: RealMatrix, T: RealMatrix, S: RealMatrix, tol: float) -> VerificationReport:
    return verify_operator(OperatorTriple(E, T, S), tol)


def batch_verify(
    triples: Iterable[OperatorTriple],
    tol: float | None = None,
) -> list[VerificationReport]:
    """:func:`verify_operator` over many triples in dask tasks, in input order."""
    tol = resolve_tolerance(tol)
    tasks = [dask.delayed(_verify_arrays)(t.E, t.T, t.S, tol) for t in triples]
    scheduler = dask.config.get("hodge-sigma.scan.scheduler")
    return list(dask.compute(*tasks, scheduler=scheduler))


def _projected(spectrum: SpectralData, values: np.ndarray) -> np.ndarray:
    V, _ = spectrum.basis_matrix()
    # X V = V diag(values)  <=>  V^T X^T = (V diag(values))^T
    X = np.linalg.solve(V.T, (V * values).T).T
    return X


def split(
    S: Any,
    tol: float | None = None,
    *,
    candidates: Iterable[LatticePoint] | None = None,
) -> tuple[RealMatrix, RealMatrix]:
    """Recover ``(E, T)`` from ``S = E + T``.

    With ``P_j`` the spectral projectors of ``S`` at ``a_j + i b_j``,
    ``E = sum a_j P_j`` and ``T = sum i b_j P_j``; both are real since
    the spectrum of a real ``S`` is closed under conjugation. The result
    does not depend on the order of `candidates`, which is handed to
    :func:`~hodge_sigma.lib.linalg.lattice_spectrum`.

    Raises
    ------
    SpectrumOffLattice, NotDiagonalizable
        From :func:`~hodge_sigma.lib.linalg.lattice_spectrum`.

    Examples
    --------
    >>> E, T = split([[1.0, -1.0], [1.0, 1.0]])
    >>> np.allclose(E, np.eye(2)) and np.allclose(T, [[0, -1], [1, 0]])
    True

    """
    tol = resolve_tolerance(tol)
    spectrum = lattice_spectrum(S, tol, candidates=candidates)
    _, lams = spectrum.basis_matrix()
    E = _projected(spectrum, lams.real.astype(np.complex128))
    T = _projected(spectrum, 1j * lams.imag)
    log.debug(
        "split residues: imag(E) %g, imag(T) %g",
        fro(E.imag),
        fro(T.imag),
    )
    return np.ascontiguousarray(E.real), np.ascontiguousarray(T.real)


def classify(S: Any, tol: float | None = None) -> HodgeType:
    """Hodge type of the structure with ``S = E + T``.

    Each eigenvalue ``lambda`` maps to ``(p, q)`` through
    :func:`~hodge_sigma.lib.gaussian_lattice.pq_of_lambda`; the pair
    ``(p, q), (q, p)`` becomes one summand.

    Raises
    ------
    ConjugateMultiplicityMismatch
        If ``lambda`` and its conjugate have different multiplicities.

    """
    tol = resolve_tolerance(tol)
    mults = lattice_spectrum(S, tol).multiplicities()
    summands = []
    for lam, m in mults.items():
        if lam.b < 0:
            continue
        if lam.b > 0:
            m_conj = mults.get(lam.conj(), 0)
            if m_conj != m:
                raise ConjugateMultiplicityMismatch(complex(lam), m, m_conj)
        p, q = pq_of_lambda(lam)
        summands.append(Summand(p, q, m))
    return HodgeType(tuple(summands))


def weight_decomposition(
    triple: OperatorTriple,
    tol: float | None = None,
) -> dict[int, RealMatrix]:
    """Real eigenspaces of ``E`` at integer eigenvalues.

    Returns
    -------
    dict
        Weight to a real orthonormal ``n x k`` basis, sorted by weight.

    Raises
    ------
    DecompositionError
        If the eigenspaces do not span the space.

    """
    tol = resolve_tolerance(tol)
    E = triple.E
    bound = math.ceil(spectral_radius_bound(E) * (1 + 1e-8) + 1e-12)
    weights: dict[int, RealMatrix] = {}
    total = 0
    for k in range(-bound, bound + 1):
        basis = kernel_basis(E - k * np.eye(triple.n), tol)
        if basis.shape[1]:
            weights[k] = basis
            total += basis.shape[1]
    if total > triple.n:
        raise InternalConsistencyError(
            f"weight spaces have total dimension {total} > {triple.n}"
        )
    if total < triple.n:
        raise DecompositionError(
            f"E is not semisimple with integer eigenvalues: weight spaces span "
            f"{total} of {triple.n} dimensions"
        )
    return weights


def hodge_decomposition(
    triple: OperatorTriple,
    tol: float | None = None,
) -> HodgeDecomposition:
    """Hodge decomposition of the structure given by `triple`.

    ``V^{p,q}`` is the eigenspace of ``S`` at ``(p+q) + i(p-q)``; it is
    checked to be the joint eigenspace of ``E`` (eigenvalue ``p+q``) and
    ``T`` (eigenvalue ``i(p-q)``), and conjugation is checked to map it
    onto ``V^{q,p}``.

    Raises
    ------
    DecompositionError
        If either check fails.

    """
    tol = resolve_tolerance(tol)
    spectrum = lattice_spectrum(triple.S, tol)
    threshold = 10 * _threshold(tol, triple.E, triple.T)
    components: dict[tuple[int, int], np.ndarray] = {}
    for lam, basis in spectrum:
        p, q = pq_of_lambda(lam)
        e_res = fro(triple.E @ basis - (p + q) * basis)
        t_res = fro(triple.T @ basis - 1j * (p - q) * basis)
        if max(e_res, t_res) > threshold:
            raise DecompositionError(
                f"V^({p},{q}) is not a joint eigenspace of E and T: residuals "
                f"{e_res:.3g}, {t_res:.3g} > {threshold:.3g}"
            )
        components[(p, q)] = basis
    for (p, q), basis in components.items():
        partner = components.get((q, p))
        if partner is None or partner.shape[1] != basis.shape[1]:
            raise DecompositionError(f"V^({p},{q}) has no conjugate partner of equal dimension")
        conj = basis.conj()
        off = fro(conj - partner @ (partner.conj().T @ conj))
        if off > threshold:
            raise DecompositionError(
                f"conjugate of V^({p},{q}) leaves V^({q},{p}) by {off:.3g}"
            )
    ordered = {pq: components[pq] for pq in sorted(components, key=_canonical_key)}
    return HodgeDecomposition(
        components=ordered,
        weight_map=weight_decomposition(triple, tol),
        n=triple.n,
        tol=tol,
    )


def build_filtration(
    dec: HodgeDecomposition,
    r: int,
    *,
    check_complement: bool = False,
    tol: float | None = None,
) -> np.ndarray:
    """Basis of the Hodge filtration ``F^r = sum_{p >= r} V^{p,q}``.

    Parameters
    ----------
    dec : HodgeDecomposition
        Decomposition to filter.
    r : int
        Filtration index.
    check_complement : bool
        For a pure decomposition of weight ``w``, also check that
        ``F^r`` and the conjugate of ``F^{w-r+1}`` are complementary.
    tol : float, optional
        Rank threshold for the complement check; defaults to the
        decomposition's tolerance.

    Returns
    -------
    numpy.ndarray
        Orthonormal complex ``n x k`` basis, ``k = dim F^r``.

    Raises
    ------
    MixedWeightError
        If the complement check is asked of a mixed decomposition.
    DecompositionError
        If the complement check fails.

    """
    r = int(r)
    F = _filtration_basis(dec, r)
    if check_complement:
        weight = dec.weight
        if weight is None:
            raise MixedWeightError(
                f"the filtration complement needs a pure weight; weights are {dec.weights}"
            )
        tol = dec.tol if tol is None else resolve_tolerance(tol)
        other = _filtration_basis(dec, weight - r + 1).conj()
        if F.shape[1] + other.shape[1] != dec.n:
            raise DecompositionError(
                f"dim F^{r} + dim F^{weight - r + 1} = "
                f"{F.shape[1] + other.shape[1]} != {dec.n}"
            )
        if dec.n and numerical_rank(np.hstack([F, other]), tol) != dec.n:
            raise DecompositionError(
                f"F^{r} meets the conjugate of F^{weight - r + 1} nontrivially"
            )
    return F


def _filtration_basis(dec: HodgeDecomposition, r: int) -> np.ndarray:
    bases = [basis for (p, _), basis in dec.components.items() if p >= r]
    if not bases:
        return np.zeros((dec.n, 0), dtype=np.complex128)
    Q, _ = np.linalg.qr(np.hstack(bases))
    return Q


def rho_eval(
    triple: OperatorTriple,
    x: float,
    y: float,
    tol: float | None = None,
) -> RealMatrix:
    """The representation at ``exp(x + iy)``: ``exp(x E + y T)``."""
    return mat_exp(float(x) * triple.E + float(y) * triple.T, tol)


def rho_block(p: int, q: int, r: float, phi: float) -> RealMatrix:
    """Irreducible real representation of type (p, q) at ``r exp(i phi)``.

    ``r**(p+q)`` times the rotation by ``(p - q) phi``, or the 1x1 matrix
    ``r**(2p)`` when ``p == q``.

    """
    p, q = int(p), int(q)
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    scale = float(r) ** (p + q)
    if p == q:
        return np.array([[scale]])
    theta = (p - q) * float(phi)
    c, s = math.cos(theta), math.sin(theta)
    return scale * np.array([[c, -s], [s, c]])


def character(p: int, q: int, z: complex) -> complex:
    """``z**p * conj(z)**q``, the character of ``V^{p,q}``."""
    z = complex(z)
    if z == 0:
        raise ZeroDivisionError("characters are defined on nonzero complex numbers")
    return z ** int(p) * z.conjugate() ** int(q)


def real_normal_form(S: Any, tol: float | None = None) -> tuple[RealMatrix, RealMatrix]:
    """Real basis ``Q`` in which `S` is block diagonal.

    For ``lambda = a + ib`` with ``b > 0`` and eigenvector ``v = x + iy``
    the columns ``(x, y)`` carry the block ``[[a, b], [-b, a]]``; real
    eigenvalues contribute real eigenvectors.

    Returns
    -------
    tuple
        ``(Q, D)`` with ``D = Q^-1 S Q``.

    """
    tol = resolve_tolerance(tol)
    A = as_real_matrix(S, "S")
    spectrum = lattice_spectrum(A, tol)
    columns: list[np.ndarray] = []
    for lam, basis in spectrum:
        if lam.b < 0:
            continue
        if lam.b == 0:
            columns.extend(basis.real.T)
            continue
        for v in basis.T:
            columns.extend([v.real, v.imag])
    Q = np.column_stack(columns) if columns else np.zeros((A.shape[0], 0))
    D = np.linalg.solve(Q, A @ Q)
    return Q, D


def _allowed_points(allowed: Iterable[tuple[int, int]]) -> set[LatticePoint]:
    points = set()
    for p, q in allowed:
        points.add(lambda_of_pq(p, q))
        points.add(lambda_of_pq(q, p))
    return points


def verify_restricted(
    S: Any,
    allowed: Iterable[tuple[int, int]],
    tol: float | None = None,
) -> bool:
    """Whether ``g(S) = 0`` for the product ``g`` of sigma factors at `allowed`.

    True iff every eigenvalue of `S` maps to an allowed ``(p, q)`` or
    to the swap of one.

    Raises
    ------
    SpectrumOffLattice, NotDiagonalizable
        If ``sigma(S) != 0``.

    """
    tol = resolve_tolerance(tol)
    points = _allowed_points(allowed)
    return all(lam in points for lam in lattice_spectrum(S, tol).eigenvalues)


def restricted_residual(
    S: Any,
    allowed: Iterable[tuple[int, int]],
) -> float:
    """Normalized ``||g(S)||`` for ``g(z) = prod (z - lambda)`` over `allowed`.

    The allowed set is closed under swapping ``p`` and ``q``; the norm
    is divided by ``max(1, max_{|z|=rho} |g(z)|)``.

    """
    A = as_real_matrix(S, "S")
    n = A.shape[0]
    points = sorted(_allowed_points(allowed), key=LatticePoint.sort_key)
    G = np.eye(n, dtype=np.complex128)
    for lam in points:
        G = G @ (A - complex(lam) * np.eye(n))
    rho = spectral_radius_bound(A)
    circle = rho * np.exp(2j * np.pi * np.arange(CIRCLE_SAMPLES) / CIRCLE_SAMPLES)
    g = np.ones_like(circle)
    for lam in points:
        g = g * (circle - complex(lam))
    return fro(G) / _circle_max(g)
