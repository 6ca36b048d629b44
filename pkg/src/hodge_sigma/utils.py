from __future__ import annotations

import math
from collections.abc import Sequence
from enum import Enum
from typing import Any, NamedTuple

import dask.config


class NonIntegerInputError(ValueError):
    def __init__(self, value: Any) -> None:
        self.value = value
        super().__init__(
            f"{value!r} does not have integer real and imaginary parts"
        )


class NotALatticePoint(ValueError):
    def __init__(self, a: int, b: int) -> None:
        self.a = a
        self.b = b
        super().__init__(
            f"{a}{b:+d}i is not in Z(1-i) + Z(1+i): real and imaginary "
            "parts must have equal parity"
        )


class ResourceLimitError(RuntimeError):
    """Raised when a request would exceed a configured resource cap.

    The enumeration cap lives under ``hodge-sigma.lattice.max-points``;
    sigma tolerances that cannot be reached below that cap raise this
    error too.

    """


class PoleError(ZeroDivisionError):
    def __init__(self, z: complex, pole: complex) -> None:
        self.z = z
        self.pole = pole
        super().__init__(f"zeta has a pole at {pole!r}; got z={z!r}")


class DimensionMismatch(ValueError):
    def __init__(self, name: str, *shapes: tuple[int, ...]) -> None:
        msg = f"The inputs to {name} have incompatible shapes\n"
        for i, shape in enumerate(shapes):
            msg += f"- arg{i} shape: {shape}\n"
        super().__init__(msg)


class NonFiniteMatrixError(ValueError):
    pass


class SingularConjugator(ValueError):
    pass


class MixedWeightError(ValueError):
    pass


class DecompositionError(ValueError):
    pass


class InternalConsistencyError(ArithmeticError):
    """A quantity that is exact in theory drifted beyond tolerance.

    This almost always means the tolerance is misconfigured for the
    size or conditioning of the input.

    """


class ConjugateMultiplicityMismatch(InternalConsistencyError):
    def __init__(self, lam: complex, mult: int, conj_mult: int) -> None:
        self.lam = lam
        super().__init__(
            f"eigenvalue {lam} has multiplicity {mult} but its conjugate "
            f"has multiplicity {conj_mult}; check the tolerance"
        )


class WitnessKind(str, Enum):
    """Sum type naming why a verification check failed."""

    SPECTRUM_OFF_LATTICE = "SpectrumOffLattice"
    NOT_DIAGONALIZABLE = "NotDiagonalizable"
    COMMUTATOR = "CommutatorNonzero"
    SIN_E = "SinPiENonzero"
    SINH_T = "SinhPiTNonzero"
    PARITY = "ParityViolation"
    SUM = "SumMismatch"


class Witness(NamedTuple):
    kind: WitnessKind
    detail: str

    def to_dict(self) -> dict[str, str]:
        return {"kind": self.kind.value, "detail": self.detail}


class SpectrumError(ValueError):
    """Structural failure of the lattice spectrum solver.

    Attributes
    ----------
    kind : WitnessKind
        ``SPECTRUM_OFF_LATTICE`` or ``NOT_DIAGONALIZABLE``.
    found_dim : int
        Total dimension of the eigenspaces found at lattice points.
    n : int
        Dimension of the operator.
    witnesses : tuple[Witness, ...]
        Human readable details of the failure.

    """

    kind: WitnessKind = WitnessKind.SPECTRUM_OFF_LATTICE

    def __init__(
        self,
        found_dim: int,
        n: int,
        witnesses: Sequence[Witness] = (),
    ) -> None:
        self.found_dim = found_dim
        self.n = n
        self.witnesses = tuple(witnesses)
        msg = (
            f"{self.kind.value}: lattice eigenspaces span {found_dim} of {n} "
            "dimensions"
        )
        if self.witnesses:
            msg += " (" + "; ".join(w.detail for w in self.witnesses) + ")"
        super().__init__(msg)


class SpectrumOffLattice(SpectrumError):
    kind = WitnessKind.SPECTRUM_OFF_LATTICE


class NotDiagonalizable(SpectrumError):
    kind = WitnessKind.NOT_DIAGONALIZABLE


class HodgeTypeSyntaxError(ValueError):
    def __init__(self, text: str, offset: int, expected: str) -> None:
        self.text = text
        self.offset = offset
        token = text[offset : offset + 8] or "<end>"
        super().__init__(
            f"expected {expected} at offset {offset} in {text!r}, found {token!r}"
        )


class MatrixFileError(ValueError):
    pass


def resolve_tolerance(tol: float | None, key: str = "hodge-sigma.tolerance") -> float:
    """Return `tol`, or the configured default when it is None.

    Parameters
    ----------
    tol : float, optional
        Explicit tolerance.
    key : str
        Dask config key holding the default.

    Returns
    -------
    float
        A positive finite tolerance.

    Raises
    ------
    ValueError
        If the resolved tolerance is not positive and finite.

    """
    value = float(dask.config.get(key) if tol is None else tol)
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"tolerance must be positive and finite, got {value!r}")
    return value


def format_complex(z: complex, digits: int = 12) -> str:
    """Short, stable text for a complex number.

    Examples
    --------
    >>> format_complex(1.0000000000001)
    '1'
    >>> format_complex(1 - 2j)
    '1-2i'

    """
    re = round(z.real, digits) + 0.0
    im = round(z.imag, digits) + 0.0
    if im == 0:
        return f"{re:g}"
    if re == 0:
        return f"{im:g}i"
    return f"{re:g}{im:+g}i"
