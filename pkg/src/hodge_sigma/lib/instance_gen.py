"""Seeded generation of Hodge types and integral unimodular conjugators.

Randomness comes from numpy's ``PCG64`` bit generator. Each operation
seeds its own stream from ``SeedSequence([seed, stream])`` (stream 0
for Hodge types, 1 for conjugators), so equal configurations give
bitwise identical output on every platform numpy supports.

"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, NamedTuple

import dask.config
import numpy as np

from hodge_sigma.lib.hodge_ops import HodgeType, OperatorTriple, Summand, assemble
from hodge_sigma.lib.linalg import RealMatrix

log = logging.getLogger(__name__)

TYPE_STREAM = 0
CONJUGATOR_STREAM = 1


@dataclass(frozen=True)
class GenConfig:
    """Bounds for random instances.

    Parameters
    ----------
    seed : int
        Seed in ``[0, 2**64)``.
    max_abs_pq : int
        Bound on ``|p|`` and ``|q|``.
    max_dim : int
        Bound on the dimension of a generated type.
    conj_steps : int
        Number of attempted elementary row additions.
    conj_entry_bound : int
        Largest absolute entry a conjugator may reach.

    """

    seed: int
    max_abs_pq: int = 5
    max_dim: int = 20
    conj_steps: int = 30
    conj_entry_bound: int = 8

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.max_abs_pq < 0:
            raise ValueError(f"max_abs_pq must be nonnegative, got {self.max_abs_pq}")
        if self.max_dim < 1:
            raise ValueError(f"max_dim must be positive, got {self.max_dim}")
        if self.conj_steps < 0:
            raise ValueError(f"conj_steps must be nonnegative, got {self.conj_steps}")
        if self.conj_entry_bound < 1:
            raise ValueError(
                f"conj_entry_bound must be positive, got {self.conj_entry_bound}"
            )

    @classmethod
    def from_config(cls, seed: int, **overrides: Any) -> GenConfig:
        """Configuration with defaults from ``hodge-sigma.generate``."""
        defaults = {
            "max_abs_pq": dask.config.get("hodge-sigma.generate.max-abs-pq"),
            "max_dim": dask.config.get("hodge-sigma.generate.max-dim"),
            "conj_steps": dask.config.get("hodge-sigma.generate.conj-steps"),
            "conj_entry_bound": dask.config.get("hodge-sigma.generate.conj-entry-bound"),
        }
        defaults.update({k: v for k, v in overrides.items() if v is not None})
        return cls(seed=seed, **{k: int(v) for k, v in defaults.items()})

    def rng(self, stream: int) -> np.random.Generator:
        seq = np.random.SeedSequence([int(self.seed), stream])
        return np.random.Generator(np.random.PCG64(seq))


def random_hodge_type(cfg: GenConfig) -> HodgeType:
    """Random Hodge type of dimension between 1 and ``cfg.max_dim``.

    A target dimension is drawn first; summands with ``|p|, |q|`` at
    most ``cfg.max_abs_pq`` are then drawn uniformly until it is
    reached, restricting to ``p == q`` when one dimension is left.

    """
    rng = cfg.rng(TYPE_STREAM)
    m = cfg.max_abs_pq
    remaining = int(rng.integers(1, cfg.max_dim + 1))
    summands = []
    while remaining > 0:
        p = int(rng.integers(-m, m + 1))
        q = p if remaining == 1 else int(rng.integers(-m, m + 1))
        summands.append(Summand(max(p, q), min(p, q), 1))
        remaining -= 1 if p == q else 2
    return HodgeType(tuple(summands))


def random_unimodular(n: int, cfg: GenConfig) -> RealMatrix:
    """Random integral matrix of determinant +1 or -1.

    Starting from the identity, ``cfg.conj_steps`` row additions
    ``row_i += s * row_j`` with ``s`` in ``{-1, 1}`` are attempted;
    steps pushing an entry beyond ``cfg.conj_entry_bound`` are skipped.
    Finally a random row is multiplied by a random sign.

    """
    n = int(n)
    if n < 1:
        raise ValueError(f"conjugator dimension must be positive, got {n}")
    rng = cfg.rng(CONJUGATOR_STREAM)
    M = np.eye(n, dtype=np.int64)
    rejected = 0
    if n > 1:
        for _ in range(cfg.conj_steps):
            i, j = (int(k) for k in rng.choice(n, size=2, replace=False))
            s = 1 if rng.integers(2) else -1
            row = M[i] + s * M[j]
            if np.max(np.abs(row)) > cfg.conj_entry_bound:
                rejected += 1
                continue
            M[i] = row
    M[int(rng.integers(n))] *= 1 if rng.integers(2) else -1
    log.debug("unimodular %dx%d conjugator: %d steps rejected", n, n, rejected)
    return M.astype(np.float64)


class Instance(NamedTuple):
    hodge_type: HodgeType
    conjugator: RealMatrix | None
    triple: OperatorTriple


def random_instance(cfg: GenConfig, conjugate: bool = True) -> Instance:
    """A random type, optionally a conjugator, and the assembled operators."""
    ht = random_hodge_type(cfg)
    P = random_unimodular(ht.dimension, cfg) if conjugate else None
    return Instance(ht, P, assemble(ht, P))
