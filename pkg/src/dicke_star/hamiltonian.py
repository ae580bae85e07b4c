"""Spin-star XYZ Hamiltonian restricted to the maximal collective sector.

The block acts on ``|D^{n0}_{l0}> (x) |D^{np}_{lp}>`` with the basis ordered
lexicographically in ``(l0, lp)``, i.e. index ``l0 * (np + 1) + lp``.
"""
from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .collective import DickeIndex, collective_operators

DEFAULT_DIM_CAP = 20_000
DIM_CAP_ENV = "DICKE_STAR_DIM_CAP"


class DimensionCapError(RuntimeError):
    """Raised when a block would exceed the configured dimension cap."""


def dimension_cap() -> int:
    value = os.environ.get(DIM_CAP_ENV)
    return int(value) if value else DEFAULT_DIM_CAP


@dataclass(frozen=True)
class SpinStarParams:
    """Model parameters: sizes, anisotropies, coupling sign and field.

    ``sign=+1`` is the ferromagnetic form of the dimensionless Hamiltonian,
    ``sign=-1`` the antiferromagnetic one.
    """

    n0: int = 1
    np: int = 2
    gamma: float = 0.0
    delta: float = 0.0
    sign: int = 1
    h: float = 0.0

    def __post_init__(self):
        if int(self.n0) != self.n0 or self.n0 < 1:
            raise ValueError(f"n0 must be a positive integer, got {self.n0}")
        if int(self.np) != self.np or self.np < 1:
            raise ValueError(f"np must be a positive integer, got {self.np}")
        if not -1.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [-1, 1], got {self.gamma}")
        if not -1.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [-1, 1], got {self.delta}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.h < 0:
            raise ValueError(f"field strength must be non-negative, got {self.h}")

    @property
    def n(self) -> int:
        return self.n0 + self.np

    @property
    def dim(self) -> int:
        return (self.n0 + 1) * (self.np + 1)

    def replace(self, **changes) -> "SpinStarParams":
        values = {k: getattr(self, k) for k in ("n0", "np", "gamma", "delta", "sign", "h")}
        values.update(changes)
        return SpinStarParams(**values)


@dataclass(frozen=True)
class HamiltonianBlock:
    params: SpinStarParams
    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def basis(self) -> list[tuple[int, int]]:
        """``(l0, lp)`` pairs in matrix order."""
        p = self.params
        return [(l0, lp) for l0 in range(p.n0 + 1) for lp in range(p.np + 1)]

    def labels(self) -> list[tuple[DickeIndex, DickeIndex]]:
        p = self.params
        return [(DickeIndex(p.n0, l0), DickeIndex(p.np, lp)) for l0, lp in self.basis]

    def parity(self) -> np.ndarray:
        """Parity of the total number of down spins for each basis state.

        Every term of the Hamiltonian changes ``l0 + lp`` by 0 or 2, so the
        matrix never couples states of different parity.
        """
        p = self.params
        l0, lp = np.divmod(np.arange(self.dim), p.np + 1)
        return (l0 + lp) % 2


@dataclass(frozen=True)
class ParityGrouping:
    """Reordering of the ``n0 = 1`` basis into the two parity groups."""

    permutation: np.ndarray
    sector_sizes: tuple[int, int]

    def apply(self, matrix: np.ndarray) -> np.ndarray:
        perm = self.permutation
        return matrix[np.ix_(perm, perm)]

    def groups(self) -> tuple[np.ndarray, np.ndarray]:
        s = self.sector_sizes[0]
        return self.permutation[:s], self.permutation[s:]


def _check_dim(params: SpinStarParams) -> None:
    cap = dimension_cap()
    if params.dim > cap:
        raise DimensionCapError(
            f"block dimension {params.dim} for n0={params.n0}, np={params.np} exceeds cap {cap} "
            f"(override with {DIM_CAP_ENV})"
        )


def field_diagonal(n0: int, np_: int) -> np.ndarray:
    """Diagonal of ``J0^z + Jp^z`` in the block basis."""
    m0 = (n0 - 2 * np.arange(n0 + 1)) / 2.0
    mp = (np_ - 2 * np.arange(np_ + 1)) / 2.0
    return (m0[:, None] + mp[None, :]).ravel()


def build_block(params: SpinStarParams) -> HamiltonianBlock:
    """Assemble the ``J0 = n0/2, Jp = np/2`` block of the spin-star Hamiltonian.

    ``sign * 1/2 [J0+ (Jp- + g Jp+) + J0- (Jp+ + g Jp-)] + sign * D J0z Jpz``
    plus ``h (J0z + Jpz)`` when a field is present.
    """
    _check_dim(params)
    z0, p0 = collective_operators(params.n0)
    zp, pp = collective_operators(params.np)
    g = params.gamma
    # J0+ (Jp- + g Jp+); the other half of the flip-flop term is its transpose
    upper = np.kron(p0, pp.T + g * pp)
    M = 0.5 * (upper + upper.T) + params.delta * np.kron(z0, zp)
    M *= params.sign
    if params.h:
        M[np.diag_indices_from(M)] += params.h * field_diagonal(params.n0, params.np)
    return HamiltonianBlock(params, M)


def parity_grouping(np_: int) -> ParityGrouping:
    """Split the ``n0 = 1`` basis into odd and even total down-spin parity.

    The first group holds the states with an odd number of down spins (this
    reproduces the groupings listed for ``np = 2`` and ``np = 3``), the
    second the rest. Within a group the canonical ``(l0, lp)`` order is kept.
    """
    if int(np_) != np_ or np_ < 1:
        raise ValueError(f"np must be a positive integer, got {np_}")
    idx = np.arange(2 * (np_ + 1))
    l0, lp = np.divmod(idx, np_ + 1)
    odd = (l0 + lp) % 2 == 1
    perm = np.concatenate([idx[odd], idx[~odd]])
    return ParityGrouping(perm, (int(odd.sum()), int((~odd).sum())))


def spin_flip_permutation(n0: int, np_: int) -> np.ndarray:
    """Index map of the global spin flip ``(l0, lp) -> (n0 - l0, np - lp)``.

    For ``n0 = 1`` this is the parity operator built from ``S^x`` on every
    spin (normalized to eigenvalues +-1); it commutes with the zero-field
    Hamiltonian.
    """
    l0, lp = np.divmod(np.arange((n0 + 1) * (np_ + 1)), np_ + 1)
    return (n0 - l0) * (np_ + 1) + (np_ - lp)


def write_matrix_csv(block: HamiltonianBlock, path) -> None:
    """Dump the non-zero entries as ``row,col,value`` for debugging."""
    rows, cols = np.nonzero(block.matrix)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "value"])
        for r, c in zip(rows, cols):
            w.writerow([int(r), int(c), repr(float(block.matrix[r, c]))])
