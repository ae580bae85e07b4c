"""Eigendecomposition of Hamiltonian blocks and ground-manifold classification."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla

from .hamiltonian import (HamiltonianBlock, SpinStarParams, build_block, field_diagonal,
                          spin_flip_permutation)

DEG_TOL = 1e-4
EXACT_DEG_TOL = 1e-10
PARITY_MIX_TOL = 1e-8

ND, DD, EDD = "ND", "DD", "EDD"


class EigensolverError(ArithmeticError):
    """LAPACK failed on a block; the message carries a fingerprint of the matrix."""


def fingerprint(matrix: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(matrix).tobytes()).hexdigest()[:16]


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    # parity (0/1) of the sector each eigenvector lives in
    sectors: np.ndarray = field(repr=False)


def _sectors(block: HamiltonianBlock) -> list[np.ndarray]:
    par = block.parity()
    return [np.flatnonzero(par == s) for s in (0, 1) if np.any(par == s)]


def _canonical_vectors(w: np.ndarray, v: np.ndarray, fz: np.ndarray) -> np.ndarray:
    """Fix the basis inside exactly degenerate clusters and the sign of every vector.

    A degenerate cluster (spacing <= ``EXACT_DEG_TOL``) is rotated onto
    eigenstates of ``J0z + Jpz``, which is conserved whenever such in-sector
    degeneracies occur (``gamma = 0``); without this the solver would return
    an arbitrary mixture.  Each vector's largest component is made positive.
    """
    v = v.copy()
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > EXACT_DEG_TOL:
            if i - start > 1:
                W = v[:, start:i]
                _, u = np.linalg.eigh(W.T @ (fz[:, None] * W))
                v[:, start:i] = W @ u
            start = i
    big = np.argmax(np.abs(v) > np.abs(v).max(axis=0) * (1 - 1e-9), axis=0)
    v *= np.where(v[big, np.arange(v.shape[1])] < 0, -1.0, 1.0)
    return v


def diagonalize(block: HamiltonianBlock) -> Spectrum:
    """Full spectrum, solving each parity sector independently.

    Eigenvectors are therefore exactly zero outside their own sector, and
    they are fixed uniquely (see ``_canonical_vectors``).
    """
    M = block.matrix
    fz = field_diagonal(block.params.n0, block.params.np)
    vals, vecs, secs = [], [], []
    for idx in _sectors(block):
        try:
            w, v = sla.eigh(M[np.ix_(idx, idx)])
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise EigensolverError(
                f"eigh failed for {block.params} (matrix {fingerprint(M)}): {exc}"
            ) from exc
        full = np.zeros((block.dim, len(idx)))
        full[idx] = _canonical_vectors(w, v, fz[idx])
        vals.append(w)
        vecs.append(full)
        secs.append(np.full(len(idx), block.parity()[idx[0]]))
    w = np.concatenate(vals)
    order = np.argsort(w, kind="stable")
    return Spectrum(w[order], np.hstack(vecs)[:, order], np.concatenate(secs)[order])


def _banded_lower(A: np.ndarray) -> np.ndarray:
    rows, cols = np.nonzero(np.tril(A))
    bw = int((rows - cols).max()) if rows.size else 0
    ab = np.zeros((bw + 1, A.shape[0]))
    for d in range(bw + 1):
        ab[d, : A.shape[0] - d] = np.diagonal(A, -d)
    return ab


def lowest_eigenvalues(block: HamiltonianBlock, k: int = 2) -> np.ndarray:
    """The ``k`` lowest eigenvalues of a block, via banded solves per sector.

    Ordering a sector by ``(l0 + lp, l0)`` makes it banded with bandwidth of
    order ``2 (n0 + 1)``, so this scales to peripheries of thousands of spins.
    """
    p = block.params
    out = []
    for idx in _sectors(block):
        l0, lp = np.divmod(idx, p.np + 1)
        idx = idx[np.lexsort((l0, l0 + lp))]
        A = block.matrix[np.ix_(idx, idx)]
        kk = min(k, len(idx))
        try:
            w = sla.eig_banded(_banded_lower(A), lower=True, eigvals_only=True,
                               select="i", select_range=(0, kk - 1))
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise EigensolverError(
                f"banded solve failed for {p} (matrix {fingerprint(block.matrix)}): {exc}"
            ) from exc
        out.append(w)
    return np.sort(np.concatenate(out))[:k]


@dataclass(frozen=True)
class GroundManifold:
    kind: str
    energies: tuple[float, float]
    gap: float
    # ND: [psi0]; DD/EDD: [psi_plus, psi_minus]
    states: list[np.ndarray] = field(repr=False)
    tgs: Optional[np.ndarray] = field(default=None, repr=False)
    parity_rotated: bool = False

    @property
    def degenerate(self) -> bool:
        return self.kind != ND

    def density(self) -> np.ndarray:
        """The static ground object: the (effective) thermal ground state, or ``|psi0><psi0|``."""
        if self.tgs is not None:
            return self.tgs
        psi = self.states[0]
        return np.outer(psi, psi.conj())


def classify_gap(gap: float, deg_tol: float = DEG_TOL) -> str:
    if gap <= EXACT_DEG_TOL:
        return DD
    if gap < deg_tol:
        return EDD
    return ND


def _rotate_by_parity(flip: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Diagonalize the spin-flip parity inside span{a, b}; returns (+1 state, -1 state)."""
    V = np.column_stack([a, b])
    P = V.conj().T @ V[flip]
    P = 0.5 * (P + P.conj().T)
    w, u = np.linalg.eigh(P)
    rot = V @ u
    return rot[:, 1], rot[:, 0]


def ground_manifold(spectrum: Spectrum, params: SpinStarParams,
                    deg_tol: float = DEG_TOL) -> GroundManifold:
    """Classify the ground space as ND, DD or EDD and build the thermal ground state.

    For ``n0 = 1`` and even ``np`` the degenerate pair is returned as the
    spin-flip parity eigenstates ``(psi_A1 +- psi_A2)/sqrt(2)``, with
    ``psi_A2`` the flip of ``psi_A1``. Otherwise the two lowest eigenvectors
    are used, ``+`` for the upper and ``-`` for the lower level.
    """
    if not deg_tol > 0:
        raise ValueError(f"deg_tol must be positive, got {deg_tol}")
    w, V = spectrum.eigenvalues, spectrum.eigenvectors
    if len(w) < 2:
        raise ValueError("need at least two levels to classify the ground manifold")
    e0, e1 = float(w[0]), float(w[1])
    gap = max(e1 - e0, 0.0)
    kind = classify_gap(gap, deg_tol)
    if kind == ND:
        return GroundManifold(kind, (e0, e1), gap, [V[:, 0]])

    rotated = False
    plus, minus = V[:, 1], V[:, 0]
    if params.n0 == 1:
        flip = spin_flip_permutation(1, params.np)
        if kind == DD and params.np % 2 == 0:
            # group A1 = odd number of down spins; its partner is the flipped state
            base = V[:, 0]
            if spectrum.sectors[0] == 1:
                a1, a2 = base, base[flip]
            else:
                a1, a2 = base[flip], base
            plus, minus = (a1 + a2) / np.sqrt(2), (a1 - a2) / np.sqrt(2)
            rotated = True
        elif abs(V[:, 0] @ V[flip, 1]) > PARITY_MIX_TOL:
            plus, minus = _rotate_by_parity(flip, V[:, 0], V[:, 1])
            rotated = True
    tgs = 0.5 * (np.outer(plus, plus.conj()) + np.outer(minus, minus.conj()))
    return GroundManifold(kind, (e0, e1), gap, [plus, minus], tgs, rotated)


def solve(params: SpinStarParams, deg_tol: float = DEG_TOL) -> GroundManifold:
    """Build, diagonalize and classify in one go (static, zero field)."""
    return ground_manifold(diagonalize(build_block(params)), params, deg_tol)


def energy_gap(params: SpinStarParams) -> tuple[float, float, float]:
    """``(E0, E1, E1 - E0)`` from the two lowest levels."""
    e0, e1 = lowest_eigenvalues(build_block(params), 2)
    return float(e0), float(e1), float(max(e1 - e0, 0.0))


def gap_scan(template: SpinStarParams, np_list: Sequence[int],
             tie_n0: bool = False) -> list[tuple[int, float]]:
    """Energy gap for each periphery size; ``tie_n0`` sets ``n0 = np`` at every point."""
    out = []
    for n in np_list:
        p = template.replace(np=int(n), n0=int(n) if tie_n0 else template.n0)
        out.append((int(n), energy_gap(p)[2]))
    return out


def critical_periphery_size(gamma: float, delta: float, threshold: float = DEG_TOL,
                            np_max: int = 1000, sign: int = 1) -> Optional[int]:
    """Largest odd ``np`` whose gap is still at least ``threshold``.

    Odd peripheries are scanned upward; at the first size whose gap drops
    below ``threshold`` the preceding odd size is returned, so every larger
    odd periphery is (effectively) degenerate.  ``None`` when the gap never
    drops below the threshold up to ``np_max``; ``0`` when it is already
    below at ``np = 1``.
    """
    template = SpinStarParams(n0=1, np=1, gamma=gamma, delta=delta, sign=sign)
    for n in range(1, int(np_max) + 1, 2):
        if energy_gap(template.replace(np=n))[2] < threshold:
            return n - 2 if n > 1 else 0
    return None
