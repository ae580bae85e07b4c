"""Peripheral bipartite entanglement in the Dicke basis.

The central spins are either traced out or projectively measured; the
resulting peripheral state is embedded into ``|D^{n'}_k> (x) |D^{np-n'}_j>``
and its logarithmic negativity across ``B1:B2`` is computed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import scipy.optimize as sopt
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .collective import split_isometry
from .hamiltonian import SpinStarParams
from .spectra import ND, GroundManifold, solve

NEG_CLIP = 1e-10
MIN_PROB = 1e-12
# a refined setting replaces the grid optimum only if it gains more than this
REFINE_GAIN = 1e-12


class UnsupportedConfigurationError(NotImplementedError):
    pass


@dataclass(frozen=True)
class PeripheralState:
    np: int
    rho: np.ndarray = field(repr=False)

    def check(self, herm_tol: float = 1e-12, trace_tol: float = 1e-12,
              psd_tol: float = 1e-10) -> None:
        """Raise ``ValueError`` unless the matrix is a valid density matrix."""
        r = self.rho
        if r.shape != (self.np + 1, self.np + 1):
            raise ValueError(f"rho has shape {r.shape}, expected {(self.np + 1,) * 2}")
        if np.max(np.abs(r - r.conj().T)) > herm_tol:
            raise ValueError("rho is not Hermitian")
        if abs(np.trace(r).real - 1.0) > trace_tol:
            raise ValueError(f"rho has trace {np.trace(r).real!r}")
        if np.linalg.eigvalsh(r)[0] < -psd_tol:
            raise ValueError("rho has a negative eigenvalue")


@dataclass(frozen=True)
class Bipartition:
    """``B1`` holds the first ``n_prime`` peripheral spins."""

    np: int
    n_prime: int

    def __post_init__(self):
        if not 1 <= self.n_prime <= self.np // 2:
            raise ValueError(f"need 1 <= n' <= np//2, got n'={self.n_prime}, np={self.np}")

    @property
    def complement(self) -> int:
        return self.np - self.n_prime

    @classmethod
    def half(cls, np_: int) -> "Bipartition":
        """``n' = np/2`` for even ``np`` and ``(np-1)/2`` for odd ``np``."""
        return cls(np_, np_ // 2)


@dataclass(frozen=True)
class MeasurementSetting:
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2 * np.pi:
            raise ValueError(f"phi must lie in [0, 2 pi), got {self.phi}")

    def kets(self) -> tuple[np.ndarray, np.ndarray]:
        """Outcome kets in the ``{|0>, |1>} = {|+1/2>, |-1/2>}`` basis."""
        c, s = np.cos(self.theta / 2), np.sin(self.theta / 2)
        ph = np.exp(1j * self.phi)
        return np.array([c, ph * s]), np.array([s, -ph * c])


@dataclass(frozen=True)
class EntanglementResult:
    negativity: float
    log_negativity: float
    kind: str = "partial-trace"
    setting: Optional[MeasurementSetting] = None


# --- partial trace and embedding -------------------------------------------

def trace_out_center(state: np.ndarray, params: SpinStarParams) -> PeripheralState:
    """Reduced state of the periphery from a block vector or density matrix."""
    d0, dp = params.n0 + 1, params.np + 1
    state = np.asarray(state)
    if state.ndim == 1:
        if state.shape != (d0 * dp,):
            raise ValueError(f"state of length {state.shape[0]} does not match block dim {d0 * dp}")
        C = state.reshape(d0, dp)
        rho = C.T @ C.conj()
    elif state.ndim == 2:
        if state.shape != (d0 * dp, d0 * dp):
            raise ValueError(f"state of shape {state.shape} does not match block dim {d0 * dp}")
        rho = np.einsum("iaib->ab", state.reshape(d0, dp, d0, dp))
    else:
        raise ValueError("state must be a vector or a matrix")
    return PeripheralState(params.np, rho)


def embed_bipartition(ps: PeripheralState, bp: Bipartition) -> np.ndarray:
    """Peripheral state written over ``|D^{n'}_k> (x) |D^{np-n'}_j>`` (index ``k * (np-n'+1) + j``)."""
    if ps.np != bp.np:
        raise ValueError(f"state has np={ps.np} but bipartition has np={bp.np}")
    V = split_isometry(bp.np, bp.n_prime)
    return V @ ps.rho @ V.T


def partial_transpose(rho: np.ndarray, dims: tuple[int, int], side: int = 0) -> np.ndarray:
    """Transpose the ``side`` factor (0 = left) of a bipartite matrix."""
    da, db = dims
    R = rho.reshape(da, db, da, db)
    R = R.transpose(2, 1, 0, 3) if side == 0 else R.transpose(0, 3, 2, 1)
    return R.reshape(da * db, da * db)


def blockwise_eigvalsh(M: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, split along its exact zero pattern."""
    ncomp, labels = connected_components(csr_matrix(M != 0), directed=False)
    if ncomp == 1:
        return np.linalg.eigvalsh(M)
    out = []
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        out.append(np.linalg.eigvalsh(M[np.ix_(idx, idx)]) if len(idx) > 1 else M[idx, idx].real)
    return np.sort(np.concatenate(out))


def negativity_from_matrix(rho: np.ndarray, dims: tuple[int, int], side: int = 0) -> float:
    """``2 |sum of negative eigenvalues|`` of the partial transpose.

    Eigenvalues in ``[-NEG_CLIP, 0)`` are treated as round-off and ignored.
    """
    w = blockwise_eigvalsh(partial_transpose(rho, dims, side))
    neg = w[w < -NEG_CLIP]
    return float(2.0 * abs(neg.sum()))


def _dims(bp: Bipartition) -> tuple[int, int]:
    return bp.n_prime + 1, bp.complement + 1


def log_negativity(ps: PeripheralState, bp: Bipartition) -> EntanglementResult:
    neg = negativity_from_matrix(embed_bipartition(ps, bp), _dims(bp))
    return EntanglementResult(neg, float(np.log2(neg + 1.0)))


# --- central-spin measurements ------------------------------------------------

def measured_ensemble(state: np.ndarray, params: SpinStarParams,
                      setting: MeasurementSetting) -> list[tuple[float, PeripheralState]]:
    """Post-measurement peripheral ensemble after measuring the central spin."""
    if params.n0 != 1:
        raise UnsupportedConfigurationError("central-spin measurements are implemented for n0 = 1 only")
    d = params.np + 1
    state = np.asarray(state)
    if state.ndim == 1:
        state = np.outer(state, state.conj())
    if state.shape != (2 * d, 2 * d):
        raise ValueError(f"state of shape {state.shape} does not match block dim {2 * d}")
    R = state.reshape(2, d, 2, d)
    raw = []
    for ket in setting.kets():
        M = np.einsum("a,b,aibj->ij", ket.conj(), ket, R)
        if not np.any(M.imag):
            M = M.real
        p = float(np.trace(M).real)
        raw.append((p, M))
    kept = [(p, M) for p, M in raw if p >= MIN_PROB]
    total = sum(p for p, _ in kept)
    return [(p / total, PeripheralState(params.np, M / p)) for p, M in kept]


def measured_average(state: np.ndarray, params: SpinStarParams, bp: Bipartition,
                     setting: MeasurementSetting) -> float:
    """``sum_k p_k L(rho_k)`` for one measurement setting."""
    return float(sum(p * log_negativity(ps, bp).log_negativity
                     for p, ps in measured_ensemble(state, params, setting)))


def _fold(theta: float, phi: float) -> MeasurementSetting:
    theta = float(np.mod(theta, 2 * np.pi))
    if theta > np.pi:
        theta, phi = 2 * np.pi - theta, phi + np.pi
    return MeasurementSetting(theta, float(np.mod(phi, 2 * np.pi)))


def localizable_entanglement(state: np.ndarray, params: SpinStarParams, bp: Bipartition,
                             strategy: Union[str, tuple[str, int]] = "fixed-z",
                             refine: bool = True) -> EntanglementResult:
    """Measurement-averaged entanglement maximized over the central-spin basis.

    ``strategy="fixed-z"`` measures in ``{|0>, |1>}`` only. ``("grid", N)``
    scans an ``N x N`` grid of ``(theta, phi)`` (which contains ``theta = 0``)
    and, if ``refine``, polishes the best point with Nelder-Mead.  Ties are
    broken toward the smallest ``(theta, phi)``.
    """
    if strategy == "fixed-z":
        settings = [MeasurementSetting()]
        refine = False
    else:
        name, n_grid = strategy
        if name != "grid" or n_grid < 1:
            raise ValueError(f"unknown strategy {strategy!r}")
        thetas = np.linspace(0.0, np.pi, n_grid) if n_grid > 1 else np.array([0.0])
        phis = 2 * np.pi * np.arange(n_grid) / n_grid
        settings = [MeasurementSetting(t, p) for t in thetas for p in phis]

    scored = [(measured_average(state, params, bp, s), s) for s in settings]
    best_val, best = max(scored, key=lambda vs: (vs[0], -vs[1].theta, -vs[1].phi))

    if refine:
        res = sopt.minimize(
            lambda x: -measured_average(state, params, bp, _fold(*x)),
            x0=[best.theta, best.phi], method="Nelder-Mead",
            options={"xatol": 1e-6, "fatol": 1e-10, "maxiter": 400},
        )
        if -res.fun > best_val + REFINE_GAIN:
            best_val, best = float(-res.fun), _fold(*res.x)
    neg = 2.0 ** best_val - 1.0
    return EntanglementResult(neg, best_val, "measured-average", best)


# --- ground-state entanglement -----------------------------------------------

def static_entanglement(manifold: GroundManifold, params: SpinStarParams, bp: Bipartition,
                        measured: bool = True) -> tuple[float, Optional[float]]:
    """``(E, <E>)`` of the static ground object; ``<E>`` uses the fixed-z basis."""
    rho = manifold.density()
    E = log_negativity(trace_out_center(rho, params), bp).log_negativity
    LE = None
    if measured and params.n0 == 1:
        LE = localizable_entanglement(rho, params, bp).log_negativity
    return E, LE


def edd_entanglement_gap(params: SpinStarParams, bp: Bipartition,
                         manifold: Optional[GroundManifold] = None,
                         force: bool = False) -> tuple[float, float]:
    """Differences of ``E`` and ``<E>`` (fixed-z) between the two (E)DD ground states.

    With ``force=True`` a non-degenerate manifold is accepted and its two
    lowest eigenstates are compared, which is what size sweeps through the
    ND regime need.
    """
    if params.n0 != 1:
        raise UnsupportedConfigurationError("EDD entanglement gaps are defined for n0 = 1")
    if manifold is None:
        manifold = solve(params, deg_tol=np.inf) if force else solve(params)
    if manifold.kind == ND and not force:
        raise ValueError(f"ground manifold is non-degenerate (gap {manifold.gap:.3g})")
    Es, LEs = [], []
    for psi in manifold.states:
        Es.append(log_negativity(trace_out_center(psi, params), bp).log_negativity)
        LEs.append(localizable_entanglement(psi, params, bp).log_negativity)
    return abs(Es[0] - Es[1]), abs(LEs[0] - LEs[1])
