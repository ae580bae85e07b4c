"""Quench dynamics: switch on a uniform longitudinal field and follow the entanglement."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .entanglement import (Bipartition, localizable_entanglement, log_negativity,
                           trace_out_center)
from .hamiltonian import SpinStarParams, build_block
from .spectra import DEG_TOL, diagonalize, solve

E_KIND = "E"
LE_KIND = "<E>"


@dataclass(frozen=True)
class QuenchSpec:
    h: float = 1.0
    t_max: float = 200.0
    dt: float = 0.1
    avg_window: float = 0.5

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"quench field must be positive, got {self.h}")
        if not 0 < self.dt < self.t_max:
            raise ValueError(f"need 0 < dt < t_max, got dt={self.dt}, t_max={self.t_max}")
        if not 0 < self.avg_window <= 1:
            raise ValueError(f"avg_window must lie in (0, 1], got {self.avg_window}")

    def times(self) -> np.ndarray:
        n = int(np.floor(self.t_max / self.dt + 1e-9))
        return self.dt * np.arange(n + 1)


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    quantity: str = E_KIND

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")


class Evolution:
    """Spectral propagator of ``H_s + h (J0z + Jpz)`` acting on a fixed initial state.

    The total Hamiltonian is diagonalized once; ``rho(t)`` is then obtained
    by dephasing the initial state in that eigenbasis.
    """

    def __init__(self, rho0: np.ndarray, params: SpinStarParams, h: float):
        self.params = params.replace(h=h)
        self.rho0 = np.asarray(rho0)
        block = build_block(self.params)
        spec = diagonalize(block)
        self.hamiltonian = block.matrix
        self.energies = spec.eigenvalues
        self.V = spec.eigenvectors
        self._rho0_eig = self.V.T @ self.rho0 @ self.V
        self._dE = self.energies[:, None] - self.energies[None, :]

    def at(self, t: float) -> np.ndarray:
        if t == 0:
            return self.rho0.copy()
        phase = np.exp(-1j * self._dE * t)
        return self.V @ (self._rho0_eig * phase) @ self.V.T

    def energy(self, rho: np.ndarray) -> float:
        return float(np.trace(rho @ self.hamiltonian).real)


def evolve(rho0: np.ndarray, params: SpinStarParams, h: float, t: float) -> np.ndarray:
    """``exp(-i H_tot t) rho0 exp(i H_tot t)`` with ``H_tot = H_s + h (J0z + Jpz)``."""
    return Evolution(rho0, params, h).at(t)


def initial_state(params: SpinStarParams, deg_tol: float = DEG_TOL) -> np.ndarray:
    """Zero-field ground object: the ND ground state, or the (effective) thermal ground state."""
    return solve(params.replace(h=0.0), deg_tol).density()


def entanglement_series(params: SpinStarParams, bp: Bipartition, quench: QuenchSpec,
                        kind: str = E_KIND, rho0: Optional[np.ndarray] = None,
                        times: Optional[np.ndarray] = None) -> TimeSeries:
    """Peripheral entanglement after the quench, sampled on ``quench.times()``.

    ``kind`` is ``"E"`` (central spins traced out) or ``"<E>"`` (central spin
    measured in the fixed z basis).
    """
    if kind not in (E_KIND, LE_KIND):
        raise ValueError(f"kind must be 'E' or '<E>', got {kind!r}")
    if rho0 is None:
        rho0 = initial_state(params)
    evo = Evolution(rho0, params, quench.h)
    ts = quench.times() if times is None else np.asarray(times, dtype=float)
    vals = np.empty(len(ts))
    for i, t in enumerate(ts):
        rho = evo.at(t)
        if kind == E_KIND:
            vals[i] = log_negativity(trace_out_center(rho, params), bp).log_negativity
        else:
            vals[i] = localizable_entanglement(rho, params, bp).log_negativity
    return TimeSeries(ts, vals, kind)


def long_time_average(series: TimeSeries, window: float = 0.5) -> float:
    """Mean of the samples in the last ``window`` fraction of the time span."""
    if not 0 < window <= 1:
        raise ValueError(f"window must lie in (0, 1], got {window}")
    t = series.times
    if len(t) == 0:
        raise ValueError("empty series")
    start = t[-1] - window * (t[-1] - t[0])
    sel = t >= start - 1e-12 * max(abs(t[-1]), 1.0)
    if not np.any(sel):
        raise ValueError("averaging window holds no samples")
    return float(np.mean(series.values[sel]))
