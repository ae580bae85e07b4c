"""Brute-force reference in the full 2^n computational basis (n <= 11).

Nothing here touches the collective machinery: the Hamiltonian is a plain
sum of Kronecker products of Pauli matrices, reduced states come from
reshaping, and negativities from dense eigenvalues.  Spins ``0..n0-1`` are
central, ``n0..n-1`` peripheral; ``|0> = |+1/2>`` is the first basis state.
"""
from __future__ import annotations

from functools import reduce

import numpy as np

from .hamiltonian import SpinStarParams

MAX_SPINS = 11

_SX = np.array([[0.0, 1.0], [1.0, 0.0]]) / 2
_SY = np.array([[0.0, -1j], [1j, 0.0]]) / 2
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]]) / 2


class OracleSizeError(RuntimeError):
    pass


def _check(n: int) -> None:
    if n > MAX_SPINS:
        raise OracleSizeError(f"oracle is capped at {MAX_SPINS} spins, got {n}")


def site_operator(op: np.ndarray, site: int, n: int) -> np.ndarray:
    return reduce(np.kron, [op if i == site else np.eye(2) for i in range(n)])


def full_hamiltonian(params: SpinStarParams) -> np.ndarray:
    """Dimensionless spin-star Hamiltonian on all 2^n states (real symmetric)."""
    n0, n = params.n0, params.n
    _check(n)
    g, d = params.gamma, params.delta
    S = {a: [site_operator(op, i, n) for i in range(n)] for a, op in (("x", _SX), ("y", _SY), ("z", _SZ))}
    H = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for i in range(n0):
        for j in range(n0, n):
            H += (1 + g) * S["x"][i] @ S["x"][j]
            H += (1 - g) * S["y"][i] @ S["y"][j]
            H += d * S["z"][i] @ S["z"][j]
    H *= params.sign
    if params.h:
        H += params.h * sum(S["z"])
    assert np.max(np.abs(H.imag)) < 1e-14
    return H.real


def ground_object(params: SpinStarParams, pipeline: str = "static",
                  deg_tol: float = 1e-4) -> tuple[np.ndarray, np.ndarray]:
    """``(eigenvalues, rho)``: full spectrum and the ground density matrix.

    ``pipeline="static"`` uses the pure ground state when the gap is at least
    ``deg_tol`` and the equal mixture of the two lowest states otherwise;
    ``"tgs"`` always uses the mixture.
    """
    w, v = np.linalg.eigh(full_hamiltonian(params))
    if pipeline not in ("static", "tgs"):
        raise ValueError(f"unknown pipeline {pipeline!r}")
    if pipeline == "tgs" or w[1] - w[0] < deg_tol:
        rho = 0.5 * (np.outer(v[:, 0], v[:, 0]) + np.outer(v[:, 1], v[:, 1]))
    else:
        rho = np.outer(v[:, 0], v[:, 0])
    return w, rho


def trace_center(rho: np.ndarray, n0: int, np_: int) -> np.ndarray:
    R = rho.reshape(2 ** n0, 2 ** np_, 2 ** n0, 2 ** np_)
    return np.trace(R, axis1=0, axis2=2)


def negativity(rho_p: np.ndarray, np_: int, n_prime: int) -> float:
    """Negativity across the first ``n_prime`` peripheral spins versus the rest."""
    da, db = 2 ** n_prime, 2 ** (np_ - n_prime)
    pt = rho_p.reshape(da, db, da, db).transpose(2, 1, 0, 3).reshape(da * db, da * db)
    w = np.linalg.eigvalsh(pt)
    return float(2 * abs(w[w < -1e-10].sum()))


def log_negativity(rho_p: np.ndarray, np_: int, n_prime: int) -> float:
    return float(np.log2(negativity(rho_p, np_, n_prime) + 1))


def full_entanglement(params: SpinStarParams, n_prime: int, pipeline: str = "static") -> float:
    """Logarithmic negativity of the peripheral ground object across ``n_prime : np - n_prime``."""
    _, rho = ground_object(params, pipeline)
    return log_negativity(trace_center(rho, params.n0, params.np), params.np, n_prime)


def measured_average(rho: np.ndarray, params: SpinStarParams, n_prime: int,
                     theta: float = 0.0, phi: float = 0.0) -> tuple[float, list[float]]:
    """Average peripheral log-negativity after measuring the single central spin.

    Returns the average and the outcome probabilities.
    """
    if params.n0 != 1:
        raise ValueError("oracle measurement is for a single central spin")
    c, s, ph = np.cos(theta / 2), np.sin(theta / 2), np.exp(1j * phi)
    dp = 2 ** params.np
    R = rho.reshape(2, dp, 2, dp)
    total, probs = 0.0, []
    for ket in (np.array([c, ph * s]), np.array([s, -ph * c])):
        M = np.einsum("a,b,aibj->ij", ket.conj(), ket, R)
        p = float(np.trace(M).real)
        probs.append(p)
        if p > 1e-12:
            total += p * log_negativity(M / p, params.np, n_prime)
    return total, probs


def spin_flip(n: int) -> np.ndarray:
    """``sigma_x`` on every spin."""
    return reduce(np.kron, [np.array([[0.0, 1.0], [1.0, 0.0]])] * n)


def swap_sites(n: int, i: int, j: int) -> np.ndarray:
    """Permutation matrix exchanging spins ``i`` and ``j``."""
    dim = 2 ** n
    P = np.zeros((dim, dim))
    for s in range(dim):
        bits = [(s >> (n - 1 - k)) & 1 for k in range(n)]
        bits[i], bits[j] = bits[j], bits[i]
        t = int("".join(map(str, bits)), 2)
        P[t, s] = 1.0
    return P


def dicke_vector(n: int, l: int) -> np.ndarray:
    """``|D^n_l>`` in the computational basis (``l`` spins in ``|1>``)."""
    v = np.zeros(2 ** n)
    for s in range(2 ** n):
        if bin(s).count("1") == l:
            v[s] = 1.0
    return v / np.linalg.norm(v)
