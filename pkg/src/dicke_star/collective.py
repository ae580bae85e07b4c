"""Combinatorics of qubit Dicke states.

A Dicke state ``|D^n_l>`` is the normalized symmetric state of ``n`` qubits
with ``l`` spins down; it is the ``|J=n/2, m=n/2-l>`` member of the maximal
collective-spin multiplet.  Half-integer quantum numbers are carried around
internally as twice their value so that all bookkeeping stays integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

MAX_BINOMIAL_N = 10_000


@dataclass(frozen=True)
class DickeIndex:
    """Label of ``|D^n_l>``; ``m = n/2 - l``."""

    n: int
    l: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"spin count must be positive, got {self.n}")
        if not 0 <= self.l <= self.n:
            raise ValueError(f"need 0 <= l <= n, got l={self.l}, n={self.n}")

    @property
    def m(self) -> Fraction:
        return Fraction(self.n - 2 * self.l, 2)


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k) as a Python integer.

    Raises ``ValueError`` for negative arguments, ``k > n`` or ``n`` beyond
    ``MAX_BINOMIAL_N``.
    """
    n, k = int(n), int(k)
    if n < 0 or k < 0:
        raise ValueError(f"binomial arguments must be non-negative, got ({n}, {k})")
    if k > n:
        raise ValueError(f"binomial needs k <= n, got ({n}, {k})")
    if n > MAX_BINOMIAL_N:
        raise ValueError(f"n={n} exceeds the configured maximum {MAX_BINOMIAL_N}")
    return math.comb(n, k)


def _twice(x) -> int:
    """Convert an integer or half-integer to twice its value, exactly."""
    tx = Fraction(x) * 2
    if tx.denominator != 1:
        raise ValueError(f"{x!r} is not an integer or half-integer")
    return int(tx)


def _ladder_twice(tj: int, tm: int, raise_: bool) -> float:
    # sqrt(J(J+1) - m(m+-1)) with J = tj/2, m = tm/2
    if tj < 0 or abs(tm) > tj or (tj - tm) % 2:
        raise ValueError(f"invalid (J, m) = ({tj}/2, {tm}/2)")
    arg = tj * (tj + 2) - tm * (tm + 2 if raise_ else tm - 2)
    return math.sqrt(arg) / 2.0


def ladder_coeff(J, m, direction: str = "raise") -> float:
    """Matrix element of ``J^+`` or ``J^-`` acting on ``|J, m>``.

    Returns ``sqrt(J(J+1) - m(m +- 1))``, which is exactly zero at the top
    (raise) or bottom (lower) of the multiplet.
    """
    if direction not in ("raise", "lower"):
        raise ValueError(f"direction must be 'raise' or 'lower', got {direction!r}")
    return _ladder_twice(_twice(J), _twice(m), direction == "raise")


def collective_operators(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(J^z, J^+)`` on the ``n+1`` Dicke states ``|D^n_0>..|D^n_n>``.

    Index ``l`` carries ``m = n/2 - l``; ``J^+`` maps ``l`` to ``l - 1``.
    ``J^-`` is the transpose of ``J^+``.
    """
    jz = np.diag((n - 2 * np.arange(n + 1)) / 2.0)
    jplus = np.zeros((n + 1, n + 1))
    for l in range(1, n + 1):
        jplus[l - 1, l] = _ladder_twice(n, n - 2 * l, True)
    return jz, jplus


@lru_cache(maxsize=4096)
def _split_row(n_total: int, n_left: int, l: int) -> tuple[tuple[int, float], ...]:
    n_right = n_total - n_left
    denom = math.comb(n_total, l)
    out = []
    for k in range(max(0, l - n_right), min(l, n_left) + 1):
        # int / int is correctly rounded, so no overflow for any size
        out.append((k, math.sqrt(math.comb(n_left, k) * math.comb(n_right, l - k) / denom)))
    return tuple(out)


def dicke_split_coeff(n_total: int, n_left: int, l: int, k: int) -> float:
    """Amplitude of ``|D^{n_left}_k> (x) |D^{n_total-n_left}_{l-k}>`` in ``|D^{n_total}_l>``."""
    if not 1 <= n_left < n_total:
        raise ValueError(f"need 1 <= n_left < n_total, got n_left={n_left}, n_total={n_total}")
    if not 0 <= l <= n_total:
        raise ValueError(f"need 0 <= l <= n_total, got l={l}")
    if n_total > MAX_BINOMIAL_N:
        raise ValueError(f"n_total={n_total} exceeds the configured maximum {MAX_BINOMIAL_N}")
    for kk, c in _split_row(n_total, n_left, l):
        if kk == k:
            return c
    return 0.0


def split_isometry(n_total: int, n_left: int) -> np.ndarray:
    """Isometry from the ``n_total`` Dicke space into the product of two Dicke spaces.

    Row index is ``k * (n_total - n_left + 1) + j`` for ``|D^{n_left}_k>|D^{n_right}_j>``;
    column index is ``l``.
    """
    if not 1 <= n_left < n_total:
        raise ValueError(f"need 1 <= n_left < n_total, got n_left={n_left}, n_total={n_total}")
    n_right = n_total - n_left
    V = np.zeros(((n_left + 1) * (n_right + 1), n_total + 1))
    for l in range(n_total + 1):
        for k, c in _split_row(n_total, n_left, l):
            V[k * (n_right + 1) + (l - k), l] = c
    return V
