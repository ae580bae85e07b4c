"""Least-squares fits of the four scaling laws used for gaps and entanglement."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

M_BOUNDS = (1e-6, 4.0)
GRAD_TOL = 1e-6


class FitModel(enum.Enum):
    POWER = "power"          # a + b x^-m
    EXPDECAY = "expdecay"    # a + exp(-b x^m)
    LOG2 = "log2"            # a + b log2 x
    SATURATE = "saturate"    # a (1 - exp(-b x^m))

    @property
    def n_params(self) -> int:
        return 2 if self is FitModel.LOG2 else 3

    def __call__(self, x, a, b, m=None):
        x = np.asarray(x, dtype=float)
        if self is FitModel.POWER:
            return a + b * x ** (-m)
        if self is FitModel.EXPDECAY:
            return a + np.exp(-b * x ** m)
        if self is FitModel.LOG2:
            return a + b * np.log2(x)
        return a * (1.0 - np.exp(-b * x ** m))


@dataclass(frozen=True)
class FitResult:
    model: FitModel
    a: float
    b: float
    m: Optional[float]
    rmse: float
    n_points: int
    converged: bool

    @property
    def params(self) -> tuple:
        return (self.a, self.b) if self.m is None else (self.a, self.b, self.m)

    def predict(self, x):
        return self.model(x, *self.params)


def _prepare(data) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(sorted((float(x), float(y)) for x, y in data), dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("no data to fit")
    x, y = arr[:, 0], arr[:, 1]
    if np.any(x <= 0):
        raise ValueError("all abscissae must be positive")
    if not np.all(np.isfinite(y)):
        raise ValueError("ordinates must be finite")
    return x, y


def _rmse(r: np.ndarray) -> float:
    return float(np.sqrt(np.mean(r * r)))


def _fit_log2(x, y) -> FitResult:
    A = np.column_stack([np.ones_like(x), np.log2(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    a, b = map(float, coef)
    return FitResult(FitModel.LOG2, a, b, None, _rmse(A @ coef - y), len(x), True)


def _starts(model: FitModel, x, y, multistart: int):
    n = max(int(multistart), 1)
    k = max(int(round(np.sqrt(n))), 1)
    bs = np.logspace(-2, 1, k)
    ms = np.logspace(np.log10(0.2), np.log10(3.0), max(n // k, 1))
    if model is FitModel.SATURATE:
        a0 = y[np.argmax(np.abs(y))]
    else:
        a0 = y[-1]
    for b in bs:
        for m in ms:
            yield np.array([a0, b, m])
    if model is FitModel.POWER:
        # b matched to the first point for each exponent, a = 0
        for m in ms:
            yield np.array([0.0, y[0] * x[0] ** m, m])


def fit(model: FitModel, data: Sequence[tuple[float, float]], multistart: int = 36) -> FitResult:
    """Best least-squares fit of ``model`` to ``(x, y)`` pairs.

    Nonlinear forms are solved by a bounded trust-region Gauss-Newton method
    from a deterministic grid of starts in ``(b, m)``; ``m`` is confined to
    ``(0, 4]``.  ``LOG2`` is linear and solved in closed form.  The input
    order does not affect the result.
    """
    if not isinstance(model, FitModel):
        model = FitModel(model)
    x, y = _prepare(data)
    if len(x) < model.n_params + 1:
        raise ValueError(f"{model.name} needs at least {model.n_params + 1} points, got {len(x)}")
    if model is FitModel.LOG2:
        return _fit_log2(x, y)

    def resid(p):
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            r = model(x, *p) - y
        return np.where(np.isfinite(r), r, 1e150)

    lo = [-np.inf, -np.inf, M_BOUNDS[0]]
    hi = [np.inf, np.inf, M_BOUNDS[1]]
    if model in (FitModel.EXPDECAY, FitModel.SATURATE):
        lo[1] = 0.0
    best = None
    for p0 in _starts(model, x, y, multistart):
        p0 = np.clip(p0, [l + 1e-12 if np.isfinite(l) else -np.inf for l in lo], hi)
        try:
            res = least_squares(resid, p0, bounds=(lo, hi), method="trf",
                                x_scale="jac", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                                max_nfev=4000)
        except (ValueError, FloatingPointError):
            continue
        r = resid(res.x)
        key = (_rmse(r), *res.x)
        if best is None or key < best[0]:
            best = (key, res)
    if best is None:
        return FitResult(model, float("nan"), float("nan"), float("nan"), float("inf"), len(x), False)
    (rmse, a, b, m), res = best
    # first-order optimality, measured relative to the residual scale
    grad = res.jac.T @ res.fun
    scale = max(np.linalg.norm(res.fun) * np.linalg.norm(res.jac), 1e-300)
    at_bound = np.any(res.active_mask != 0)
    converged = bool(res.status > 0 and (at_bound or np.linalg.norm(grad) <= GRAD_TOL * scale + 1e-14))
    return FitResult(model, float(a), float(b), float(m), rmse, len(x), converged)
