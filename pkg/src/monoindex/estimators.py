"""
Profile least-squares estimators of the index direction.

Four criteria are available, all built on the link estimate for a fixed
direction ``alpha``: the isotonic least-squares fit (LSE, SSE, ESE) or a
natural cubic smoothing spline (SPLINE). For ``d = 2`` the direction is
``(cos(beta), sin(beta))`` and ``beta`` is found by golden-section search.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np

from .isotonic import MonotoneStepFunction, isotonic_fitted_values
from .kernel import KernelSpec, default_bandwidth, smoothed_derivative
from .spline import (
    NaturalCubicSpline,
    default_penalty,
    eval_spline_derivative,
    fit_smoothing_spline_with_fitted,
)

INV_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class DegenerateDesignError(ValueError):
    """Raised when the projected covariates carry no information."""


class EstimatorKind(str, Enum):
    LSE = "lse"
    SSE = "sse"
    ESE = "ese"
    SPLINE = "spline"


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        Y = np.asarray(self.Y, dtype=float)
        if X.ndim != 2 or Y.ndim != 1 or X.shape[0] != Y.shape[0]:
            raise ValueError("X must be (n, d) and Y of length n")
        if X.shape[0] < 1:
            raise ValueError("empty dataset")
        if X.shape[1] < 2:
            raise ValueError("need d >= 2 covariates")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValueError("nonfinite input")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class SearchOptions:
    tol: float = 1e-6
    bracket: float = 0.3
    grid: int = 64
    kernel: KernelSpec = KernelSpec.EPANECHNIKOV
    bandwidth_const: float = 0.5
    mu_const: float = 0.1


@dataclass
class EstimateResult:
    kind: EstimatorKind
    alpha_hat: np.ndarray
    loss: float
    link: Union[MonotoneStepFunction, NaturalCubicSpline]
    evaluations: int
    trace: list = field(default_factory=list)

    @property
    def angle(self) -> float:
        return alpha_to_angle(self.alpha_hat)


def angle_to_alpha(beta: float) -> np.ndarray:
    return np.array([np.cos(beta), np.sin(beta)])


def alpha_to_angle(alpha) -> float:
    """Angle in (-pi, pi] of a two-dimensional unit vector."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (2,):
        raise ValueError("angle parameterization requires d = 2")
    beta = float(np.arctan2(alpha[1], alpha[0]))
    return np.pi if beta == -np.pi else beta


def _unit(alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    nrm = np.linalg.norm(alpha)
    if not nrm > 0:
        raise ValueError("direction must be nonzero")
    return alpha / nrm


# ---------------------------------------------------------------- criteria


def _isotonic_at(alpha, data: Dataset):
    t = data.X @ alpha
    f, fitted = isotonic_fitted_values(t, data.Y)
    return t, f, fitted


def lse_loss(alpha, data: Dataset) -> float:
    """Mean squared residual of the isotonic fit along ``alpha``."""
    _, _, fitted = _isotonic_at(_unit(alpha), data)
    r = data.Y - fitted
    return float(r @ r) / data.n


def sse_loss(alpha, data: Dataset) -> float:
    """Squared norm of ``mean((Y - psi_hat(alpha'X)) * X)``."""
    _, _, fitted = _isotonic_at(_unit(alpha), data)
    v = (data.Y - fitted) @ data.X / data.n
    return float(v @ v)


def ese_loss(
    alpha,
    data: Dataset,
    kernel: KernelSpec = KernelSpec.EPANECHNIKOV,
    h: Optional[float] = None,
    bandwidth_const: float = 0.5,
) -> float:
    """SSE criterion with each term weighted by the smoothed derivative.

    When ``h`` is None the bandwidth is recomputed from the projected range.
    """
    t, f, fitted = _isotonic_at(_unit(alpha), data)
    if h is None:
        span = float(t.max() - t.min())
        if span <= 0:
            raise DegenerateDesignError("degenerate design")
        h = default_bandwidth(data.n, span, bandwidth_const)
    deriv = smoothed_derivative(f, kernel, h, t)
    v = ((data.Y - fitted) * deriv) @ data.X / data.n
    return float(v @ v)


def _spline_at(alpha, data: Dataset, mu: Optional[float], mu_const: float):
    t = data.X @ alpha
    if mu is None:
        span = float(t.max() - t.min())
        if span <= 0:
            raise DegenerateDesignError("degenerate design")
        mu = default_penalty(data.n, span, mu_const)
    try:
        s, fitted = fit_smoothing_spline_with_fitted(t, data.Y, mu)
    except ValueError as exc:
        if "degenerate" in str(exc):
            raise DegenerateDesignError(str(exc)) from exc
        raise
    return t, s, fitted


def spline_score_loss(
    alpha, data: Dataset, mu: Optional[float] = None, mu_const: float = 0.1
) -> float:
    """Squared norm of ``mean((g(alpha'X) - Y) * X * g'(alpha'X))`` for the spline g."""
    t, s, fitted = _spline_at(_unit(alpha), data, mu, mu_const)
    v = ((fitted - data.Y) * eval_spline_derivative(s, t)) @ data.X / data.n
    return float(v @ v)


def criterion(kind: EstimatorKind, opts: SearchOptions = SearchOptions()):
    """The loss for ``kind`` as a function ``(alpha, data) -> float``."""
    kind = EstimatorKind(kind)
    if kind is EstimatorKind.LSE:
        return lse_loss
    if kind is EstimatorKind.SSE:
        return sse_loss
    if kind is EstimatorKind.ESE:
        return lambda a, data: ese_loss(
            a, data, opts.kernel, bandwidth_const=opts.bandwidth_const
        )
    return lambda a, data: spline_score_loss(a, data, mu_const=opts.mu_const)


def fit_link(kind: EstimatorKind, alpha, data: Dataset, opts: SearchOptions = SearchOptions()):
    """Link estimate used by ``kind`` at direction ``alpha``."""
    alpha = _unit(alpha)
    if EstimatorKind(kind) is EstimatorKind.SPLINE:
        return _spline_at(alpha, data, None, opts.mu_const)[1]
    return _isotonic_at(alpha, data)[1]


# ---------------------------------------------------------------- search


def golden_section(
    func: Callable[[float], float], lo: float, hi: float, tol: float = 1e-6
):
    """Minimize a scalar function on ``[lo, hi]`` by golden-section search.

    Returns ``(x_best, f_best, trace)``; the trace lists every ``(x, f(x))``
    evaluated, in order. The best evaluated point is returned, so the
    result never exceeds any value seen during the search.
    """
    trace = []

    def f(x):
        v = float(func(x))
        trace.append((x, v))
        return v

    a, b = float(lo), float(hi)
    c = b - INV_GOLDEN * (b - a)
    d = a + INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_GOLDEN * (b - a)
            fd = f(d)
    x_best, f_best = min(trace, key=lambda p: p[1])
    return x_best, f_best, trace


def grid_then_golden(func: Callable[[float], float], opts: SearchOptions = SearchOptions()):
    """Global search over the full circle: coarse grid, then golden section.

    The golden section runs on the two grid cells around the best grid
    angle. Returns ``(beta, loss, trace)``.
    """
    step = 2.0 * np.pi / opts.grid
    grid = [np.pi - k * step for k in range(opts.grid)]
    trace = [(b, float(func(b))) for b in grid]
    k = min(range(opts.grid), key=lambda i: trace[i][1])
    center = grid[k]
    x, fx, tr = golden_section(func, center - step, center + step, opts.tol)
    trace.extend(tr)
    beta, loss = min(trace, key=lambda p: p[1])
    return beta, loss, trace


def local_golden(
    func: Callable[[float], float], start: float, opts: SearchOptions = SearchOptions()
):
    """Golden section on ``[start - bracket, start + bracket]``.

    The start point is evaluated too, so the returned loss never exceeds
    the loss at ``start``. Returns ``(beta, loss, trace)``.
    """
    trace = [(start, float(func(start)))]
    _, _, tr = golden_section(func, start - opts.bracket, start + opts.bracket, opts.tol)
    trace.extend(tr)
    beta, loss = min(trace, key=lambda p: p[1])
    return beta, loss, trace


def _check_design(data: Dataset, opts: SearchOptions):
    step = 2.0 * np.pi / opts.grid
    for k in range(opts.grid):
        t = data.X @ angle_to_alpha(np.pi - k * step)
        if np.ptp(t) > 0:
            return
    raise DegenerateDesignError("degenerate design")


def profile_fit(
    kind: EstimatorKind,
    data: Dataset,
    opts: SearchOptions = SearchOptions(),
    keep_trace: bool = False,
) -> EstimateResult:
    """Profile least-squares estimate of the direction for ``d = 2``.

    LSE: grid over the circle refined by golden section. SSE, ESE and
    SPLINE: golden section in a bracket around the LSE angle.
    """
    kind = EstimatorKind(kind)
    if data.d != 2:
        raise ValueError("profile search is implemented for d = 2 only")
    if data.n < 3:
        raise ValueError("need at least 3 observations")
    _check_design(data, opts)

    def wrapped(loss_fn):
        def fn(beta):
            try:
                return loss_fn(angle_to_alpha(beta), data)
            except DegenerateDesignError:
                return np.inf

        return fn

    beta, loss, trace = grid_then_golden(wrapped(lse_loss), opts)
    if kind is not EstimatorKind.LSE:
        loss_fn = criterion(kind, opts)
        beta, loss, tr = local_golden(wrapped(loss_fn), beta, opts)
        trace = trace + tr
    if not np.isfinite(loss):
        raise DegenerateDesignError("degenerate design")
    alpha = angle_to_alpha(beta)
    return EstimateResult(
        kind=kind,
        alpha_hat=alpha,
        loss=loss,
        link=fit_link(kind, alpha, data, opts),
        evaluations=len(trace),
        trace=trace if keep_trace else [],
    )
