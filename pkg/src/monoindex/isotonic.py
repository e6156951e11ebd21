"""
Weighted isotonic least squares (pool adjacent violators) and step functions.

Fits a nondecreasing link to scattered (t, y) pairs. A decreasing link is
obtained by fitting ``-y`` and negating the levels.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np


class ScatterPoint(NamedTuple):
    t: float
    y: float


@dataclass(frozen=True)
class MonotoneStepFunction:
    """Nondecreasing step function with one level per distinct abscissa.

    ``knots`` are the distinct abscissae of the fitted data and ``levels``
    the fitted values there. Between knots the function keeps the value of
    the nearest knot to the left; outside ``[knots[0], knots[-1]]`` it is
    extended by the boundary levels.
    """

    knots: np.ndarray
    levels: np.ndarray

    def __post_init__(self):
        if self.knots.ndim != 1 or self.knots.shape != self.levels.shape:
            raise ValueError("knots and levels must be 1-d of equal length")
        if self.knots.size == 0:
            raise ValueError("empty dataset")
        if np.any(np.diff(self.knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if np.any(np.diff(self.levels) < 0):
            raise ValueError("levels must be nondecreasing")

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def jumps(self) -> tuple[np.ndarray, np.ndarray]:
        """Locations and sizes of the strictly positive level increments."""
        inc = np.diff(self.levels)
        nz = inc > 0
        return self.knots[1:][nz], inc[nz]

    def __call__(self, u):
        return eval_step(self, u)


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise ValueError("nonfinite input")


def pava(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Nondecreasing weighted least-squares fit to ``y`` (already ordered).

    Linear-time stack implementation of pool adjacent violators.
    """
    n = len(y)
    # block means, weights and sizes kept on a stack
    means = [0.0] * n
    weights = [0.0] * n
    sizes = [0] * n
    top = -1
    yl = y.tolist()
    wl = w.tolist()
    for i in range(n):
        m, ww, s = yl[i], wl[i], 1
        while top >= 0 and means[top] >= m:
            wt = weights[top] + ww
            m = (means[top] * weights[top] + m * ww) / wt
            ww = wt
            s += sizes[top]
            top -= 1
        top += 1
        means[top] = m
        weights[top] = ww
        sizes[top] = s
    return np.repeat(np.array(means[: top + 1]), sizes[: top + 1])


def pool_ties(t: np.ndarray, y: np.ndarray, w: np.ndarray):
    """Collapse equal abscissae into one point carrying the weighted mean.

    Returns ``(t_unique, y_pooled, w_pooled, inverse)`` where ``inverse``
    maps each original observation to its pooled index.
    """
    tu, inverse = np.unique(t, return_inverse=True)
    wp = np.bincount(inverse, weights=w, minlength=tu.size)
    yp = np.bincount(inverse, weights=w * y, minlength=tu.size) / wp
    return tu, yp, wp, inverse


def isotonic_fitted_values(t, y, w=None):
    """Isotonic fit together with the fitted value at every observation.

    Returns ``(step_function, fitted)`` where ``fitted[i]`` is the fitted
    value at ``t[i]`` in the original observation order.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size == 0:
        raise ValueError("empty dataset")
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("t and y must be 1-d of equal length")
    if w is None:
        w = np.ones_like(t)
    else:
        w = np.asarray(w, dtype=float)
        if w.shape != t.shape:
            raise ValueError("weights must match the number of points")
    _check_finite(t, y, w)
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    tu, yp, wp, inverse = pool_ties(t, y, w)
    levels = pava(yp, wp)
    return MonotoneStepFunction(tu, levels), levels[inverse]


def fit_isotonic(
    points: Sequence[ScatterPoint] | np.ndarray,
    weights: Optional[Sequence[float]] = None,
) -> MonotoneStepFunction:
    """Weighted isotonic regression of y on t.

    Parameters
    ----------
    points : sequence of ScatterPoint or array of shape (n, 2)
        The (t, y) pairs.
    weights : sequence of float, optional
        Positive weights; all ones when omitted.

    Returns
    -------
    MonotoneStepFunction
        Minimizer of ``sum w_i (y_i - psi(t_i))**2`` over nondecreasing psi.
    """
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        raise ValueError("empty dataset")
    arr = arr.reshape(-1, 2)
    f, _ = isotonic_fitted_values(arr[:, 0], arr[:, 1], weights)
    return f


def eval_step(f: MonotoneStepFunction, u):
    """Evaluate ``f`` at ``u`` (scalar or array).

    A knot takes its own level; between knots the level of the left knot
    applies; constant extension beyond the outer knots.
    """
    u_arr = np.asarray(u, dtype=float)
    _check_finite(u_arr)
    idx = np.searchsorted(f.knots, u_arr, side="right") - 1
    out = f.levels[np.clip(idx, 0, f.knots.size - 1)]
    return float(out) if out.ndim == 0 else out
