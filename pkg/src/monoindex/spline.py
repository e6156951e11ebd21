"""
Natural cubic smoothing spline (Reinsch algorithm).

Minimizes ``sum w_i (y_i - g(t_i))**2 + mu * integral g''(x)**2 dx`` over
twice-differentiable g. The solution is a natural cubic spline with knots
at the distinct abscissae, parameterized by its values and second
derivatives at the knots. Beyond the outer knots the spline is continued
linearly.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .isotonic import pool_ties

KNOT_TOL = 1e-6


@dataclass(frozen=True)
class NaturalCubicSpline:
    knots: np.ndarray
    values: np.ndarray
    second_derivs: np.ndarray

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def __call__(self, u):
        return eval_spline(self, u)

    def derivative(self, u):
        return eval_spline_derivative(self, u)


def _interval_terms(s: NaturalCubicSpline, u: np.ndarray):
    t, g, gam = s.knots, s.values, s.second_derivs
    i = np.clip(np.searchsorted(t, u, side="right") - 1, 0, t.size - 2)
    h = t[i + 1] - t[i]
    return i, h, u - t[i], t[i + 1] - u, g[i], g[i + 1], gam[i], gam[i + 1]


def boundary_slopes(s: NaturalCubicSpline) -> tuple[float, float]:
    t, g, gam = s.knots, s.values, s.second_derivs
    h0 = t[1] - t[0]
    h1 = t[-1] - t[-2]
    left = (g[1] - g[0]) / h0 - h0 * gam[1] / 6.0
    right = (g[-1] - g[-2]) / h1 + h1 * gam[-2] / 6.0
    return float(left), float(right)


def eval_spline(s: NaturalCubicSpline, u):
    """Value of the spline, linear beyond ``[a, b]``."""
    u = np.asarray(u, dtype=float)
    flat = u.reshape(-1)
    _, h, dl, dr, g0, g1, c0, c1 = _interval_terms(s, flat)
    out = (dl * g1 + dr * g0) / h - dl * dr * (
        (1.0 + dl / h) * c1 + (1.0 + dr / h) * c0
    ) / 6.0
    a, b = s.domain
    sl, sr = boundary_slopes(s)
    out = np.where(flat < a, s.values[0] + sl * (flat - a), out)
    out = np.where(flat > b, s.values[-1] + sr * (flat - b), out)
    out = out.reshape(u.shape)
    return float(out) if out.ndim == 0 else out


def eval_spline_derivative(s: NaturalCubicSpline, u):
    """First derivative; the boundary slope beyond ``[a, b]``."""
    u = np.asarray(u, dtype=float)
    flat = u.reshape(-1)
    _, h, dl, dr, g0, g1, c0, c1 = _interval_terms(s, flat)
    # d/du of the cubic piece written in terms of end values and curvatures
    out = (g1 - g0) / h + (
        c1 * (3.0 * dl * dl - h * h) - c0 * (3.0 * dr * dr - h * h)
    ) / (6.0 * h)
    a, b = s.domain
    sl, sr = boundary_slopes(s)
    out = np.where(flat < a, sl, out)
    out = np.where(flat > b, sr, out)
    out = out.reshape(u.shape)
    return float(out) if out.ndim == 0 else out


def _roughness_bands(h: np.ndarray):
    diag = (h[:-1] + h[1:]) / 3.0
    off = h[1:-1] / 6.0
    return diag, off


def roughness(s: NaturalCubicSpline) -> float:
    """Exact ``integral_a^b g''(x)**2 dx``."""
    h = np.diff(s.knots)
    gam = s.second_derivs[1:-1]
    if gam.size == 0:
        return 0.0
    diag, off = _roughness_bands(h)
    return float(gam @ (diag * gam) + 2.0 * gam[:-1] @ (off * gam[1:]))


def _fit_pooled(t: np.ndarray, y: np.ndarray, w: np.ndarray, mu: float):
    m = t.size
    h = np.diff(t)
    # Q has columns for the interior knots with entries on rows c, c+1, c+2
    qa = 1.0 / h[:-1]
    qe = 1.0 / h[1:]
    qb = -qa - qe
    dinv = 1.0 / w
    d0, d1, d2 = dinv[:-2], dinv[1:-1], dinv[2:]

    rdiag, roff = _roughness_bands(h)
    # solve (R/mu + Q' W^-1 Q) c = Q' y, then gamma = c / mu, g = y - W^-1 Q c;
    # this scaling keeps both mu -> 0 and mu -> inf well conditioned
    n_int = m - 2
    ab = np.zeros((3, n_int))
    ab[2] = rdiag / mu + qa * qa * d0 + qb * qb * d1 + qe * qe * d2
    if n_int > 1:
        ab[1, 1:] = roff / mu + qb[:-1] * qa[1:] * d1[:-1] + qe[:-1] * qb[1:] * d2[:-1]
    if n_int > 2:
        ab[0, 2:] = qe[:-2] * qa[2:] * d2[:-2]
    qty = qa * y[:-2] + qb * y[1:-1] + qe * y[2:]
    c = solveh_banded(ab, qty, lower=False, check_finite=False)

    qc = np.zeros(m)
    qc[:-2] += qa * c
    qc[1:-1] += qb * c
    qc[2:] += qe * c
    g = y - dinv * qc
    gamma = np.zeros(m)
    gamma[1:-1] = c / mu
    return NaturalCubicSpline(t, g, gamma)


def _merge_close_knots(t, y, w, inverse, rel_tol: float = KNOT_TOL):
    """Pool abscissae closer than ``rel_tol * (max - min)``.

    Nearly coincident knots make the banded system numerically indefinite.
    """
    if t.size < 2:
        return t, y, w, inverse
    gap = np.diff(t)
    close = gap <= rel_tol * (t[-1] - t[0])
    if not np.any(close):
        return t, y, w, inverse
    group = np.concatenate([[0], np.cumsum(~close)])
    wg = np.bincount(group, weights=w)
    tg = np.bincount(group, weights=w * t) / wg
    yg = np.bincount(group, weights=w * y) / wg
    return tg, yg, wg, group[inverse]


def fit_smoothing_spline_with_fitted(t, y, mu: float):
    """Smoothing spline plus fitted values in the original observation order."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("t and y must be 1-d of equal length")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(y))):
        raise ValueError("nonfinite input")
    if not mu > 0:
        raise ValueError("penalty parameter must be positive")
    tu, yp, wp, inverse = pool_ties(t, y, np.ones_like(t))
    tu, yp, wp, inverse = _merge_close_knots(tu, yp, wp, inverse)
    if tu.size < 3:
        raise ValueError("degenerate design")
    s = _fit_pooled(tu, yp, wp, float(mu))
    return s, s.values[inverse]


def fit_smoothing_spline(points, mu: float) -> NaturalCubicSpline:
    """Penalized least-squares natural cubic spline through ``(t, y)`` pairs.

    Parameters
    ----------
    points : array of shape (n, 2) or sequence of ScatterPoint
    mu : float
        Roughness penalty, ``mu > 0``.
    """
    arr = np.asarray(points, dtype=float).reshape(-1, 2)
    s, _ = fit_smoothing_spline_with_fitted(arr[:, 0], arr[:, 1], mu)
    return s


def penalized_criterion(s: NaturalCubicSpline, t, y, mu: float) -> float:
    """Residual sum of squares on the raw data plus ``mu * roughness``."""
    r = np.asarray(y, dtype=float) - eval_spline(s, np.asarray(t, dtype=float))
    return float(r @ r + mu * roughness(s))


def default_penalty(n: int, data_range: float, const: float = 0.1) -> float:
    """Penalty for the unnormalized residual sum of squares.

    The rate ``const * range**3 * n**(-0.6)`` applies to the criterion with
    the residual sum divided by ``n``; multiplying by ``n`` gives the
    equivalent penalty for ``sum (y_i - g(t_i))**2 + mu * integral g''**2``.
    """
    if n < 1 or not data_range > 0:
        raise ValueError("need n >= 1 and a positive range")
    return n * const * data_range**3 * n ** (-0.6)
