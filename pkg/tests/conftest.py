import itertools

import numpy as np
import pytest


def brute_force_isotonic(t, y, w):
    """Isotonic fit by enumerating every partition into consecutive blocks.

    Blocks are not allowed to split points sharing an abscissa. Among the
    partitions whose block means are nondecreasing, the one with least
    weighted residual sum of squares is the monotone-cone projection.
    Returns fitted values in the input order.
    """
    t, y, w = map(np.asarray, (t, y, w))
    order = np.argsort(t, kind="stable")
    ts, ys, ws = t[order], y[order], w[order]
    n = len(ts)
    best, best_fit = np.inf, None
    for cuts in itertools.product([False, True], repeat=n - 1):
        if any(c and ts[i] == ts[i + 1] for i, c in enumerate(cuts)):
            continue
        bounds = [0] + [i + 1 for i, c in enumerate(cuts) if c] + [n]
        fit = np.empty(n)
        means = []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            m = np.sum(ws[lo:hi] * ys[lo:hi]) / np.sum(ws[lo:hi])
            fit[lo:hi] = m
            means.append(m)
        if np.any(np.diff(means) < 0):
            continue
        rss = np.sum(ws * (ys - fit) ** 2)
        if rss < best:
            best, best_fit = rss, fit
    out = np.empty(n)
    out[order] = best_fit
    return out


def dense_spline(t, y, w, mu):
    """Values and knot curvatures of the smoothing spline from dense linear algebra."""
    t, y, w = map(np.asarray, (t, y, w))
    m = t.size
    h = np.diff(t)
    Q = np.zeros((m, m - 2))
    R = np.zeros((m - 2, m - 2))
    for j in range(1, m - 1):
        Q[j - 1, j - 1] = 1 / h[j - 1]
        Q[j, j - 1] = -1 / h[j - 1] - 1 / h[j]
        Q[j + 1, j - 1] = 1 / h[j]
        R[j - 1, j - 1] = (h[j - 1] + h[j]) / 3
        if j < m - 2:
            R[j - 1, j] = R[j, j - 1] = h[j] / 6
    K = Q @ np.linalg.solve(R, Q.T)
    g = np.linalg.solve(np.diag(w) + mu * K, w * y)
    gamma = np.zeros(m)
    gamma[1:-1] = np.linalg.solve(R, Q.T @ g)
    return g, gamma


def spline_slopes_at_knots(t, g, gamma):
    """First derivative of the natural cubic spline at each knot."""
    h = np.diff(t)
    slopes = np.empty(t.size)
    slopes[:-1] = (g[1:] - g[:-1]) / h - h * (2 * gamma[:-1] + gamma[1:]) / 6
    slopes[-1] = (g[-1] - g[-2]) / h[-1] + h[-1] * (gamma[-2] + 2 * gamma[-1]) / 6
    return slopes


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
