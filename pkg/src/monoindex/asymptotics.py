"""
Population quantities for the two uniform-square simulation models.

Conditioning on ``alpha'X = u`` restricts X to a segment of the unit square
on which it is uniformly distributed, so conditional expectations reduce to
one-dimensional Gauss-Legendre quadrature along that segment. Expectations
over ``X`` integrate those again against the density of ``alpha'X``.
"""

from enum import Enum

import numpy as np
from scipy.special import expit

N_NODES = 128
ALPHA0 = np.array([1.0, 1.0]) / np.sqrt(2.0)


class ModelSpec(str, Enum):
    MODEL1 = "1"
    MODEL2 = "2"

    @property
    def alpha0(self) -> np.ndarray:
        return ALPHA0.copy()

    def link(self, u):
        u = np.asarray(u, dtype=float)
        if self is ModelSpec.MODEL1:
            return u**3
        return 10.0 * expit(u)

    def link_derivative(self, u):
        u = np.asarray(u, dtype=float)
        if self is ModelSpec.MODEL1:
            return 3.0 * u**2
        p = expit(u)
        return 10.0 * p * (1.0 - p)

    def noise_variance(self, u):
        """``Var(Y | alpha0'X = u)``."""
        u = np.asarray(u, dtype=float)
        if self is ModelSpec.MODEL1:
            return np.ones_like(u)
        p = expit(u)
        return 10.0 * p * (1.0 - p)


def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def support(alpha) -> tuple[float, float]:
    """Range ``I_alpha`` of ``alpha'x`` over the unit square."""
    alpha = np.asarray(alpha, dtype=float)
    proj = [0.0, alpha[0], alpha[1], alpha[0] + alpha[1]]
    return min(proj), max(proj)


def _breakpoints(alpha) -> np.ndarray:
    return np.unique([0.0, alpha[0], alpha[1], alpha[0] + alpha[1]])


def segment(alpha, u):
    """Endpoints of ``{x in [0,1]^2 : alpha'x = u}`` (``u`` scalar or array).

    Returns ``(free, lo, hi, density)``: the segment is parameterized by the
    coordinate ``free`` on ``[lo, hi]`` and ``density`` is the density of
    ``alpha'X`` at ``u``.
    """
    a = np.asarray(alpha, dtype=float)
    u = np.asarray(u, dtype=float)
    free = 0 if abs(a[1]) >= abs(a[0]) else 1
    other = 1 - free
    # x_other = (u - a_free * x_free) / a_other must lie in [0, 1]
    if a[free] != 0.0:
        e1 = u / a[free]
        e2 = (u - a[other]) / a[free]
        lo = np.maximum(0.0, np.minimum(e1, e2))
        hi = np.minimum(1.0, np.maximum(e1, e2))
    else:
        inside = (min(0.0, a[other]) <= u) & (u <= max(0.0, a[other]))
        lo = np.where(inside, 0.0, 1.0)
        hi = np.where(inside, 1.0, 0.0)
    return free, lo, hi, np.maximum(hi - lo, 0.0) / abs(a[other])


def _segment_points(alpha, u, nodes: int = N_NODES):
    """Quadrature points on the segments for each ``u``.

    Returns points of shape ``u.shape + (nodes, 2)``, the node weights
    (summing to one) and the density of ``alpha'X`` at ``u``.
    """
    a = np.asarray(alpha, dtype=float)
    u = np.asarray(u, dtype=float)
    lo_s, hi_s = support(a)
    if np.any(u < lo_s) or np.any(u > hi_s):
        raise ValueError("outside projected support")
    free, lo, hi, dens = segment(a, u)
    z, w = _gauss_legendre(nodes)
    lo, hi = lo[..., None], hi[..., None]
    s = 0.5 * (hi - lo) * z + 0.5 * (hi + lo)
    other = 1 - free
    pts = np.empty(s.shape + (2,))
    pts[..., free] = s
    pts[..., other] = (u[..., None] - a[free] * s) / a[other]
    return pts, 0.5 * w, dens


def psi_alpha(model: ModelSpec, alpha, u, nodes: int = N_NODES):
    """``E[psi0(alpha0'X) | alpha'X = u]`` for X uniform on the unit square."""
    model = ModelSpec(model)
    pts, w, _ = _segment_points(alpha, u, nodes)
    out = model.link(pts @ model.alpha0) @ w
    return float(out) if out.ndim == 0 else out


def conditional_moments(model: ModelSpec, alpha, u, nodes: int = N_NODES):
    """Mean vector and covariance matrix of X given ``alpha'X = u``.

    For array ``u`` the results are stacked along the leading axes.
    """
    pts, w, _ = _segment_points(alpha, u, nodes)
    mean = np.einsum("k,...kj->...j", w, pts)
    c = pts - mean[..., None, :]
    cov = np.einsum("k,...ki,...kj->...ij", w, c, c)
    return mean, cov


def _outer_nodes(alpha, nodes: int = N_NODES):
    """Nodes and weights for ``u`` integrated against the density of alpha'X."""
    bps = _breakpoints(alpha)
    z, w = _gauss_legendre(nodes)
    us, ws = [], []
    for lo, hi in zip(bps[:-1], bps[1:]):
        if hi - lo <= 0:
            continue
        us.append(0.5 * (hi - lo) * z + 0.5 * (hi + lo))
        ws.append(0.5 * (hi - lo) * w)
    us = np.concatenate(us)
    ws = np.concatenate(ws)
    return us, ws * segment(alpha, us)[3]


def _weighted_cov(model: ModelSpec, weight_fn, nodes: int = N_NODES) -> np.ndarray:
    """``E[weight(alpha0'X) * Cov(X | alpha0'X)]``."""
    a0 = model.alpha0
    us, ws = _outer_nodes(a0, nodes)
    _, cov = conditional_moments(model, a0, us, nodes)
    M = np.einsum("u,uij->ij", ws * weight_fn(us), cov)
    return 0.5 * (M + M.T)


def matrix_A(model: ModelSpec, nodes: int = N_NODES) -> np.ndarray:
    """``E[psi0'(alpha0'X) Cov(X | alpha0'X)]``."""
    model = ModelSpec(model)
    return _weighted_cov(model, model.link_derivative, nodes)


def matrix_Sigma(model: ModelSpec, nodes: int = N_NODES) -> np.ndarray:
    """``E[Var(Y | X) Cov(X | alpha0'X)]``, the outer product of the score."""
    model = ModelSpec(model)
    return _weighted_cov(model, model.noise_variance, nodes)


def matrix_A_tilde(model: ModelSpec, nodes: int = N_NODES) -> np.ndarray:
    model = ModelSpec(model)
    return _weighted_cov(model, lambda u: model.link_derivative(u) ** 2, nodes)


def matrix_Sigma_tilde(model: ModelSpec, nodes: int = N_NODES) -> np.ndarray:
    model = ModelSpec(model)
    return _weighted_cov(
        model, lambda u: model.noise_variance(u) * model.link_derivative(u) ** 2, nodes
    )


def moore_penrose_pinv(M, tol: float = 1e-10) -> np.ndarray:
    """Pseudo-inverse of a symmetric matrix by spectral decomposition.

    Eigenvalues with ``|lambda| <= tol * max|lambda|`` are treated as zero.
    """
    M = np.asarray(M, dtype=float)
    lam, V = np.linalg.eigh(0.5 * (M + M.T))
    cutoff = tol * np.max(np.abs(lam)) if lam.size else 0.0
    inv = np.zeros_like(lam)
    keep = np.abs(lam) > cutoff
    inv[keep] = 1.0 / lam[keep]
    return (V * inv) @ V.T


def sandwich_parts(kind, model: ModelSpec, nodes: int = N_NODES):
    """``(bread, meat, bread^- meat bread^-)`` for the limit law of ``kind``."""
    from .estimators import EstimatorKind

    kind = EstimatorKind(kind)
    if kind is EstimatorKind.LSE:
        raise ValueError("asymptotic law unknown for the lse")
    if kind is EstimatorKind.SSE:
        A, S = matrix_A(model, nodes), matrix_Sigma(model, nodes)
    else:
        A, S = matrix_A_tilde(model, nodes), matrix_Sigma_tilde(model, nodes)
    Ai = moore_penrose_pinv(A)
    V = Ai @ S @ Ai
    return A, S, 0.5 * (V + V.T)


def asymptotic_covariance(kind, model: ModelSpec, nodes: int = N_NODES) -> np.ndarray:
    """Limiting covariance of ``sqrt(n) * (alpha_hat - alpha0)``.

    SSE uses ``A^- Sigma A^-``; ESE and SPLINE share the sandwich built from
    the derivative-weighted matrices.
    """
    return sandwich_parts(kind, model, nodes)[2]


def _population_terms(model: ModelSpec, alpha, nodes: int):
    us, ws = _outer_nodes(alpha, nodes)
    pts, pw, _ = _segment_points(alpha, us, nodes)
    proj0 = pts @ model.alpha0
    true = model.link(proj0)
    r = true - (true @ pw)[:, None]
    mean_sq = ws @ ((r * r) @ pw)
    moment = ws @ np.einsum("k,uk,ukj->uj", pw, r, pts)
    noise = ws @ (model.noise_variance(proj0) @ pw)
    return float(mean_sq), moment, float(noise)


def _alpha_from_first(a1: float) -> np.ndarray:
    if not 0.0 <= a1 <= 1.0:
        raise ValueError("alpha1 must lie in [0, 1]")
    return np.array([a1, np.sqrt(1.0 - a1 * a1)])


def population_lse_loss(model: ModelSpec, a1: float, nodes: int = N_NODES) -> float:
    """``E{Y - psi_alpha(alpha'X)}**2`` at ``alpha = (a1, sqrt(1 - a1**2))``."""
    model = ModelSpec(model)
    mean_sq, _, noise = _population_terms(model, _alpha_from_first(a1), nodes)
    return float(noise + mean_sq)


def population_sse_loss(model: ModelSpec, a1: float, nodes: int = N_NODES) -> float:
    """``||E{Y - psi_alpha(alpha'X)} X||**2`` at ``alpha = (a1, sqrt(1 - a1**2))``."""
    model = ModelSpec(model)
    _, moment, _ = _population_terms(model, _alpha_from_first(a1), nodes)
    return float(moment @ moment)


def population_loss(kind, model: ModelSpec, alpha1_grid, nodes: int = N_NODES) -> list:
    """Population LSE or SSE loss along a grid of first components."""
    from .estimators import EstimatorKind

    kind = EstimatorKind(kind)
    if kind is EstimatorKind.LSE:
        fn = population_lse_loss
    elif kind is EstimatorKind.SSE:
        fn = population_sse_loss
    else:
        raise ValueError("population loss is available for lse and sse only")
    return [(float(a), fn(model, float(a), nodes)) for a in alpha1_grid]
