import numpy as np
import pytest
from scipy import integrate

from conftest import dense_spline
from monoindex.spline import (
    NaturalCubicSpline,
    default_penalty,
    eval_spline,
    eval_spline_derivative,
    fit_smoothing_spline,
    fit_smoothing_spline_with_fitted,
    penalized_criterion,
    roughness,
)


def random_data(rng, n=30, scale=1.0):
    t = np.sort(rng.uniform(0, 3, n))
    y = np.sin(2 * t) + rng.normal(scale=0.3, size=n)
    return t, scale * y


def second_derivative(s: NaturalCubicSpline, u):
    # g'' is piecewise linear between the knot curvatures
    return np.interp(u, s.knots, s.second_derivs)


def dense_weighted_fit(t, y, w, mu):
    return dense_spline(t, y, w, mu)[0]


def ols_line(t, y):
    tb, yb = t.mean(), y.mean()
    slope = np.sum((t - tb) * (y - yb)) / np.sum((t - tb) ** 2)
    return yb + slope * (t - tb)


class TestFit:
    def test_line_is_reproduced(self, rng):
        t = np.sort(rng.uniform(-1, 2, 25))
        for mu in [1e-3, 1.0, 1e4]:
            s = fit_smoothing_spline(np.c_[t, 2 * t + 1], mu)
            np.testing.assert_allclose(s.values, 2 * t + 1, atol=1e-9)
            np.testing.assert_allclose(s.second_derivs, 0, atol=1e-8)

    def test_large_penalty_gives_least_squares_line(self, rng):
        t, y = random_data(rng)
        s = fit_smoothing_spline(np.c_[t, y], 1e12)
        np.testing.assert_allclose(s.values, ols_line(t, y), atol=1e-6)

    def test_small_penalty_interpolates(self, rng):
        # jittered grid keeps the knot spacing, hence mu's natural scale, of order 0.1
        t = np.linspace(0, 3, 30) + rng.uniform(-0.02, 0.02, 30)
        y = np.sin(2 * t) + rng.normal(scale=0.3, size=30)
        s = fit_smoothing_spline(np.c_[t, y], 1e-12 * 3.0**3)
        np.testing.assert_allclose(s.values, y, atol=1e-6)

    def test_matches_dense_solve(self, rng):
        t, y = random_data(rng, n=15)
        for mu in [1e-3, 0.1, 10.0]:
            s = fit_smoothing_spline(np.c_[t, y], mu)
            np.testing.assert_allclose(s.values, dense_weighted_fit(t, y, np.ones(15), mu), atol=1e-10)

    def test_natural_boundary(self, rng):
        t, y = random_data(rng)
        s = fit_smoothing_spline(np.c_[t, y], 0.1)
        assert s.second_derivs[0] == 0.0 and s.second_derivs[-1] == 0.0

    def test_ties_pooled_with_weights(self):
        t = np.array([0.0, 1.0, 1.0, 2.0, 3.0, 3.5])
        y = np.array([0.0, 1.0, 3.0, 2.0, 5.0, 4.0])
        s, fitted = fit_smoothing_spline_with_fitted(t, y, 0.5)
        assert s.knots.tolist() == [0.0, 1.0, 2.0, 3.0, 3.5]
        assert fitted[1] == fitted[2]
        np.testing.assert_allclose(
            s.values, dense_weighted_fit(s.knots, [0, 2, 2, 5, 4], [1, 2, 1, 1, 1], 0.5), atol=1e-12
        )

    def test_errors(self):
        with pytest.raises(ValueError, match="degenerate design"):
            fit_smoothing_spline([(0, 1), (0, 2), (1, 1)], 1.0)
        with pytest.raises(ValueError):
            fit_smoothing_spline([(0, 1), (1, 2), (2, 1)], 0.0)

    def test_near_coincident_knots(self, rng):
        t = np.sort(rng.uniform(0, 1, 200))
        t[50] = t[49] + 1e-12
        y = t**3 + rng.normal(size=200)
        s, fitted = fit_smoothing_spline_with_fitted(t, y, 1.0)
        assert np.all(np.isfinite(fitted))
        assert fitted[49] == fitted[50]


class TestEvaluation:
    def test_values_at_knots(self, rng):
        t, y = random_data(rng)
        s = fit_smoothing_spline(np.c_[t, y], 0.05)
        np.testing.assert_allclose(eval_spline(s, t), s.values, rtol=0, atol=1e-12)

    def test_line_extends_linearly(self, rng):
        t = np.sort(rng.uniform(0, 1, 10))
        s = fit_smoothing_spline(np.c_[t, 2 * t + 1], 1.0)
        u = np.array([-3.0, 5.0])
        np.testing.assert_allclose(eval_spline(s, u), 2 * u + 1, atol=1e-8)
        np.testing.assert_allclose(eval_spline_derivative(s, u), 2.0, atol=1e-8)
        np.testing.assert_allclose(eval_spline_derivative(s, t), 2.0, atol=1e-8)

    def test_midpoint_matches_polynomial_coefficients(self):
        # a known spline: knots 0,1,2,3 with given values and curvatures
        t = np.array([0.0, 1.0, 2.0, 3.0])
        g = np.array([0.0, 1.0, 0.5, 2.0])
        gam = np.array([0.0, -2.0, 3.0, 0.0])
        s = NaturalCubicSpline(t, g, gam)
        # on [1, 2]: p(x) = a + b x + c x^2 + d x^3 in x = u - 1, from
        # p(0)=1, p(1)=0.5, p''(0)=-2, p''(1)=3
        c = -1.0
        d = (3.0 - (-2.0)) / 6.0
        b = 0.5 - 1.0 - c - d
        x = 0.5
        assert eval_spline(s, 1.5) == pytest.approx(1.0 + b * x + c * x**2 + d * x**3, abs=1e-14)
        assert eval_spline_derivative(s, 1.5) == pytest.approx(b + 2 * c * x + 3 * d * x**2, abs=1e-14)

    def test_derivative_beyond_domain_is_boundary_slope(self, rng):
        t, y = random_data(rng)
        s = fit_smoothing_spline(np.c_[t, y], 0.05)
        b = t[-1]
        left_fd = (eval_spline(s, b) - eval_spline(s, b - 1e-7)) / 1e-7
        assert eval_spline_derivative(s, b + 1.0) == pytest.approx(left_fd, rel=1e-5)
        assert eval_spline_derivative(s, b + 1.0) == eval_spline_derivative(s, b)

    def test_continuity_at_knots(self, rng):
        t, y = random_data(rng)
        s = fit_smoothing_spline(np.c_[t, y], 0.05)
        eps = 1e-9
        inner = t[1:-1]
        np.testing.assert_allclose(eval_spline(s, inner - eps), eval_spline(s, inner + eps), atol=1e-7)
        np.testing.assert_allclose(
            eval_spline_derivative(s, inner - eps), eval_spline_derivative(s, inner + eps), atol=1e-6
        )


def test_derivative_matches_central_differences(rng):
    """100 random fits, derivative at interior non-knot points vs central differences."""
    for _ in range(100):
        t, y = random_data(rng, n=int(rng.integers(5, 40)))
        s = fit_smoothing_spline(np.c_[t, y], float(10 ** rng.uniform(-3, 1)))
        u = rng.uniform(t[0], t[-1], 20)
        step = 1e-6
        fd = (eval_spline(s, u + step) - eval_spline(s, u - step)) / (2 * step)
        d = eval_spline_derivative(s, u)
        assert np.all(np.abs(fd - d) <= 1e-5 * np.maximum(np.abs(d), 1.0))


class TestRoughness:
    def test_line_has_zero_roughness(self):
        t = np.linspace(0, 1, 8)
        assert roughness(fit_smoothing_spline(np.c_[t, 3 * t - 2], 1.0)) == pytest.approx(0, abs=1e-16)

    def test_rough_vs_smooth(self, rng):
        t, y = random_data(rng)
        assert roughness(fit_smoothing_spline(np.c_[t, y], 1e-6)) > roughness(
            fit_smoothing_spline(np.c_[t, y], 10.0)
        )

    def test_four_knot_spline_matches_quadrature(self):
        s = fit_smoothing_spline([(0.0, 0.0), (0.7, 2.0), (1.5, -1.0), (3.0, 1.0)], 0.3)
        step = 1e-4

        def g2(u):
            return (eval_spline(s, u + step) - 2 * eval_spline(s, u) + eval_spline(s, u - step)) / step**2

        total = sum(
            integrate.quad(lambda u: g2(u) ** 2, lo, hi, epsabs=1e-12)[0]
            for lo, hi in zip(s.knots[:-1], s.knots[1:])
        )
        assert roughness(s) == pytest.approx(total, rel=1e-5)

    def test_monotone_in_penalty(self, rng):
        t, y = random_data(rng)
        mus = np.logspace(-4, 3, 15)
        r = [roughness(fit_smoothing_spline(np.c_[t, y], m)) for m in mus]
        assert np.all(np.diff(r) <= 1e-12 * max(r))


def test_residual_identity(rng):
    t, y = random_data(rng)
    mu = 0.2
    s, fitted = fit_smoothing_spline_with_fitted(t, y, mu)
    rss = np.sum((y - fitted) ** 2)
    assert penalized_criterion(s, t, y, mu) == pytest.approx(rss + mu * roughness(s), rel=1e-10)


def test_optimality_against_smooth_perturbations(rng):
    nodes, weights = np.polynomial.legendre.leggauss(12)
    for _ in range(20):
        t, y = random_data(rng, n=25)
        mu = float(10 ** rng.uniform(-2, 1))
        s = fit_smoothing_spline(np.c_[t, y], mu)
        freq, phase, c2, c3 = rng.uniform(0.5, 4), rng.uniform(0, 6), rng.normal(), rng.normal()

        def eta(u):
            return np.sin(freq * u + phase) + c2 * u**2 + c3 * u**3

        def eta2(u):
            return -(freq**2) * np.sin(freq * u + phase) + 2 * c2 + 6 * c3 * u

        def crit(eps):
            r = y - eval_spline(s, t) - eps * eta(t)
            pen = 0.0
            for lo, hi in zip(s.knots[:-1], s.knots[1:]):
                u = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
                pen += 0.5 * (hi - lo) * weights @ (second_derivative(s, u) + eps * eta2(u)) ** 2
            return r @ r + mu * pen

        base = crit(0.0)
        assert base == pytest.approx(penalized_criterion(s, t, y, mu), rel=1e-10)
        for eps in (1e-4, -1e-4):
            assert crit(eps) >= base - 1e-8


def test_default_penalty():
    assert default_penalty(1, 2.0) == pytest.approx(0.8)
    assert default_penalty(1000, 1.0, const=1.0) == pytest.approx(1000**0.4)
