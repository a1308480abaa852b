import math

import numpy as np
import pytest

from clarklab.errors import QuadratureError
from clarklab.quadrature import (_GAUSS_W, _KRONROD_W, integrate_circle,
                                 integrate_line, vectorize_scalar)


class TestWeights:
    def test_tables_integrate_constants(self):
        # both rules must integrate 1 over [-1, 1] exactly
        assert math.fsum(_KRONROD_W) == pytest.approx(2.0, abs=1e-13)
        assert math.fsum(_GAUSS_W) == pytest.approx(2.0, abs=1e-13)

    def test_gauss_polynomial_exactness(self):
        # Gauss-7 is exact through degree 13, Kronrod-15 through degree 22
        for k in (1, 3, 7, 13):
            val, _ = integrate_line(lambda x, k=k: x ** k, -1.0, 1.0, tol=1e-13)
            want = 0.0 if k % 2 else 2.0 / (k + 1)
            assert val == pytest.approx(want, abs=1e-13)


class TestLine:
    def test_linear(self):
        val, err = integrate_line(lambda x: x, 0.0, 1.0, tol=1e-12)
        assert val == pytest.approx(0.5, abs=1e-12)
        assert err <= 1e-12

    def test_oscillatory(self):
        val, err = integrate_line(np.sin, 0.0, 2.0 * math.pi, tol=1e-10)
        assert val == pytest.approx(0.0, abs=1e-10)

    def test_error_estimate_honest(self):
        # a-posteriori estimate must dominate the true error on known cases
        cases = [
            (lambda x: np.exp(x), 0.0, 1.0, math.e - 1.0),
            (lambda x: 1.0 / (1.0 + x ** 2), -4.0, 4.0, 2.0 * math.atan(4.0)),
            (lambda x: np.abs(x - 0.3), 0.0, 1.0, 0.5 * (0.09 + 0.49)),
        ]
        for f, a, b, want in cases:
            val, err = integrate_line(f, a, b, tol=1e-9)
            assert abs(val - want) <= max(err, 1e-13)

    def test_breakpoints_resolve_jump(self):
        step = lambda x: np.where(x < 0.25, 1.0, 3.0)
        val, _ = integrate_line(step, 0.0, 1.0, tol=1e-12, breakpoints=[0.25])
        assert val == pytest.approx(0.25 + 3.0 * 0.75, abs=1e-12)

    def test_nonconvergence_reported(self):
        wild = lambda x: np.sin(1.0 / np.maximum(np.abs(x), 1e-300))
        with pytest.raises(QuadratureError):
            integrate_line(wild, 0.0, 1.0, tol=1e-13, max_panels=30)

    def test_empty_interval(self):
        assert integrate_line(lambda x: x, 1.0, 1.0) == (0.0, 0.0)

    def test_vectorize_scalar(self):
        f = vectorize_scalar(lambda x: x * x)
        val, _ = integrate_line(f, 0.0, 1.0, tol=1e-12)
        assert val == pytest.approx(1.0 / 3.0, abs=1e-12)


class TestCircle:
    def test_poisson_mean_value(self):
        z = 0.5
        f = lambda s: (1.0 - abs(z) ** 2) / np.abs(np.exp(1j * s) - z) ** 2
        val, err = integrate_circle(f, tol=1e-10)
        assert val / (2 * math.pi) == pytest.approx(1.0, abs=1e-10)

    def test_constant(self):
        val, _ = integrate_circle(lambda s: np.ones_like(s), tol=1e-12)
        assert val == pytest.approx(2.0 * math.pi, abs=1e-10)

    def test_breakpoints_for_jumps(self):
        # indicator of an arc: exact total is the arc length
        lo, hi = 1.0, 2.5
        f = lambda s: ((s >= lo) & (s <= hi)).astype(float)
        val, _ = integrate_circle(f, tol=1e-8, breakpoints=[lo, hi])
        assert val == pytest.approx(hi - lo, abs=1e-7)

    def test_nonconvergence_reported(self):
        rng = np.random.default_rng(0)
        noisy = lambda s: rng.standard_normal(np.shape(s))
        with pytest.raises(QuadratureError):
            integrate_circle(noisy, tol=1e-12, max_points=256)
