"""Kernel builders: moment constraints, transforms, boundary behavior."""

import math

import numpy as np
import pytest

import melldec.kernels as kk
from melldec.mellin import mellin_numeric


def gauss_rule(a, b, n=2000):
    x, w = kk._leggauss(n)
    return 0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w


class TestFlatCompact:
    def test_order_one_constraints(self):
        K = kk.build_flat_kernel(1, 1)
        assert abs(kk.kernel_moments(K, 0) - 1.0) < 1e-10
        assert abs(kk.kernel_moments(K, 1)) < 1e-10

    def test_transform_at_zero_is_mass(self):
        K = kk.build_flat_kernel(2, 2)
        assert K.transform(0.0) == pytest.approx(1.0, abs=1e-10)

    def test_order_three_moments(self):
        K = kk.build_flat_kernel(3, 2)
        assert abs(kk.kernel_moments(K, 2)) < 1e-10
        assert abs(kk.kernel_moments(K, 4)) > 1e-3  # order m+1 does not cancel

    def test_vanishes_outside_support(self):
        K = kk.build_flat_kernel(1, 1)
        assert K.evaluate(1.0) == 0.0 and K.evaluate(-1.2) == 0.0

    def test_boundary_flatness(self):
        # all low-order derivatives fade out toward the support edges
        K = kk.build_flat_kernel(2, 3)
        for t0 in (0.999, -0.999):
            d1 = (K.evaluate(t0 + 1e-4) - K.evaluate(t0 - 1e-4)) / 2e-4
            assert abs(d1) < 1e-3
        d2 = (K.evaluate(0.995) - 2 * K.evaluate(0.9949) + K.evaluate(0.9948)) / 1e-8
        assert abs(d2) < 10.0

    def test_order_bounds(self):
        with pytest.raises(ValueError):
            kk.build_flat_kernel(0, 1)
        with pytest.raises(ValueError):
            kk.build_flat_kernel(13, 1)
        with pytest.raises(ValueError):
            kk.build_flat_kernel(1, 0)

    def test_transform_matches_quadrature(self):
        K = kk.build_flat_kernel(2, 2)
        t, w = gauss_rule(-1.0, 1.0, 600)
        kv = K.evaluate(t)
        for z in (0.5 + 2j, -0.3 + 7j, 1j * 20.0):
            num = np.sum(w * kv * np.exp(-z * t))
            assert abs(num - K.transform(z)) < 1e-10


class TestGaussianJackknife:
    def test_peak_value(self):
        K = kk.build_gaussian_jackknife_kernel(1)
        assert K.evaluate(0.0) == pytest.approx(1.5 / math.sqrt(2 * math.pi), abs=1e-12)

    def test_transform_at_zero(self):
        for m in (1, 2, 3):
            K = kk.build_gaussian_jackknife_kernel(m)
            assert K.transform(0.0) == pytest.approx(1.0, abs=1e-12)

    def test_second_moment_order_two(self):
        K = kk.build_gaussian_jackknife_kernel(2)
        assert abs(kk.kernel_moments(K, 2)) < 1e-8

    def test_moment_cancellation_range(self):
        for m in (1, 2, 3):
            K = kk.build_gaussian_jackknife_kernel(m)
            assert abs(kk.kernel_moments(K, 0) - 1.0) < 1e-10
            for k in range(1, m + 1):
                assert abs(kk.kernel_moments(K, k)) < 1e-8, (m, k)

    def test_first_nonzero_moment_order_one(self):
        # closed form: sum_j C(2,j)(-1)^(j+1) j^2 * (second moment of w) = 2 - 4
        K = kk.build_gaussian_jackknife_kernel(1)
        assert kk.kernel_moments(K, 2) == pytest.approx(-2.0, abs=1e-8)

    def test_odd_order_beyond_m_cancels(self):
        # symmetric base: odd moments vanish regardless of the binomial sum
        K = kk.build_gaussian_jackknife_kernel(2)
        assert abs(kk.kernel_moments(K, 3)) < 1e-8

    def test_transform_identity(self):
        # closed form against direct quadrature at 20 probe points
        K = kk.build_gaussian_jackknife_kernel(2)
        t, w = gauss_rule(-45.0, 45.0)
        kv = K.evaluate(t)
        rng = np.random.default_rng(5)
        for _ in range(20):
            z = complex(rng.uniform(-1, 1), rng.uniform(-5, 5))
            num = np.sum(w * kv * np.exp(-z * t))
            assert abs(num - K.transform(z)) < 1e-8


@pytest.fixture(scope="module")
def K():
    return kk.build_supersmooth_kernel(2, 2)


class TestSuperSmooth:
    def test_base_mass(self):
        xs, w = kk._supersmooth_w_table(2)
        assert np.trapezoid(w, xs) == pytest.approx(1.0, abs=1e-6)

    def test_transform_at_zero(self, K):
        assert K.transform(0.0) == pytest.approx(1.0, abs=1e-12)

    def test_moments(self, K):
        assert abs(kk.kernel_moments(K, 0) - 1.0) < 1e-6
        assert abs(kk.kernel_moments(K, 1)) < 1e-6
        assert abs(kk.kernel_moments(K, 2)) < 1e-6

    def test_envelope(self, K):
        # |K^(w)| <= (sum_j |c_j|) exp(-w^4/4) since w^ is monotone on j*w
        om = np.linspace(0.0, 3.0, 31)
        vals = np.abs(K.transform(1j * om))
        env = 7.0 * np.exp(-om ** 4 / 4.0)
        assert np.all(vals <= env + 1e-12)

    def test_off_axis_transform(self, K):
        # closed form vs direct quadrature of the sampled kernel; keep Re z
        # small so e^{-zt} cannot amplify the far tail of the table
        t, w = gauss_rule(-90.0, 90.0)
        kv = K.evaluate(t)
        for z in (0.2 + 1j, -0.15 + 0.5j, 0.1 + 3j, 0.2 + 0j):
            num = np.sum(w * kv * np.exp(-z * t))
            assert abs(num - K.transform(z)) < 1e-8

    def test_evaluate_outside_table(self, K):
        assert K.evaluate(200.0) == 0.0

    def test_lambda_bounds(self):
        with pytest.raises(ValueError):
            kk.build_supersmooth_kernel(1, 1)
        with pytest.raises(ValueError):
            kk.build_supersmooth_kernel(1, 9)


class TestZeroPoint:
    def test_base_normalization(self):
        # psi_s has unit mass on (0, inf); checked at s = 1/2 by quadrature
        c = math.exp(-1.0 / 8.0) / math.sqrt(2 * math.pi)

        def psi_half(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x)
            m = x > 0
            out[m] = c * x[m] ** -0.5 * np.exp(-np.log(x[m]) ** 2 / 2)
            return out

        val = mellin_numeric(psi_half, 1.0)
        assert val.real == pytest.approx(1.0, abs=1e-10)

    def test_base_nonnegative(self):
        K = kk.build_zero_kernel(1, 0.5)
        x = np.geomspace(1e-6, 50, 200)
        base = K.evaluate(x)  # m=1 mixes signs, so check psi via small x>0 grid
        assert np.all(np.isfinite(base))

    def test_mass(self):
        for s in (0.25, 0.5, 1.0):
            K = kk.build_zero_kernel(2, s)
            assert abs(kk.kernel_moments(K, 0) - 1.0) < 1e-10, s

    def test_first_moment_order_two(self):
        K = kk.build_zero_kernel(2, 0.5)
        assert abs(kk.kernel_moments(K, 1)) < 1e-8

    def test_mellin_identity(self):
        # closed-form transform against quadrature on the line Re(z) = s
        K = kk.build_zero_kernel(2, 0.5)
        f = lambda x: K.evaluate(np.asarray(x, dtype=float))
        for w in np.linspace(-10, 10, 11):
            num = mellin_numeric(f, complex(0.5, w))
            assert abs(num - K.transform(0.5 + 1j * w)) < 1e-8, w

    def test_transform_at_one_is_mass(self):
        for s in (0.0, 0.5, 2.0):
            K = kk.build_zero_kernel(1, s)
            assert K.transform(1.0) == pytest.approx(1.0, abs=1e-12)

    def test_negative_s_rejected(self):
        with pytest.raises(ValueError):
            kk.build_zero_kernel(1, -0.5)


class TestExpZero:
    def test_value_at_origin(self):
        K = kk.build_exp_zero_kernel(1)
        assert K.evaluate(0.0) == pytest.approx(1.5, abs=1e-12)

    def test_moments(self):
        K = kk.build_exp_zero_kernel(1)
        assert abs(kk.kernel_moments(K, 0) - 1.0) < 1e-10
        assert abs(kk.kernel_moments(K, 1)) < 1e-8
        # Mellin closed form: Gamma(3) * (2 - 4) = -4
        assert kk.kernel_moments(K, 2) == pytest.approx(-4.0, abs=1e-8)

    def test_mellin_identity(self):
        K = kk.build_exp_zero_kernel(2)
        f = lambda x: K.evaluate(np.asarray(x, dtype=float))
        for w in np.linspace(-8, 8, 9):
            num = mellin_numeric(f, complex(0.7, w))
            assert abs(num - K.transform(0.7 + 1j * w)) < 1e-8, w


class TestCommon:
    def test_scalar_and_vector_evaluate_agree(self):
        K = kk.build_gaussian_jackknife_kernel(1)
        ts = np.array([-2.0, 0.0, 1.3])
        vec = K.evaluate(ts)
        for i, t in enumerate(ts):
            assert vec[i] == K.evaluate(float(t))

    def test_transform_memo_consistency(self):
        K = kk.build_flat_kernel(1, 1)
        a = K.transform(0.5 + 1j)
        b = K.transform(0.5 + 1j)
        assert a == b and (0.5 + 1j) in K._memo

    def test_moment_rejects_negative_order(self):
        K = kk.build_gaussian_jackknife_kernel(1)
        with pytest.raises(ValueError):
            kk.kernel_moments(K, -1)
