import numpy as np
import pytest

from rootcal.kernel import KernelParams, kernel_matrix, kernel_vector_grad, rbf


class TestRbf:
    def test_unit_at_zero_distance(self):
        p = KernelParams(0.7)
        assert rbf([1.0, 2.0], [1.0, 2.0], p) == 1.0

    def test_hand_value(self):
        # distance 1, lengthscale 1 -> exp(-1/2)
        p = KernelParams(1.0)
        assert rbf([0.0], [1.0], p) == pytest.approx(np.exp(-0.5))

    def test_symmetry_and_positivity(self):
        p = KernelParams(0.3)
        rng = np.random.default_rng(1)
        a, b = rng.random(3), rng.random(3)
        assert rbf(a, b, p) == pytest.approx(rbf(b, a, p))
        assert 0 < rbf(a, b, p) <= 1

    def test_invalid_lengthscale(self):
        with pytest.raises(ValueError):
            KernelParams(0.0)


class TestKernelMatrix:
    def test_matches_pairwise_rbf(self):
        p = KernelParams(0.5)
        rng = np.random.default_rng(2)
        A = rng.random((4, 2))
        B = rng.random((3, 2))
        K = kernel_matrix(A, B, p)
        for i in range(4):
            for j in range(3):
                assert K[i, j] == pytest.approx(rbf(A[i], B[j], p))

    def test_gram_is_positive_definite(self):
        p = KernelParams(0.4)
        X = np.random.default_rng(3).random((6, 2))
        K = kernel_matrix(X, X, p) + 1e-10 * np.eye(6)
        assert np.all(np.linalg.eigvalsh(K) > 0)


class TestKernelVectorGrad:
    def test_matches_finite_differences(self):
        p = KernelParams(0.6)
        rng = np.random.default_rng(4)
        design = rng.random((5, 3))
        theta = rng.random(3)
        G = kernel_vector_grad(theta, design, p)
        h = 1e-6
        for axis in range(3):
            hi, lo = theta.copy(), theta.copy()
            hi[axis] += h
            lo[axis] -= h
            fd = (kernel_matrix(hi[None, :], design, p)[0]
                  - kernel_matrix(lo[None, :], design, p)[0]) / (2 * h)
            assert np.allclose(G[axis], fd, atol=1e-8)

    def test_zero_at_design_point(self):
        p = KernelParams(1.0)
        design = np.array([[0.2, 0.8]])
        G = kernel_vector_grad([0.2, 0.8], design, p)
        assert np.allclose(G, 0.0)
