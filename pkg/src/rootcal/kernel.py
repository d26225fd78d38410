"""Squared-exponential kernel, kernel matrices, and kernel-vector derivatives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["KernelParams", "rbf", "kernel_matrix", "kernel_vector_grad"]


@dataclass(frozen=True)
class KernelParams:
    lengthscale: float
    jitter: float = 1e-10

    def __post_init__(self):
        if self.lengthscale <= 0:
            raise ValueError("lengthscale must be positive")
        if self.jitter < 0:
            raise ValueError("jitter must be non-negative")


def rbf(a, b, params: KernelParams) -> float:
    """exp(-||a-b||^2 / (2 l^2)); value in (0, 1]."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise ValueError("point dimensions disagree")
    d2 = float(np.sum((a - b) ** 2))
    return float(np.exp(-d2 / (2.0 * params.lengthscale**2)))


def _as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr


def kernel_matrix(A, B, params: KernelParams) -> np.ndarray:
    """Pairwise kernel evaluations; entry (i, j) is rbf(A[i], B[j]).

    No jitter is added here; the metamodel solver owns the regularized
    diagonal.
    """
    A = _as_points(A)
    B = _as_points(B)
    if A.shape[1] != B.shape[1]:
        raise ValueError("point dimensions disagree")
    d2 = np.sum((A[:, None, :] - B[None, :, :]) ** 2, axis=-1)
    return np.exp(-d2 / (2.0 * params.lengthscale**2))


def kernel_vector_grad(theta, design, params: KernelParams) -> np.ndarray:
    """Jacobian of the kernel vector k(theta, design) w.r.t. theta.

    Returns an (m_theta, n) matrix whose column i is
    -(theta - design_i) k(theta, design_i) / l^2.
    """
    design = _as_points(design)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.size != design.shape[1]:
        raise ValueError("point dimensions disagree")
    diff = theta[None, :] - design  # (n, m_theta)
    kvec = np.exp(-np.sum(diff**2, axis=1) / (2.0 * params.lengthscale**2))
    return -(diff * kvec[:, None]).T / params.lengthscale**2
