"""Sign-guided search-space reduction and the root-existence probability.

A pair of design points whose signed discrepancies have (probably) opposite
signs brackets a root; the most compact such hyperrectangle, scored by a
hypervolume measure, replaces the acquisition optimizer's box for the
current iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .metamodel import STD_FLOOR, Posterior

__all__ = ["Subregion", "rss_deterministic", "rss_stochastic", "sign_change_prob"]


@dataclass(frozen=True)
class Subregion:
    lo: np.ndarray
    hi: np.ndarray
    volume: float
    pair: tuple


def _pair_volume(theta_a, theta_b, weight, theta_floor) -> Subregion:
    lo = np.minimum(theta_a, theta_b)
    hi = np.maximum(theta_a, theta_b)
    vol = float(np.prod(np.maximum(np.abs(theta_a - theta_b), theta_floor)) * weight)
    return lo, hi, vol


def _best(candidates) -> Subregion | None:
    """Smallest volume, ties broken by (a, b) lexicographic order."""
    if not candidates:
        return None
    return min(candidates, key=lambda s: (s.volume, s.pair))


def rss_deterministic(design, signed_values, theta_floor: float) -> Subregion | None:
    """Smallest sign-changing subregion over all design pairs, or None."""
    if theta_floor <= 0:
        raise ValueError("theta_floor must be positive")
    design = np.atleast_2d(np.asarray(design, dtype=float))
    f = np.asarray(signed_values, dtype=float)
    candidates = []
    for a in range(design.shape[0]):
        for b in range(a + 1, design.shape[0]):
            if f[a] * f[b] < 0:
                lo, hi, vol = _pair_volume(design[a], design[b],
                                           abs(f[a] - f[b]), theta_floor)
                candidates.append(Subregion(lo, hi, vol, (a, b)))
    return _best(candidates)


def sign_change_prob(post_a: Posterior, post_b: Posterior) -> float:
    """Posterior probability that two design points bracket a root.

    Treats the two posteriors as independent normals; a sign change occurs
    when exactly one of the two latent values is negative.
    """
    pa = float(ndtr(-post_a.mean / max(post_a.std, STD_FLOOR)))
    pb = float(ndtr(-post_b.mean / max(post_b.std, STD_FLOOR)))
    return pa + pb - 2.0 * pa * pb


def rss_stochastic(design, posteriors, alpha: float,
                   theta_floor: float) -> Subregion | None:
    """Smallest subregion among pairs with sign-change probability >= alpha."""
    if theta_floor <= 0:
        raise ValueError("theta_floor must be positive")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    design = np.atleast_2d(np.asarray(design, dtype=float))
    candidates = []
    for a in range(design.shape[0]):
        for b in range(a + 1, design.shape[0]):
            p = sign_change_prob(posteriors[a], posteriors[b])
            if p >= alpha:
                lo, hi, vol = _pair_volume(design[a], design[b], 1.0 - p, theta_floor)
                candidates.append(Subregion(lo, hi, vol, (a, b)))
    return _best(candidates)
