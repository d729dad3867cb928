"""Difference-of-convex pieces of the max-of-min neuron.

With ``z = [x, -x]`` and weight rows ``w_k``::

    psi_k(z, W) = max_i (-z_i - w_ki)              (convex in w_k)
    phi(z, W)   = max_k min_i (z_i + w_ki) = max_k (-psi_k)
    phi1(z, W)  = max_k sum_{t != k} psi_t         (convex)
    phi2(z, W)  = sum_k psi_k                      (convex)

and ``phi = phi1 - phi2``.  The linearizations below are supporting
hyperplanes (exact at the expansion point, below the function elsewhere)
used by the convex-concave procedure.  All argmax selections break ties by
the lowest index.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError


def concat(x) -> np.ndarray:
    """``[x, -x]``; works on a point or a batch of points (last axis)."""
    x = np.asarray(x, dtype=float)
    return np.concatenate([x, -x], axis=-1)


def _check(z, W):
    z = np.asarray(z, dtype=float)
    W = np.asarray(W, dtype=float)
    if W.ndim == 1:
        W = W[None, :]
    if W.ndim != 2 or z.shape[-1] != W.shape[1]:
        raise InputError(f"shape mismatch: z {z.shape} vs W {W.shape}")
    return z, W


def psi(z, w_k) -> float:
    z, W = _check(z, w_k)
    if z.ndim != 1 or W.shape[0] != 1:
        raise InputError("psi takes one pattern and one weight row")
    return float(np.max(-z - W[0]))


def psi_matrix(Z, W) -> np.ndarray:
    """psi_k for every pattern and dendrite: (M, N) x (K, N) -> (M, K)."""
    Z, W = _check(Z, W)
    return np.max(-Z[..., None, :] - W, axis=-1)


def _others_sum(P: np.ndarray) -> np.ndarray:
    # sum_{t != k} P[..., t] for each k, summed in index order (not S - P_k)
    K = P.shape[-1]
    mask = ~np.eye(K, dtype=bool)
    return np.sum(np.where(mask, P[..., None, :], 0.0), axis=-1)


def phi(z, W):
    P = psi_matrix(z, W)
    return np.max(-P, axis=-1)


def phi1(z, W):
    return np.max(_others_sum(psi_matrix(z, W)), axis=-1)


def phi2(z, W):
    return np.sum(psi_matrix(z, W), axis=-1)


@dataclass
class AffineForm:
    """``constant + sum coeffs[(k, i)] * W[k, i]``."""

    coeffs: dict = field(default_factory=dict)
    constant: float = 0.0

    def __call__(self, W) -> float:
        W = np.atleast_2d(np.asarray(W, dtype=float))
        return self.constant + sum(c * W[k, i] for (k, i), c in self.coeffs.items())

    def __add__(self, other: "AffineForm") -> "AffineForm":
        coeffs = dict(self.coeffs)
        for key, c in other.coeffs.items():
            coeffs[key] = coeffs.get(key, 0.0) + c
        return AffineForm(coeffs, self.constant + other.constant)


def active_pieces(Z, W) -> np.ndarray:
    """Index of the maximizing term of psi_k: (M, N) x (K, N) -> (M, K) ints."""
    Z, W = _check(Z, W)
    return np.argmax(-Z[..., None, :] - W, axis=-1)


def phi1_selector(Z, W) -> np.ndarray:
    """k* = argmax_k sum_{t != k} psi_t for each pattern."""
    return np.argmax(_others_sum(psi_matrix(Z, W)), axis=-1)


def linearize_psi(z, w_k, k: int = 0) -> AffineForm:
    """Tangent of psi at ``w_k``; coefficients are keyed by dendrite ``k``."""
    z, W = _check(z, w_k)
    i = int(np.argmax(-z - W[0]))
    return AffineForm({(k, i): -1.0}, -float(z[i]))


def linearize_phi2(z, W) -> AffineForm:
    z, W = _check(z, W)
    form = AffineForm()
    for k in range(W.shape[0]):
        form = form + linearize_psi(z, W[k], k)
    return form


def linearize_phi1(z, W) -> AffineForm:
    z, W = _check(z, W)
    K = W.shape[0]
    if K == 1:
        return AffineForm()
    k_star = int(phi1_selector(z, W))
    form = AffineForm()
    for t in range(K):
        if t != k_star:
            form = form + linearize_psi(z, W[t], t)
    return form
