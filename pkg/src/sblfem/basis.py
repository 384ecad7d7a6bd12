"""Legendre polynomials, hierarchical shape functions and Gauss-Legendre rules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = ["legendre_eval", "shape_functions", "QuadratureRule", "gauss_rule"]


def legendre_eval(n: int, xi):
    """Values and derivatives of P_0..P_n at ``xi``.

    Returns two arrays of shape ``(n + 1,) + np.shape(xi)``.
    """
    xi = np.asarray(xi, dtype=float)
    P = np.empty((n + 1,) + xi.shape)
    dP = np.empty_like(P)
    P[0] = 1.0
    dP[0] = 0.0
    if n >= 1:
        P[1] = xi
        dP[1] = 1.0
    for k in range(1, n):
        P[k + 1] = ((2 * k + 1) * xi * P[k] - k * P[k - 1]) / (k + 1)
        # P'_{k+1} = P'_{k-1} + (2k+1) P_k
        dP[k + 1] = dP[k - 1] + (2 * k + 1) * P[k]
    return P, dP


def shape_functions(p: int, xi):
    """Hierarchical basis N0, N1, psi_2..psi_p on [-1, 1].

    N0 = (1 - xi)/2 and N1 = (1 + xi)/2 are the nodal modes; the internal
    modes psi_i = sqrt((2i-1)/2) * int_{-1}^{xi} P_{i-1} vanish at both ends
    and have L2-orthonormal derivatives.  Returns ``(N, dN)`` of shape
    ``(p + 1,) + np.shape(xi)``.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    xi = np.asarray(xi, dtype=float)
    P, dP = legendre_eval(p, xi)
    N = np.empty((p + 1,) + xi.shape)
    dN = np.empty_like(N)
    N[0] = 0.5 * (1.0 - xi)
    N[1] = 0.5 * (1.0 + xi)
    dN[0] = -0.5
    dN[1] = 0.5
    for i in range(2, p + 1):
        # int P_{i-1} = (P_i - P_{i-2}) / (2i - 1)
        N[i] = (P[i] - P[i - 2]) / math.sqrt(2.0 * (2 * i - 1))
        dN[i] = math.sqrt((2 * i - 1) / 2.0) * P[i - 1]
    return N, dN


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return len(self.nodes)


@lru_cache(maxsize=256)
def gauss_rule(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [-1, 1] by Newton iteration."""
    if not 1 <= n <= 200:
        raise ValueError("gauss_rule supports 1 <= n <= 200")
    k = np.arange(1, n + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        P, dP = legendre_eval(n, x)
        dx = P[n] / dP[n]
        x = x - dx
        if np.max(np.abs(dx)) <= 1e-15:
            break
    else:
        raise RuntimeError(f"Newton iteration for {n}-point Gauss rule did not converge")
    P, dP = legendre_eval(n, x)
    w = 2.0 / ((1.0 - x**2) * dP[n] ** 2)
    # ascending order, exact symmetry
    x = x[::-1].copy()
    w = w[::-1].copy()
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w)
