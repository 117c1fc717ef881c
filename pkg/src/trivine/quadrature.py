"""Gauss-Legendre quadrature helpers used by the copula and margin integrals."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gauss_legendre_01(n: int, lo: float = 0.0, hi: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights transplanted to [lo, hi]."""
    x, w = gauss_legendre(n)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return mid + half * x, half * w


def gauss_legendre_unit_clustered(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on (0, 1) with endpoint clustering.

    Uses the substitution u = sin^2(pi*s/2), which concentrates nodes at both
    endpoints so that integrands with integrable corner spikes (tail-dependent
    copula densities) are resolved by a moderate fixed rule.
    """
    s, w = gauss_legendre_01(n)
    u = np.sin(0.5 * np.pi * s) ** 2
    du = 0.5 * np.pi * np.sin(np.pi * s)
    return u, w * du


def integrate_01(f, n: int = 64) -> float:
    """Fixed-order Gauss-Legendre integral of a vectorized f over (0, 1)."""
    x, w = gauss_legendre_01(n)
    return float(np.sum(w * f(x)))


def debye1(x: float) -> float:
    """Debye function of order one, D1(x) = (1/x) * int_0^x t/(e^t - 1) dt.

    Defined for x > 0; the integrand is smooth after removing the t -> 0
    limit (value 1), so a fixed Gauss-Legendre rule is exact to machine
    precision for the arguments used here.
    """
    if x <= 0.0:
        raise ValueError("debye1 requires x > 0")
    t, w = gauss_legendre_01(96, 0.0, x)
    integrand = np.where(t > 1e-12, t / np.expm1(t), 1.0)
    return float(np.sum(w * integrand)) / x
