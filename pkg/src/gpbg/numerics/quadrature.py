"""Gauss-Legendre rules on the ordered simplex ``t >= t_1 >= ... >= t_n >= 0``."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _unit_gauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1) / 2, w / 2


@dataclass(frozen=True)
class SimplexQuadrature:
    order: int = 6

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("quadrature order must be at least 2")

    def nodes(self, n: int, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes ``(M, n)`` with decreasing columns and weights ``(M,)``.

        Uses ``t_i = t u_1 ... u_i``; the Jacobian is
        ``t^n prod_i u_i^(n-i)``.
        """
        u, w = _unit_gauss(self.order)
        grids = np.meshgrid(*([u] * n), indexing="ij")
        wgrids = np.meshgrid(*([w] * n), indexing="ij")
        U = np.stack([g.ravel() for g in grids], axis=1)
        W = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
        pts = t * np.cumprod(U, axis=1)
        jac = t**n * np.prod(U ** (n - np.arange(1, n + 1)), axis=1)
        return pts, W * jac

    def nodes_for_order(self, n: int, t: float, sigma) -> tuple[np.ndarray, np.ndarray]:
        """Rule on ``{t >= s_sigma(1) >= ... >= s_sigma(n)}``: ``s[sigma(i)] = v_i``."""
        v, w = self.nodes(n, t)
        s = np.empty_like(v)
        for i, target in enumerate(sigma):
            s[:, target - 1] = v[:, i]
        return s, w

    def integrate(self, fn, n: int, t: float):
        """``fn`` maps an ``(M, n)`` node array to ``(M, ...)`` values."""
        pts, w = self.nodes(n, t)
        return np.tensordot(w, fn(pts), axes=1)
