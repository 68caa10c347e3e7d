"""Duhamel iterates on the grid: full density tensors and factorized kernels.

A ``k``-particle density tensor has ``2k`` axes ordered
``(x_1, ..., x_k, x'_1, ..., x'_k)``.  The iterate of a collision map is

    J(mu; t_0..t_n) = U^{(k)}_{0,1} B_{mu(k+1);k+1} U^{(k+1)}_{1,2} ... B_{mu(k+n);k+n} gamma_bottom

with ``B_{j;k+1} = B^+_{j;k+1} - B^-_{j;k+1}`` and the factorized bottom state
``(|phi_b><phi_b|)^{(k+n)}``.  ``bottom="fixed"`` uses ``phi_b = phi``;
``bottom="free"`` uses ``phi_b = exp(i t_n Laplacian) phi``, the free evolution
up to the bottom time.
"""
from __future__ import annotations

import string

import numpy as np

from .. import expr as E
from ..core import CollisionMap
from ..errors import MemoryGuardExceeded, TermCapExceeded
from ..kernels import FactorKernels, build_all_kernels
from ..trees import build_forest
from .grid import Grid, GridFunction, multiplier, propagate_values

MAX_TENSOR = 2**24
MAX_TERMS = 2**12
BOTTOMS = ("fixed", "free")


def _guard(N: int, particles: int) -> None:
    if N ** (2 * particles) > MAX_TENSOR:
        raise MemoryGuardExceeded(
            f"{particles}-particle tensor at N={N} needs N^{2 * particles} > {MAX_TENSOR} entries"
        )


def duhamel_prefactor(lam: float, n: int) -> complex:
    """Scalar in front of the ``n``-th iterate for ``gamma = U gamma_0 - i lam int U B gamma``."""
    return (-1j * lam) ** n


def factorized_density(phi: np.ndarray, k: int) -> np.ndarray:
    _guard(phi.shape[-1], k)
    out = np.ones(())
    for f in [phi] * k + [phi.conj()] * k:
        out = np.multiply.outer(out, f)
    return out


def propagate_density(gamma: np.ndarray, grid: Grid, s: float) -> np.ndarray:
    """``U^{(k)}(s) = exp(i s (Lap_x - Lap_x'))`` on a ``2k``-axis tensor."""
    if s == 0:
        return gamma
    k = gamma.ndim // 2
    out = np.fft.fftn(gamma)
    fwd, back = multiplier(grid, s), multiplier(grid, -s)
    for ax in range(gamma.ndim):
        shape = [1] * gamma.ndim
        shape[ax] = grid.N
        out = out * (fwd if ax < k else back).reshape(shape)
    return np.fft.ifftn(out)


def contract_B(gamma: np.ndarray, j: int, sign: str) -> np.ndarray:
    """``B^+_{j;k+1}`` sets ``x_{k+1} = x'_{k+1} = x_j``; ``B^-`` uses ``x'_j``.

    The delta functions become diagonal restriction, without ``dx`` weights.
    """
    k = gamma.ndim // 2 - 1
    if not 1 <= j <= k:
        raise ValueError(f"contraction index {j} outside 1..{k}")
    if sign not in "+-":
        raise ValueError("sign must be '+' or '-'")
    letters = string.ascii_letters
    xs, xps = letters[:k], letters[k : 2 * k]
    tie = xs[j - 1] if sign == "+" else xps[j - 1]
    spec = f"{xs}{tie}{xps}{tie}->{xs}{xps}"
    return np.einsum(spec, gamma)


def apply_B(gamma: np.ndarray, j: int) -> np.ndarray:
    return contract_B(gamma, j, "+") - contract_B(gamma, j, "-")


def apply_B_sum(gamma: np.ndarray) -> np.ndarray:
    k = gamma.ndim // 2 - 1
    return sum(apply_B(gamma, j) for j in range(1, k + 1))


def _bottom_phi(phi: GridFunction, times, bottom: str) -> np.ndarray:
    if bottom not in BOTTOMS:
        raise ValueError(f"bottom must be one of {BOTTOMS}")
    if bottom == "free":
        return propagate_values(phi.values, phi.grid, times[-1])
    return np.asarray(phi.values)


def _check_times(n: int, times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.shape != (n + 1,):
        raise ValueError(f"need n+1 = {n + 1} times (t_0..t_n), got shape {times.shape}")
    return times


def evaluate_J_full(m: CollisionMap, times, phi: GridFunction, bottom: str = "fixed") -> np.ndarray:
    times = _check_times(m.n, times)
    _guard(phi.grid.N, m.k + m.n)
    gamma = factorized_density(_bottom_phi(phi, times, bottom), m.k + m.n)
    for l in range(m.n, 0, -1):
        gamma = apply_B(gamma, m.mu[l - 1])
        gamma = propagate_density(gamma, phi.grid, times[l - 1] - times[l])
    return gamma


def evaluate_J_total(k: int, n: int, times, phi: GridFunction, bottom: str = "fixed") -> np.ndarray:
    """Iterate with the full ``B_{k+l} = sum_j B_{j;k+l}`` at every level."""
    times = _check_times(n, times)
    _guard(phi.grid.N, k + n)
    gamma = factorized_density(_bottom_phi(phi, times, bottom), k + n)
    for l in range(n, 0, -1):
        gamma = apply_B_sum(gamma)
        gamma = propagate_density(gamma, phi.grid, times[l - 1] - times[l])
    return gamma


class ExprEvaluator:
    """Evaluate interned expressions on a batch of time tuples.

    ``times`` has shape ``(B, n+1)`` and ``bottom`` shape ``(B, N)``; every
    subexpression is computed once per batch (memoized by identity).
    """

    def __init__(self, grid: Grid, times: np.ndarray, bottom: np.ndarray):
        self.grid = grid
        self.times = np.atleast_2d(np.asarray(times, dtype=float))
        self.bottom = np.atleast_2d(bottom)
        self._memo: dict[int, np.ndarray] = {}
        self._keep: list = []

    def __call__(self, e: E.Expr) -> np.ndarray:
        got = self._memo.get(id(e))
        if got is not None:
            return got
        op = e.op
        if op == "phi":
            val = self.bottom
        elif op == "cubic":
            val = np.abs(self.bottom) ** 2 * self.bottom
        elif op == "conj":
            val = np.conj(self(e.args[0]))
        elif op == "prop":
            a, b = e.data
            val = propagate_values(self(e.args[0]), self.grid, self.times[:, a] - self.times[:, b])
        else:
            f, g, h = (self(x) for x in e.args)
            val = f * g * h
        self._memo[id(e)] = val
        self._keep.append(e)
        return val


def _count_terms(kernels) -> int:
    total = 1
    for fk in kernels:
        total *= len(fk.factor)
    return total


def factor_terms(kernels: list[FactorKernels], cap: int = MAX_TERMS) -> None:
    if _count_terms(kernels) > cap:
        raise TermCapExceeded(f"expansion has {_count_terms(kernels)} terms, cap is {cap}")


def evaluate_factor_vectors(fk: FactorKernels, ev: ExprEvaluator):
    """``(signs, psi, chi)`` with ``psi, chi`` of shape ``(terms, B, N)``."""
    signs = np.array([t.sign for t in fk.factor], dtype=float)
    psi = np.stack([ev(t.psi) for t in fk.factor])
    chi = np.stack([ev(t.chi) for t in fk.factor])
    return signs, psi, chi


def evaluate_J_factorized(
    forest, kernels, times, phi: GridFunction, bottom: str = "fixed"
) -> list[np.ndarray]:
    """One ``N x N`` kernel ``J^1_j(x, x')`` per tree."""
    times = _check_times(forest.n, times)
    factor_terms(kernels)
    ev = ExprEvaluator(phi.grid, times[None, :], _bottom_phi(phi, times, bottom)[None, :])
    out = []
    for fk in kernels:
        signs, psi, chi = evaluate_factor_vectors(fk, ev)
        out.append(np.einsum("t,tx,ty->xy", signs, psi[:, 0], chi[:, 0].conj()))
    return out


def tensor_product(factors: list[np.ndarray]) -> np.ndarray:
    """Assemble ``prod_j J_j(x_j, x'_j)`` with axes ``(x_1..x_k, x'_1..x'_k)``."""
    k = len(factors)
    letters = string.ascii_letters
    ins = ",".join(letters[j] + letters[k + j] for j in range(k))
    return np.einsum(f"{ins}->{letters[:2 * k]}", *factors)


def evaluate_J_via_forest(m: CollisionMap, times, phi: GridFunction, bottom: str = "fixed"):
    forest = build_forest(m)
    return evaluate_J_factorized(forest, build_all_kernels(forest), times, phi, bottom)


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(np.abs(a).max(), np.abs(b).max(), 1e-30)
    return float(np.abs(a - b).max() / scale)
