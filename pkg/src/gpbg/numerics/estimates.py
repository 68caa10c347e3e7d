"""Empirical ratios for the one-dimensional dispersive and trilinear bounds.

The line is replaced by a large torus.  Data are smooth and concentrated near
the origin; before any evaluation we estimate how far the fastest significant
frequency travels and refuse to run (``WraparoundRisk``) if it could reach the
box boundary.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import WraparoundRisk
from .grid import Grid, GridFunction, lp_norm, propagate_values

SPECTRAL_FLOOR = 1e-13
SUPPORT_FLOOR = 1e-13


def gaussian(grid: Grid, width: float = 0.5, center: float = 0.0, kappa: float = 0.0, amp: complex = 1.0):
    x = grid.centered_x
    return GridFunction(grid, amp * np.exp(-((x - center) ** 2) / (2 * width**2) + 1j * kappa * x))


def gaussian_peak(t, width: float = 0.5):
    """``|exp(it Lap) exp(-x^2 / 2w^2)|`` at the origin."""
    return (1 + 4 * np.asarray(t) ** 2 / width**4) ** -0.25


def sharp_dispersive_constant() -> float:
    """``||exp(it Lap) f||_inf <= (4 pi |t|)^(-1/2) ||f||_1``; Gaussians saturate it."""
    return 1 / (2 * np.sqrt(np.pi))


def _support_halfwidth(values: np.ndarray, grid: Grid) -> float:
    a = np.abs(values)
    mask = a > SUPPORT_FLOOR * a.max()
    return float(np.abs(grid.centered_x[mask]).max()) + grid.dx


def _max_frequency(values: np.ndarray, grid: Grid) -> float:
    a = np.abs(np.fft.fft(values))
    mask = a > SPECTRAL_FLOOR * a.max()
    return float(np.abs(grid.xi[mask]).max())


def wraparound_guard(fs, grid: Grid, t_max: float) -> None:
    for f in fs:
        v = f.values if isinstance(f, GridFunction) else f
        half = _support_halfwidth(v, grid)
        if 2 * half * 16 > grid.L:
            raise WraparoundRisk(f"support width {2 * half:.3g} exceeds L/16 = {grid.L / 16:.3g}")
        reach = half + 2 * _max_frequency(v, grid) * t_max
        if reach >= grid.L / 2:
            raise WraparoundRisk(
                f"dispersed support reaches {reach:.3g} >= L/2 = {grid.L / 2:.3g} by t={t_max}"
            )


@dataclass(frozen=True)
class DispersiveReport:
    r: float
    times: tuple
    ratios: tuple

    @property
    def spread(self) -> float:
        a = np.array(self.ratios)
        return float(a.max() / a.min() - 1)

    def to_json(self) -> dict:
        return {"r": self.r, "times": list(self.times), "ratios": list(self.ratios), "spread": self.spread}


def _conjugate_exponent(r: float) -> float:
    if np.isinf(r):
        return 1.0
    return r / (r - 1)


def check_dispersive(f: GridFunction, times, r: float = np.inf) -> DispersiveReport:
    """``||exp(it Lap) f||_r |t|^(1/2 - 1/r) / ||f||_{r'}`` along ``times``."""
    if not 2 <= r <= np.inf:
        raise ValueError("need 2 <= r <= inf")
    times = np.asarray(times, dtype=float)
    g = f.grid
    wraparound_guard([f], g, float(np.abs(times).max()))
    u = propagate_values(np.broadcast_to(f.values, (len(times), g.N)), g, times)
    exponent = 0.5 - (0 if np.isinf(r) else 1 / r)
    lhs = lp_norm(u, g, r) * np.abs(times) ** exponent
    ratios = lhs / f.norm(_conjugate_exponent(r))
    return DispersiveReport(float(r), tuple(times.tolist()), tuple(ratios.tolist()))


def log_times(t_min: float, t_max: float, count: int = 9) -> np.ndarray:
    return np.geomspace(t_min, t_max, count)


def random_packets(grid: Grid, rng: np.random.Generator, count: int, pieces: int = 3):
    """Sums of modulated Gaussians with widths in [0.5, 1], |kappa| <= 2, centres in [-4, 4]."""
    out = []
    for _ in range(count):
        v = np.zeros(grid.N, dtype=complex)
        for _ in range(pieces):
            amp = rng.standard_normal() + 1j * rng.standard_normal()
            v = v + gaussian(
                grid,
                width=rng.uniform(0.5, 1.0),
                center=rng.uniform(-4, 4),
                kappa=rng.uniform(-2, 2),
                amp=amp,
            ).values
        out.append(GridFunction(grid, v))
    return out


# trilinear form T(f, g, h)(t) = prod_i exp(i (t - t_i) Lap) f_i


@dataclass(frozen=True)
class TrilinearReport:
    T: float
    shifts: tuple
    lhs_l1: float
    lhs_l2: float
    ratio_l1: float
    ratio_l2: float

    def to_json(self) -> dict:
        return {
            "T": self.T,
            "shifts": list(self.shifts),
            "lhs_l1": self.lhs_l1,
            "lhs_l2": self.lhs_l2,
            "ratio_l1": self.ratio_l1,
            "ratio_l2": self.ratio_l2,
        }


def _time_rule(T: float, shifts, order: int):
    """Composite Gauss-Legendre on ``[0, T)`` split at the shift times."""
    cuts = np.unique(np.clip(np.concatenate([[0.0, T], np.asarray(shifts, float)]), 0, T))
    x, w = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= 0:
            continue
        nodes.append((b - a) / 2 * x + (a + b) / 2)
        weights.append((b - a) / 2 * w)
    return np.concatenate(nodes), np.concatenate(weights)


def trilinear_norms(f, g, h, T: float, shifts=(0.0, 0.0, 0.0), order: int = 16):
    """``(||T||_{L^1_t L^1_x}, ||T||_{L^1_t L^2_x})`` over ``t`` in ``[0, T)``."""
    grid = f.grid
    t, w = _time_rule(T, shifts, order)
    prod = np.ones((len(t), grid.N), dtype=complex)
    for fn, s in zip((f, g, h), shifts):
        prod = prod * propagate_values(np.broadcast_to(fn.values, (len(t), grid.N)), grid, t - s)
    l1 = float(w @ lp_norm(prod, grid, 1))
    l2 = float(w @ lp_norm(prod, grid, 2))
    return l1, l2


def check_trilinear_d1(f, g, h, T: float, shifts=(0.0, 0.0, 0.0), order: int = 16) -> TrilinearReport:
    wraparound_guard([f, g, h], f.grid, T)
    l1, l2 = trilinear_norms(f, g, h, T, shifts, order)
    scale = np.sqrt(T) * g.norm(2) * h.norm(2)
    return TrilinearReport(
        float(T),
        tuple(float(s) for s in shifts),
        l1,
        l2,
        float(l1 / (scale * f.norm(1))),
        float(l2 / (scale * f.norm(2))),
    )


def trilinear_corpus(grid: Grid, rng: np.random.Generator, count: int = 100, T: float = 1.0):
    """Triples of random packets with shift times drawn in ``[0, T)``."""
    out = []
    for _ in range(count):
        f, g, h = random_packets(grid, rng, 3)
        shifts = tuple(rng.uniform(0, T, 3).tolist())
        out.append((f, g, h, shifts))
    return out
