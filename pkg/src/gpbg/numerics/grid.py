"""Periodic spectral grid, grid functions and the free Schrödinger flow.

``propagate(f, s)`` applies ``exp(i s Laplacian)``, i.e. the Fourier multiplier
``exp(-i xi^2 s)``; ``U_{a,b}`` of the kernel calculus is ``propagate`` with
``s = t_a - t_b``.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

MAGIC = b"GPGF"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQ")


@dataclass(frozen=True)
class Grid:
    N: int
    L: float = 2 * np.pi

    def __post_init__(self):
        if self.N < 8 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 8, got {self.N}")
        if not self.L > 0:
            raise ValueError("L must be positive")

    @property
    def dx(self) -> float:
        return self.L / self.N

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.N) * self.dx

    @cached_property
    def centered_x(self) -> np.ndarray:
        """Coordinates in ``[-L/2, L/2)``, matching ``x`` sample by sample."""
        return np.where(self.x < self.L / 2, self.x, self.x - self.L)

    @cached_property
    def xi(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.N, d=self.dx)

    @cached_property
    def xi2(self) -> np.ndarray:
        return self.xi**2


def multiplier(grid: Grid, s) -> np.ndarray:
    """``exp(-i xi^2 s)`` with shape ``s.shape + (N,)``."""
    s = np.asarray(s, dtype=float)
    return np.exp(-1j * s[..., None] * grid.xi2)


def propagate_values(values: np.ndarray, grid: Grid, s) -> np.ndarray:
    """Free flow along the last axis; ``s`` broadcasts against the leading axes."""
    s = np.asarray(s, dtype=float)
    if not np.any(s):
        return np.array(values, dtype=complex)
    return np.fft.ifft(np.fft.fft(values, axis=-1) * multiplier(grid, s), axis=-1)


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.N,):
            raise ValueError(f"expected {self.grid.N} samples, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "GridFunction":
        return cls(grid, fn(grid.x))

    def norm(self, p: float = 2) -> float:
        return lp_norm(self.values, self.grid, p)

    def __eq__(self, other):
        return (
            isinstance(other, GridFunction)
            and self.grid == other.grid
            and np.array_equal(self.values, other.values)
        )

    def to_bytes(self) -> bytes:
        body = np.ascontiguousarray(self.values, dtype="<c16").tobytes()
        return _HEADER.pack(MAGIC, FORMAT_VERSION, self.grid.N) + body

    @classmethod
    def from_bytes(cls, data: bytes, L: float = 2 * np.pi) -> "GridFunction":
        magic, version, N = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ValueError("not a grid function file")
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported grid function version {version}")
        body = np.frombuffer(data, dtype="<c16", offset=_HEADER.size)
        if body.size != N:
            raise ValueError(f"header says {N} samples, body has {body.size}")
        return cls(Grid(int(N), L), body.astype(complex))

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path, L: float = 2 * np.pi) -> "GridFunction":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read(), L)


def lp_norm(values: np.ndarray, grid: Grid, p: float = 2, axis=-1):
    a = np.abs(values)
    if np.isinf(p):
        return a.max(axis=axis)
    return (np.sum(a**p, axis=axis) * grid.dx) ** (1 / p)


def propagate(f: GridFunction, dt: float) -> GridFunction:
    return GridFunction(f.grid, propagate_values(f.values, f.grid, dt))


def band_limited(grid: Grid, rng: np.random.Generator, modes: int = 3) -> GridFunction:
    """Random trigonometric polynomial with frequencies ``|m| <= modes``."""
    m = np.arange(-modes, modes + 1)
    coef = (rng.standard_normal(m.size) + 1j * rng.standard_normal(m.size)) / np.sqrt(2 * m.size)
    vals = np.exp(2j * np.pi * np.outer(grid.x, m) / grid.L) @ coef
    return GridFunction(grid, vals)
