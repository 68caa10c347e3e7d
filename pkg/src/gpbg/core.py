"""Collision maps, highlighted matrices, permutations and time labels.

A collision map ``mu`` of type ``(k, n)`` assigns to every new particle
``k + l`` (``l = 1..n``) the earlier particle ``mu(k + l) < k + l`` it is
contracted into.  We store it 1-based in a tuple: ``mu[l - 1] = mu(k + l)``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import SizeGuardExceeded

MAX_ENUMERATION = 10**7


def map_count(k: int, n: int) -> int:
    """Number of collision maps, ``k (k+1) ... (k+n-1)``."""
    return math.prod(range(k, k + n))


@dataclass(frozen=True)
class CollisionMap:
    k: int
    n: int
    mu: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1 or self.n < 0:
            raise ValueError(f"need k >= 1 and n >= 0, got k={self.k}, n={self.n}")
        object.__setattr__(self, "mu", tuple(int(v) for v in self.mu))
        if len(self.mu) != self.n:
            raise ValueError(f"mu has length {len(self.mu)}, expected {self.n}")
        for l, v in enumerate(self.mu, start=1):
            if not 1 <= v <= self.k + l - 1:
                raise ValueError(f"mu({self.k + l}) = {v} outside 1..{self.k + l - 1}")

    def __call__(self, j: int) -> int:
        """Evaluate the map at particle index ``j`` in ``k+1..k+n``."""
        return self.mu[j - self.k - 1]

    @property
    def rows(self) -> int:
        return self.k + self.n - 1

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "mu": list(self.mu)}

    @classmethod
    def from_json(cls, data: dict) -> "CollisionMap":
        return cls(int(data["k"]), int(data["n"]), tuple(data["mu"]))

    def __str__(self):
        return f"mu[k={self.k}]({','.join(map(str, self.mu))})"


@dataclass(frozen=True)
class HighlightedMatrix:
    """The ``(k+n-1) x n`` board with one highlighted entry per column.

    ``highlight[l-1]`` is the row of the highlight in column ``l``.
    """

    k: int
    n: int
    highlight: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "highlight", tuple(int(v) for v in self.highlight))
        if len(self.highlight) != self.n:
            raise ValueError("one highlight per column required")
        for l, r in enumerate(self.highlight, start=1):
            if not 1 <= r <= self.k + l - 1:
                raise ValueError(f"highlight ({r}, {l}) lies below the staircase")

    @property
    def rows(self) -> int:
        return self.k + self.n - 1

    def cells(self) -> list[tuple[int, int]]:
        """Highlighted ``(row, column)`` pairs, 1-based."""
        return [(r, l) for l, r in enumerate(self.highlight, start=1)]

    def render(self) -> str:
        lines = []
        for r in range(1, self.rows + 1):
            row = []
            for l in range(1, self.n + 1):
                if r > self.k + l - 1:
                    row.append("0")
                elif self.highlight[l - 1] == r:
                    row.append(f"*B{r};{self.k + l}*")
                else:
                    row.append(f"B{r};{self.k + l}")
            lines.append("  ".join(f"{c:>9}" for c in row))
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "mu": list(self.highlight), "rows": self.rows}

    @classmethod
    def from_json(cls, data: dict) -> "HighlightedMatrix":
        return cls(int(data["k"]), int(data["n"]), tuple(data["mu"]))


@dataclass(frozen=True)
class Permutation:
    """Bijection of ``{1..n}``; ``sigma[i-1] = sigma(i)``."""

    sigma: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(int(v) for v in self.sigma))
        if sorted(self.sigma) != list(range(1, len(self.sigma) + 1)):
            raise ValueError(f"{self.sigma} is not a permutation")

    @property
    def n(self) -> int:
        return len(self.sigma)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    def __call__(self, i: int) -> int:
        return self.sigma[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, v in enumerate(self.sigma, start=1):
            inv[v - 1] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.sigma == tuple(range(1, self.n + 1))


@dataclass(frozen=True, order=True)
class TimeLabel:
    """Index of a time variable; ``t_0`` is the outer time ``t``."""

    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("time labels are non-negative")

    def __str__(self):
        return f"t{self.index}"


def _check_size(k: int, n: int) -> int:
    if k < 1 or n < 1:
        raise ValueError(f"need k >= 1 and n >= 1, got k={k}, n={n}")
    count = map_count(k, n)
    if count > MAX_ENUMERATION:
        raise SizeGuardExceeded(f"|M_(k={k},n={n})| = {count} exceeds {MAX_ENUMERATION}")
    return count


def iter_maps(k: int, n: int) -> Iterator[CollisionMap]:
    """Lazily yield all collision maps in lexicographic order of ``mu``."""
    _check_size(k, n)
    ranges = [range(1, k + l) for l in range(1, n + 1)]
    for mu in itertools.product(*ranges):
        yield CollisionMap(k, n, mu)


def enumerate_maps(k: int, n: int) -> list[CollisionMap]:
    maps = list(iter_maps(k, n))
    assert len(maps) == map_count(k, n)
    return maps


def map_to_matrix(m: CollisionMap) -> HighlightedMatrix:
    return HighlightedMatrix(m.k, m.n, m.mu)


def matrix_to_map(h: HighlightedMatrix) -> CollisionMap:
    return CollisionMap(h.k, h.n, h.highlight)


def parse_mu(text: str | Sequence[int]) -> tuple[int, ...]:
    if isinstance(text, str):
        return tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
    return tuple(int(v) for v in text)


def dumps(obj) -> str:
    """Canonical JSON used for every artifact (stable key order)."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
