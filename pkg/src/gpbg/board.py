"""Acceptable moves, special upper echelon form and equivalence classes.

A board is a highlighted matrix plus the row of time labels above it.  Column
``l`` carries the time variable ``t_{sigma^{-1}(l)}``; the associated integral
runs over the simplex ``t >= t_{sigma(1)} >= ... >= t_{sigma(n)}``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .core import (
    CollisionMap,
    HighlightedMatrix,
    Permutation,
    iter_maps,
    map_to_matrix,
)
from .errors import MoveNotApplicable


@dataclass(frozen=True)
class BoardState:
    matrix: HighlightedMatrix
    time_order: Permutation

    def __post_init__(self):
        if self.matrix.n != self.time_order.n:
            raise ValueError("matrix and time row disagree on n")

    @classmethod
    def initial(cls, m: CollisionMap) -> "BoardState":
        return cls(map_to_matrix(m), Permutation.identity(m.n))

    @property
    def k(self) -> int:
        return self.matrix.k

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def mu(self) -> tuple[int, ...]:
        return self.matrix.highlight

    @property
    def column_times(self) -> tuple[int, ...]:
        """Index of the time variable sitting above each column."""
        return self.time_order.inverse().sigma

    def collision_map(self) -> CollisionMap:
        return CollisionMap(self.k, self.n, self.mu)

    def label(self) -> str:
        times = " ".join(f"t{i}" for i in self.column_times)
        return f"[{','.join(map(str, self.mu))}] ({times})"


def is_upper_echelon(m: HighlightedMatrix) -> bool:
    h = m.highlight
    return all(h[i] <= h[i + 1] for i in range(len(h) - 1))


def move_applies(b: BoardState, j: int) -> bool:
    return 1 <= j <= b.n - 1 and b.mu[j] < b.mu[j - 1]


def acceptable_move(b: BoardState, j: int) -> BoardState:
    """Exchange columns ``j, j+1``, rows ``k+j, k+j+1`` and their time labels."""
    if not move_applies(b, j):
        raise MoveNotApplicable(
            f"move at column {j} needs mu(k+j+1) < mu(k+j) on board {b.label()}"
        )
    return exchange(b, j)


def exchange(b: BoardState, j: int) -> BoardState:
    """The three swaps of a move, without the applicability check (an involution)."""
    if not 1 <= j <= b.n - 1:
        raise MoveNotApplicable(f"column {j} has no right neighbour")
    k = b.k
    h = list(b.mu)
    h[j - 1], h[j] = h[j], h[j - 1]
    swap = {k + j: k + j + 1, k + j + 1: k + j}
    h = [swap.get(r, r) for r in h]
    cols = list(b.column_times)
    cols[j - 1], cols[j] = cols[j], cols[j - 1]
    return BoardState(
        HighlightedMatrix(k, b.n, tuple(h)), Permutation(tuple(cols)).inverse()
    )


def replay(m: CollisionMap, moves) -> BoardState:
    b = BoardState.initial(m)
    for j in moves:
        b = acceptable_move(b, j)
    return b


def reduce_to_echelon(m: CollisionMap):
    """Sweep each row's highlights, top row first, into the leftmost free columns.

    Returns ``(representative, sigma, moves)``.  At most ``n(n-1)/2`` moves.
    """
    b = BoardState.initial(m)
    moves: list[int] = []
    free = 1
    for row in range(1, m.rows + 1):
        while True:
            cols = [c for c in range(free, b.n + 1) if b.mu[c - 1] == row]
            if not cols:
                break
            for j in range(cols[0] - 1, free - 1, -1):
                b = acceptable_move(b, j)
                moves.append(j)
            free += 1
    assert is_upper_echelon(b.matrix)
    assert len(moves) <= m.n * (m.n - 1) // 2
    return b.matrix, b.time_order, moves


@dataclass(frozen=True)
class EchelonClass:
    representative: HighlightedMatrix
    members: tuple[tuple[CollisionMap, Permutation], ...]
    domain: frozenset = field(default=frozenset())

    def __post_init__(self):
        if not is_upper_echelon(self.representative):
            raise ValueError("class representative must be upper echelon")
        if not self.domain:
            object.__setattr__(self, "domain", frozenset(s for _, s in self.members))

    def permutations_distinct(self) -> bool:
        return len({s for _, s in self.members}) == len(self.members)

    def to_json(self) -> dict:
        return {
            "representative": self.representative.to_json(),
            "members": [{"mu": list(m.mu), "sigma": list(s.sigma)} for m, s in self.members],
        }


def partition_classes(k: int, n: int) -> list[EchelonClass]:
    """Group every map of type ``(k, n)`` by its echelon representative."""
    groups: dict[tuple[int, ...], list] = {}
    for m in iter_maps(k, n):
        rep, sigma, _ = reduce_to_echelon(m)
        groups.setdefault(rep.highlight, []).append((m, sigma))
    return [
        EchelonClass(HighlightedMatrix(k, n, rep), tuple(members))
        for rep, members in sorted(groups.items())
    ]


def reachable_boards(m: CollisionMap) -> tuple[list[BoardState], list[tuple[int, int, int]]]:
    """All boards reachable from ``(m, id)`` by acceptable moves, with edges."""
    start = BoardState.initial(m)
    index = {start: 0}
    order = [start]
    edges = []
    queue = deque([start])
    while queue:
        b = queue.popleft()
        for j in range(1, b.n):
            if not move_applies(b, j):
                continue
            nb = acceptable_move(b, j)
            if nb not in index:
                index[nb] = len(order)
                order.append(nb)
                queue.append(nb)
            edges.append((index[b], index[nb], j))
    return order, edges


def reachable_echelon_forms(m: CollisionMap) -> set[tuple[int, ...]]:
    boards, _ = reachable_boards(m)
    return {b.mu for b in boards if is_upper_echelon(b.matrix)}


def reduction_dot(m: CollisionMap) -> str:
    boards, edges = reachable_boards(m)
    rep, _, _ = reduce_to_echelon(m)
    lines = ["digraph reduction {", "  node [shape=box, fontname=monospace];"]
    for i, b in enumerate(boards):
        style = ", style=bold" if b.mu == rep.highlight else ""
        lines.append(f'  b{i} [label="{b.label()}"{style}];')
    for a, c, j in edges:
        lines.append(f'  b{a} -> b{c} [label="j={j}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
