"""Binary tree graphs (skeleton forests) of a collision map.

Every particle ``p`` traces a line through the expansion: it starts at its
root ``W_p`` (``p <= k``) or at the internal vertex ``v_l`` that creates it
(``p = k + l``), passes through each vertex ``v_l`` with ``mu(k+l) = p`` and
ends in the leaf ``u_p``.  An internal vertex ``v_l`` therefore has exactly two
children: the next event on the receiving line ``mu(k+l)`` and the next event
on the created line ``k+l``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import CollisionMap


@dataclass(frozen=True, order=True)
class TreeVertex:
    kind: str  # "root" | "internal" | "leaf"
    index: int

    def __post_init__(self):
        if self.kind not in ("root", "internal", "leaf"):
            raise ValueError(f"unknown vertex kind {self.kind!r}")
        if self.index < 1:
            raise ValueError("vertex indices are 1-based")

    @property
    def is_internal(self) -> bool:
        return self.kind == "internal"

    @property
    def is_leaf(self) -> bool:
        return self.kind == "leaf"

    def __str__(self):
        return {"root": "W", "internal": "v", "leaf": "u"}[self.kind] + str(self.index)


def root(j):
    return TreeVertex("root", j)


def internal(l):
    return TreeVertex("internal", l)


def leaf(i):
    return TreeVertex("leaf", i)


@dataclass(frozen=True)
class Tree:
    root: int
    internal: tuple[int, ...]
    leaves: tuple[int, ...]
    edges: tuple[tuple[TreeVertex, TreeVertex], ...]

    @property
    def m(self) -> int:
        return len(self.internal)


@dataclass(frozen=True)
class TreeForest:
    k: int
    n: int
    mu: tuple[int, ...]
    trees: tuple[Tree, ...]
    distinguished_index: int
    children: dict  # internal column l -> (kappa_minus, kappa_plus)
    root_child: dict  # root j -> vertex

    @property
    def m(self) -> tuple[int, ...]:
        return tuple(t.m for t in self.trees)

    def tree(self, j: int) -> Tree:
        return self.trees[j - 1]

    def time_owner(self) -> dict[int, int]:
        return {l: t.root for t in self.trees for l in t.internal}

    def to_json(self) -> dict:
        return {
            "trees": [
                {
                    "root": t.root,
                    "internal": list(t.internal),
                    "leaves": list(t.leaves),
                    "edges": [[str(a), str(b)] for a, b in t.edges],
                }
                for t in self.trees
            ],
            "distinguished": self.distinguished_index,
        }

    def to_dot(self) -> str:
        lines = ["graph forest {", "  node [fontname=serif];"]
        for t in self.trees:
            bold = t.root == self.distinguished_index
            attrs = ' [penwidth=3, style=bold]' if bold else ""
            lines.append(f"  subgraph cluster_{t.root} {{")
            lines.append(f'    label="tau{t.root}";')
            names = [root(t.root)] + [internal(l) for l in t.internal] + [leaf(i) for i in t.leaves]
            for v in names:
                shape = {"root": "doublecircle", "internal": "circle", "leaf": "point"}[v.kind]
                xl = f', xlabel="{v}"' if v.is_leaf else ""
                lines.append(f'    {v} [shape={shape}, label="{v if not v.is_leaf else ""}"{xl}];')
            for a, b in t.edges:
                lines.append(f"    {a} -- {b}{attrs};")
            lines.append("  }")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _next_event(mu, k, particle, after):
    """First column ``l > after`` whose contraction receives ``particle``."""
    for l in range(after + 1, len(mu) + 1):
        if mu[l - 1] == particle:
            return internal(l)
    return leaf(particle)


def build_forest(m: CollisionMap) -> TreeForest:
    k, n, mu = m.k, m.n, m.mu
    root_child = {j: _next_event(mu, k, j, 0) for j in range(1, k + 1)}
    # kappa_minus continues the receiving (lower-labelled) particle line,
    # kappa_plus the line of the particle created at this vertex.
    children = {
        l: (_next_event(mu, k, mu[l - 1], l), _next_event(mu, k, k + l, l))
        for l in range(1, n + 1)
    }
    trees = []
    for j in range(1, k + 1):
        edges = [(root(j), root_child[j])]
        stack = [root_child[j]]
        ints, leaves = [], []
        while stack:
            v = stack.pop()
            if v.is_leaf:
                leaves.append(v.index)
                continue
            ints.append(v.index)
            for c in children[v.index]:
                edges.append((v, c))
                stack.append(c)
        trees.append(Tree(j, tuple(sorted(ints)), tuple(sorted(leaves)), tuple(edges)))
    if n >= 1:
        dist = next(t.root for t in trees if n in t.internal)
    else:
        dist = 0
    forest = TreeForest(k, n, mu, tuple(trees), dist, children, root_child)
    _check_forest(forest)
    return forest


def _check_forest(f: TreeForest) -> None:
    assert sum(f.m) == f.n
    assert sum(len(t.leaves) for t in f.trees) == f.k + f.n
    for t in f.trees:
        assert len(t.leaves) == t.m + 1
    if f.n:
        assert sum(f.n in t.internal for t in f.trees) == 1


@dataclass(frozen=True)
class FactorMap:
    """Relabelled one-particle map of tree ``j``.

    ``sigma_j[a - 2]`` is ``sigma_j(a)`` for ``a = 2..m_j+1``; ``time_slots``
    are the global columns (time indices) owned by the tree, increasing.
    """

    j: int
    k: int
    sigma_j: tuple[int, ...]
    time_slots: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.sigma_j)

    def as_map(self) -> CollisionMap:
        return CollisionMap(1, self.m, self.sigma_j)

    def to_json(self) -> dict:
        return {"j": self.j, "sigma_j": list(self.sigma_j), "time_slots": list(self.time_slots)}


def extract_factor_maps(f: TreeForest) -> list[FactorMap]:
    out = []
    for t in f.trees:
        # particle lines of tree j, compressed in order: j -> 1, k+l -> 2, 3, ...
        relabel = {t.root: 1}
        for a, l in enumerate(t.internal, start=2):
            relabel[f.k + l] = a
        sigma = tuple(relabel[f.mu[l - 1]] for l in t.internal)
        out.append(FactorMap(t.root, f.k, sigma, t.internal))
    return out


def tree_shape(f: TreeForest, j: int):
    """Ordered shape of tree ``j``: nested ``(minus, plus)`` tuples, leaves as None."""

    def shape(v):
        if v.is_leaf:
            return None
        a, b = f.children[v.index]
        return (shape(a), shape(b))

    return shape(f.root_child[j])
