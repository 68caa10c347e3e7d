"""Recursive one-particle kernels attached to the vertices of a tree.

A kernel is a signed sum ``sum_b c_b psi_b(x) conj(chi_b(x'))`` with
``c_b = +-1``.  Leaves carry ``phi(x) conj(phi(x'))`` at the bottom time
``t_n``; every internal vertex contracts the kernels of its two children,
each propagated up to the vertex time:

    Theta(x; x') = Theta_-(x; x') [Theta_+(x; x) - Theta_+(x'; x')]

so a vertex doubles the product of its children's term counts.  The vertex
carrying the last column ``n`` has the closed form
``|phi|^2 phi (x) conj(phi)(x') - phi(x) conj(|phi|^2 phi)(x')``.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import expr as E
from .errors import DepthCapExceeded
from .trees import TreeForest, TreeVertex

MAX_DEPTH = 12


@dataclass(frozen=True)
class Term:
    sign: int
    psi: E.Expr
    chi: E.Expr

    def propagate(self, src: int, dst: int) -> "Term":
        return Term(self.sign, E.prop(src, dst, self.psi), E.prop(src, dst, self.chi))

    @property
    def distinguished_count(self) -> int:
        return sum(E.count_atoms(e)["cubic"] for e in (self.psi, self.chi))

    def to_json(self) -> dict:
        return {"sign": self.sign, "psi": E.to_json(self.psi), "chi": E.to_json(self.chi)}

    def pretty(self) -> str:
        s = "+" if self.sign > 0 else "-"
        return f"{s} [{E.pretty(self.psi)}](x) conj[{E.pretty(self.chi)}](x')"


@dataclass(frozen=True)
class KernelExpr:
    """Kernel at local vertex ``alpha`` (global column ``column``) of tree ``j``."""

    j: int
    alpha: int
    column: int
    terms: tuple[Term, ...]

    def __len__(self):
        return len(self.terms)

    def sign_sum(self) -> int:
        return sum(t.sign for t in self.terms)

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "alpha": self.alpha,
            "column": self.column,
            "terms": [t.to_json() for t in self.terms],
        }

    def pretty(self) -> str:
        head = f"Θ_{self.alpha}(x,x') [tree {self.j}, t{self.column}] ="
        return "\n".join([head] + ["    " + t.pretty() for t in self.terms])


def leaf_terms(n: int, top: int) -> tuple[Term, ...]:
    """``phi (x) conj(phi)(x')`` at time ``t_n`` propagated to time ``t_top``."""
    f = E.prop(top, n, E.phi())
    return (Term(1, f, f),)


def distinguished_base() -> tuple[Term, ...]:
    c, p = E.cubic(), E.phi()
    return (Term(1, c, p), Term(-1, p, c))


def contract(time: int, minus: tuple[Term, ...], plus: tuple[Term, ...]) -> tuple[Term, ...]:
    """Both children already propagated to ``t_time``; the ``B^+`` branch of
    each pair precedes its ``B^-`` branch."""
    out = []
    for a in minus:
        for b in plus:
            s = a.sign * b.sign
            out.append(Term(s, E.prod3(time, a.psi, b.psi, E.conj(b.chi)), a.chi))
            out.append(Term(-s, a.psi, E.prod3(time, a.chi, E.conj(b.psi), b.chi)))
    return tuple(out)


@dataclass(frozen=True)
class FactorKernels:
    """All kernels of tree ``j`` plus the propagated factor ``J^1_j``."""

    j: int
    distinguished: bool
    time_slots: tuple[int, ...]
    thetas: tuple[KernelExpr, ...]  # thetas[alpha - 1]
    factor: tuple[Term, ...]  # U_{0, first column} Theta_1, or the bare leaf

    @property
    def m(self) -> int:
        return len(self.time_slots)

    def theta(self, alpha: int) -> KernelExpr:
        return self.thetas[alpha - 1]

    def term_counts(self) -> tuple[int, ...]:
        return tuple(len(t) for t in self.thetas)

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "distinguished": self.distinguished,
            "time_slots": list(self.time_slots),
            "term_counts": list(self.term_counts()),
            "thetas": [t.to_json() for t in self.thetas],
            "factor": [t.to_json() for t in self.factor],
        }

    def pretty(self) -> str:
        lines = [f"tree {self.j}{' (distinguished)' if self.distinguished else ''}:"]
        for th in self.thetas:
            lines.append(th.pretty())
        lines.append(f"J^1_{self.j}(x,x') =")
        lines.extend("    " + t.pretty() for t in self.factor)
        return "\n".join(lines)


def build_kernel(forest: TreeForest, j: int) -> FactorKernels:
    n = forest.n
    if n > MAX_DEPTH:
        raise DepthCapExceeded(f"symbolic expansion limited to n <= {MAX_DEPTH}, got n={n}")
    tree = forest.tree(j)
    local = {l: a for a, l in enumerate(tree.internal, start=1)}
    memo: dict[int, tuple[Term, ...]] = {}

    def child_terms(v: TreeVertex, top: int) -> tuple[Term, ...]:
        if v.is_leaf:
            return leaf_terms(n, top)
        return tuple(t.propagate(top, v.index) for t in theta(v.index))

    def theta(l: int) -> tuple[Term, ...]:
        if l not in memo:
            if l == n:
                memo[l] = distinguished_base()
            else:
                minus, plus = forest.children[l]
                memo[l] = contract(l, child_terms(minus, l), child_terms(plus, l))
        return memo[l]

    # children always carry larger columns, so build bottom-up
    for l in reversed(tree.internal):
        theta(l)
    thetas = tuple(KernelExpr(j, local[l], l, memo[l]) for l in tree.internal)
    if tree.internal:
        factor = tuple(t.propagate(0, tree.internal[0]) for t in memo[tree.internal[0]])
    else:
        factor = leaf_terms(n, 0)
    return FactorKernels(j, j == forest.distinguished_index, tree.internal, thetas, factor)


def build_all_kernels(forest: TreeForest) -> list[FactorKernels]:
    return [build_kernel(forest, t.root) for t in forest.trees]


def expand_term_signs(k: KernelExpr) -> list[tuple[int, E.Expr, E.Expr]]:
    return [(t.sign, t.psi, t.chi) for t in k.terms]


def subtree_size(forest: TreeForest, l: int) -> int:
    """Number of internal vertices below and including ``v_l``."""
    size, stack = 0, [l]
    while stack:
        c = stack.pop()
        size += 1
        stack.extend(v.index for v in forest.children[c] if v.is_internal)
    return size
