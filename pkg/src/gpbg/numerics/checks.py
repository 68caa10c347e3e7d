"""Integral identities of the board game, checked by quadrature.

The integrand of a board is a scalar functional of the iterate: the kernel at
a fixed probe pair together with its discrete trace.  Both are read off the
factorized form, so no tensor larger than ``N x N`` is formed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..board import BoardState, EchelonClass, acceptable_move
from ..core import CollisionMap, matrix_to_map
from ..kernels import build_all_kernels
from ..trees import build_forest
from .duhamel import ExprEvaluator, evaluate_factor_vectors, factor_terms
from .grid import GridFunction, propagate_values
from .quadrature import SimplexQuadrature


def probe_indices(N: int, k: int) -> tuple[list[int], list[int]]:
    """Deterministic, generic probe points for ``x`` and ``x'``."""
    xs = [(3 + 5 * j) % N for j in range(k)]
    xps = [(N // 2 + 1 + 3 * j) % N for j in range(k)]
    return xs, xps


def functional_values(m: CollisionMap, times: np.ndarray, phi: GridFunction, bottom: str = "free"):
    """``(B, 2)`` array: probe value and discrete trace of ``J(mu; times[b])``."""
    times = np.atleast_2d(times)
    forest = build_forest(m)
    kernels = build_all_kernels(forest)
    factor_terms(kernels)
    g = phi.grid
    if bottom == "free":
        base = propagate_values(np.broadcast_to(phi.values, (len(times), g.N)), g, times[:, -1])
    else:
        base = np.broadcast_to(phi.values, (len(times), g.N))
    ev = ExprEvaluator(g, times, base)
    xs, xps = probe_indices(g.N, m.k)
    probe = np.ones(len(times), dtype=complex)
    trace = np.ones(len(times), dtype=complex)
    for fk in kernels:
        j = fk.j - 1
        signs, psi, chi = evaluate_factor_vectors(fk, ev)
        probe *= np.einsum("t,tb,tb->b", signs, psi[:, :, xs[j]], chi[:, :, xps[j]].conj())
        trace *= np.einsum("t,tbx,tbx->b", signs, psi, chi.conj()) * g.dx
    return np.stack([probe, trace], axis=1)


def board_integral(b: BoardState, phi: GridFunction, quad: SimplexQuadrature, t: float, bottom="free"):
    """Ordered-simplex integral of the board's integrand (column ``l`` at ``t_{sigma^-1(l)}``)."""
    m = b.collision_map()
    cols = np.array(b.column_times) - 1

    def integrand(v):
        times = np.concatenate([np.full((len(v), 1), t), v[:, cols]], axis=1)
        return functional_values(m, times, phi, bottom)

    return quad.integrate(integrand, m.n, t)


def relative_difference(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    scale = max(np.abs(a).max(), np.abs(b).max(), 1e-30)
    return float(np.abs(a - b).max() / scale)


@dataclass(frozen=True)
class MoveReport:
    mu: tuple
    time_order: tuple
    j: int
    order: int
    difference: float

    def to_json(self) -> dict:
        return {
            "mu": list(self.mu),
            "sigma": list(self.time_order),
            "j": self.j,
            "order": self.order,
            "difference": self.difference,
        }


def verify_move_invariance(b: BoardState, b2: BoardState, phi, quad, t, bottom="free") -> float:
    if b == b2:
        return 0.0
    return relative_difference(
        board_integral(b, phi, quad, t, bottom), board_integral(b2, phi, quad, t, bottom)
    )


def legal_moves(b: BoardState):
    from ..board import move_applies

    return [j for j in range(1, b.n) if move_applies(b, j)]


def sweep_moves(k: int, n: int, phi, quad, t, bottom="free") -> list[MoveReport]:
    """Every legal single move from every board reachable from an initial board."""
    from ..board import reachable_boards
    from ..core import iter_maps

    reports, seen = [], set()
    for m in iter_maps(k, n):
        boards, _ = reachable_boards(m)
        for b in boards:
            if b in seen:
                continue
            seen.add(b)
            for j in legal_moves(b):
                d = verify_move_invariance(b, acceptable_move(b, j), phi, quad, t, bottom)
                reports.append(MoveReport(b.mu, b.time_order.sigma, j, quad.order, d))
    return reports


def class_sides(cls: EchelonClass, phi, quad: SimplexQuadrature, t: float, bottom="free"):
    """Left: members over the standard simplex.  Right: representative over ``D``."""
    lhs = sum(
        board_integral(BoardState.initial(m), phi, quad, t, bottom) for m, _ in cls.members
    )
    rep = matrix_to_map(cls.representative)
    rhs = 0
    for sigma in sorted(cls.domain, key=lambda s: s.sigma):
        pts, w = quad.nodes_for_order(rep.n, t, sigma.sigma)
        times = np.concatenate([np.full((len(pts), 1), t), pts], axis=1)
        rhs = rhs + np.tensordot(w, functional_values(rep, times, phi, bottom), axes=1)
    return lhs, rhs


def verify_domain_union(cls: EchelonClass, phi, quad, t, bottom="free") -> float:
    if len(cls.members) == 1 and cls.members[0][1].is_identity():
        return 0.0
    lhs, rhs = class_sides(cls, phi, quad, t, bottom)
    return relative_difference(lhs, rhs)
