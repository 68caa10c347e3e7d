"""Mechanical replay of the inductive norm estimates on kernel terms.

Each term ``psi (x) conj(chi)`` is a rank-one kernel, so its trace norm is
``||psi|| ||chi||``.  The side that carries ``|phi|^2 phi`` is measured in the
weak (negative regularity) norm, every other function in the strong Sobolev
norm.  The scheduler then peels products in increasing time order:

* a weak product (``case1``/``case2``) uses the trilinear estimate that puts
  the weak norm on its unique distinguished factor and the strong norm on the
  other two; ``case1`` is when that factor is the bare cubic atom, ``case2``
  when it is itself a (merged) propagated product;
* a strong product uses the trilinear Sobolev estimate with all three factors
  strong.

Each product consumes one time integration (one power of ``C T^eps``).
Strong ``phi`` atoms contribute one power of ``||phi||``; the weak cubic atom
is closed at the end by ``|| |phi|^2 phi ||_weak <~ ||phi||^3``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import expr as E
from .errors import InconsistentForest, SchedulerStuck
from .kernels import FactorKernels, Term

MODES = ("1", "2", "3")

# weak norm, strong norm, time gain per integration, final norm of the lemma
NORM_LABELS = {
    "3": ("W^{-(s_c+ε/2),r_ε}", "H^{s_ε}", "T^ε", "H^{s_ε}"),
    "2": ("W^{-(1/3-ε/2),2/(2-ε)}", "H^{1/3}", "T^{1/3}", "H^{1/3}"),
    "1": ("L^1", "L^2", "T^{1/2}", "H^{1/6}"),
}


def normalize_mode(d) -> str:
    d = str(d).strip().lstrip("d")
    if d in ("3", ">=3", "≥3") or (d.isdigit() and int(d) >= 3):
        return "3"
    if d not in MODES:
        raise ValueError(f"dimension mode must be 1, 2 or >=3, got {d!r}")
    return d


@dataclass(frozen=True)
class NormBound:
    time_power: int
    phi_power: int
    prefactor_log2: int
    mode: str = "3"
    distinguished: bool = False
    m: int = 0
    weak_phi_power: int = 0  # strong ||phi|| powers before the cubic closes
    cubic_terminals: int = 0
    cases: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("time_power", "phi_power", "prefactor_log2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    @property
    def terminal_norm(self) -> str:
        return NORM_LABELS[self.mode][0] if self.distinguished else NORM_LABELS[self.mode][1]

    @property
    def strong_norm(self) -> str:
        return NORM_LABELS[self.mode][1]

    def to_json(self) -> dict:
        return {
            "time_power": self.time_power,
            "phi_power": self.phi_power,
            "prefactor_log2": self.prefactor_log2,
            "mode": self.mode,
            "distinguished": self.distinguished,
            "m": self.m,
            "terminal_norm": self.terminal_norm,
            "cases": dict(sorted(self.cases.items())),
        }

    def pretty(self, norm: str | None = None) -> str:
        gain = NORM_LABELS[self.mode][2]
        norm = norm or self.strong_norm
        return (
            f"2^{self.prefactor_log2} (C {gain})^{self.time_power} "
            f"‖φ‖^{self.phi_power}  [‖·‖ = {norm}]"
        )


@dataclass
class _Replay:
    time_power: int = 0
    phi: int = 0
    cubic: int = 0
    cases: dict = field(default_factory=dict)
    used_times: list = field(default_factory=list)


def _peel(e: E.Expr) -> E.Expr:
    # trace and Sobolev norms ignore conjugation and free propagation; the
    # weak chain relies on the merged propagator of the group property
    return E.strip(e)


def schedule_term(term: Term, distinguished: bool) -> _Replay:
    r = _Replay()
    slots = []
    for e in (term.psi, term.chi):
        weak = distinguished and e.distinguished
        slots.append((_peel(e), "weak" if weak else "strong"))
    if distinguished and sum(s == "weak" for _, s in slots) != 1:
        raise SchedulerStuck("distinguished term needs exactly one weak side")
    while True:
        products = [(e.data[0], i) for i, (e, _) in enumerate(slots) if e.op == "prod3"]
        if not products:
            break
        time, i = min(products)
        e, norm = slots.pop(i)
        if r.used_times and time <= r.used_times[-1]:
            raise SchedulerStuck(f"time t{time} integrated out of order")
        args = [_peel(a) for a in e.args]
        if norm == "weak":
            marked = [a for a in args if a.distinguished]
            if len(marked) != 1:
                raise SchedulerStuck(f"weak product at t{time} has {len(marked)} distinguished factors")
            case = "case1" if marked[0].op == "cubic" else "case2"
            slots.extend((a, "weak" if a is marked[0] else "strong") for a in args)
        else:
            if any(a.distinguished for a in args):
                raise SchedulerStuck(f"strong product at t{time} contains |φ|²φ")
            case = "sobolev"
            slots.extend((a, "strong") for a in args)
        r.cases[case] = r.cases.get(case, 0) + 1
        r.time_power += 1
        r.used_times.append(time)
    for e, norm in slots:
        if e.op == "phi" and norm == "strong":
            r.phi += 1
        elif e.op == "cubic" and norm == "weak":
            r.cubic += 1
        else:
            raise SchedulerStuck(f"no rule closes {E.pretty(e)} in the {norm} norm")
    return r


def schedule_bounds(fk: FactorKernels, mode="3", is_distinguished: bool | None = None) -> NormBound:
    mode = normalize_mode(mode)
    dist = fk.distinguished if is_distinguished is None else is_distinguished
    replays = [schedule_term(t, dist) for t in fk.factor]
    shapes = {(r.time_power, r.phi, r.cubic) for r in replays}
    if len(shapes) != 1:
        raise SchedulerStuck(f"terms of tree {fk.j} produced different bounds {sorted(shapes)}")
    time_power, phi, cubic = shapes.pop()
    if cubic != (1 if dist else 0):
        raise SchedulerStuck(f"tree {fk.j} closes {cubic} cubic terminals")
    cases: dict = {}
    for r in replays:
        for key, v in r.cases.items():
            cases[key] = cases.get(key, 0) + v
    return NormBound(
        time_power=time_power,
        phi_power=phi + 3 * cubic,
        prefactor_log2=math.ceil(math.log2(len(fk.factor))),
        mode=mode,
        distinguished=dist,
        m=fk.m,
        weak_phi_power=phi,
        cubic_terminals=cubic,
        cases=cases,
    )


def combine_factors(bounds, k: int, n: int) -> NormBound:
    bounds = list(bounds)
    if len(bounds) != k:
        raise InconsistentForest(f"expected {k} factor bounds, got {len(bounds)}")
    if sum(b.distinguished for b in bounds) != 1:
        raise InconsistentForest("exactly one factor must be distinguished")
    if sum(b.m for b in bounds) != n:
        raise InconsistentForest("internal vertex counts do not add up to n")
    modes = {b.mode for b in bounds}
    if len(modes) != 1:
        raise InconsistentForest(f"mixed dimension modes {sorted(modes)}")
    cases: dict = {}
    for b in bounds:
        for key, v in b.cases.items():
            cases[key] = cases.get(key, 0) + v
    return NormBound(
        time_power=sum(b.time_power for b in bounds),
        phi_power=sum(b.phi_power for b in bounds),
        prefactor_log2=sum(b.prefactor_log2 for b in bounds),
        mode=modes.pop(),
        distinguished=True,
        m=n,
        weak_phi_power=sum(b.weak_phi_power for b in bounds),
        cubic_terminals=sum(b.cubic_terminals for b in bounds),
        cases=cases,
    )


def final_norm(mode) -> str:
    return NORM_LABELS[normalize_mode(mode)][3]


def bound_for_map(m, mode="3"):
    """Forest, per-factor bounds and combined bound of a collision map."""
    from .kernels import build_all_kernels
    from .trees import build_forest

    forest = build_forest(m)
    kernels = build_all_kernels(forest)
    per = [schedule_bounds(fk, mode) for fk in kernels]
    total = combine_factors(per, m.k, m.n)
    return forest, kernels, per, total


def render_schedule(m, mode="3") -> str:
    _, kernels, per, total = bound_for_map(m, mode)
    lines = []
    for fk, b in zip(kernels, per):
        kind = "distinguished" if b.distinguished else "regular"
        lines.append(f"J^1_{fk.j} ({kind}, m={b.m}): {b.pretty()}")
    lines.append(f"J^{m.k}: {total.pretty(final_norm(mode))}")
    return "\n".join(lines) + "\n"

