"""Hash-consed expressions for one-particle functions.

Expressions are interned: structurally equal expressions are the same Python
object, so identity comparison and ``id``-keyed memo tables are valid and the
exponentially many kernel terms share their subexpressions.

Node kinds::

    phi                 the atom phi
    cubic               the atom |phi|^2 phi (marks a distinguished function)
    conj(e)             complex conjugate
    prop(a, b, e)       U_{a,b} e = exp(i (t_a - t_b) Laplacian) e
    prod3(t, e1, e2, e3) pointwise product formed at vertex time t_t
"""
from __future__ import annotations

import threading

_TABLE: dict = {}
_LOCK = threading.Lock()


class Expr:
    __slots__ = ("op", "data", "args", "distinguished", "size", "__weakref__")

    def __init__(self, op, data, args):
        self.op = op
        self.data = data
        self.args = args
        self.distinguished = op == "cubic" or any(a.distinguished for a in args)
        self.size = 1 + sum(a.size for a in args)

    def __repr__(self):
        return f"Expr({pretty(self)})"

    def __str__(self):
        return pretty(self)

    # identity semantics: interning makes structural equality identity
    __hash__ = object.__hash__

    def __eq__(self, other):
        return self is other

    def __reduce__(self):
        return (_rebuild, (to_json(self),))


def _intern(op, data, args):
    key = (op, data, tuple(id(a) for a in args))
    node = _TABLE.get(key)
    if node is None:
        with _LOCK:
            node = _TABLE.get(key)
            if node is None:
                node = Expr(op, data, tuple(args))
                _TABLE[key] = node
    return node


def phi() -> Expr:
    return _intern("phi", (), ())


def cubic() -> Expr:
    return _intern("cubic", (), ())


def conj(e: Expr) -> Expr:
    if e.op == "conj":
        return e.args[0]
    return _intern("conj", (), (e,))


def prop(src: int, dst: int, e: Expr) -> Expr:
    """``U_{src,dst} e``; merges chains by the group property."""
    if src == dst:
        return e
    if e.op == "prop":
        mid, inner = e.data[1], e.args[0]
        if e.data[0] == dst:
            return prop(src, mid, inner)
    return _intern("prop", (src, dst), (e,))


def prod3(time: int, a: Expr, b: Expr, c: Expr) -> Expr:
    return _intern("prod3", (time,), (a, b, c))


def interned_count() -> int:
    return len(_TABLE)


def strip(e: Expr, allow_prop: bool = True) -> Expr:
    """Drop outer conjugations (and propagators when ``allow_prop``)."""
    while e.op == "conj" or (allow_prop and e.op == "prop"):
        e = e.args[0]
    return e


def count_atoms(e: Expr) -> dict[str, int]:
    counts = {"phi": 0, "cubic": 0}
    memo: dict[int, dict] = {}

    def walk(x):
        got = memo.get(id(x))
        if got is not None:
            return got
        if x.op in counts:
            res = {x.op: 1}
        else:
            res = {}
            for a in x.args:
                for key, v in walk(a).items():
                    res[key] = res.get(key, 0) + v
        memo[id(x)] = res
        return res

    counts.update(walk(e))
    return counts


def time_labels(e: Expr) -> set[int]:
    out: set[int] = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if x.op == "prop":
            out.update(x.data)
        elif x.op == "prod3":
            out.add(x.data[0])
        stack.extend(x.args)
    return out


def pretty(e: Expr) -> str:
    """Render in the notation ``U_{a,b}``, ``conj(.)``, ``|f|^2 f``."""
    op = e.op
    if op == "phi":
        return "φ"
    if op == "cubic":
        return "|φ|²φ"
    if op == "conj":
        inner = pretty(e.args[0])
        return f"conj({inner})"
    if op == "prop":
        a, b = e.data
        inner = pretty(e.args[0])
        if e.args[0].op in ("prod3", "cubic"):
            inner = f"({inner})"
        return f"U_{{{a},{b}}}{inner}"
    a, b, c = e.args
    if a is b and c.op == "conj" and c.args[0] is a:
        return f"|{pretty(a)}|²{pretty(a)}"
    if a is c and b.op == "conj" and b.args[0] is a:
        return f"|{pretty(a)}|²{pretty(a)}"
    return " ".join(_factor(x) for x in (a, b, c))


def _factor(e):
    s = pretty(e)
    return f"({s})" if e.op == "prod3" else s


def to_json(e: Expr) -> dict:
    if e.op in ("phi", "cubic"):
        return {"op": e.op}
    if e.op == "conj":
        return {"op": "conj", "arg": to_json(e.args[0])}
    if e.op == "prop":
        return {"op": "prop", "from": e.data[0], "to": e.data[1], "arg": to_json(e.args[0])}
    return {"op": "prod3", "time": e.data[0], "args": [to_json(a) for a in e.args]}


def from_json(d: dict) -> Expr:
    op = d["op"]
    if op == "phi":
        return phi()
    if op == "cubic":
        return cubic()
    if op == "conj":
        return conj(from_json(d["arg"]))
    if op == "prop":
        return prop(int(d["from"]), int(d["to"]), from_json(d["arg"]))
    if op == "prod3":
        return prod3(int(d["time"]), *(from_json(a) for a in d["args"]))
    raise ValueError(f"unknown expression op {op!r}")


def _rebuild(d):
    return from_json(d)
