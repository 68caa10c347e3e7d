"""Command line front end.

Exit status: 0 when every check passes, 1 when a check fails, 2 on guard
violations and usage errors.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import suite
from .board import partition_classes, reduce_to_echelon, reduction_dot
from .bounds import bound_for_map, final_norm, normalize_mode, render_schedule
from .core import CollisionMap, dumps, enumerate_maps, map_to_matrix, parse_mu
from .errors import GPBGError, GuardError
from .kernels import build_all_kernels
from .numerics.reports import atomic_write, clean, to_csv
from .trees import build_forest, extract_factor_maps

COMMANDS = ("enumerate", "reduce", "classes", "forest", "kernels", "schedule", "verify")
VERIFY_TARGETS = ("invariance", "domain-union", "factorization", "hierarchy", "dispersive", "trilinear", "all")
FORMATS = ("json", "csv", "dot", "pretty")


class UsageError(Exception):
    pass


def _int(text: str) -> int:
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, help="number of particles k")
    common.add_argument("--n", type=int, help="expansion depth n")
    common.add_argument("--map", help="collision map as comma separated mu(k+1),...,mu(k+n)")
    common.add_argument("--N", type=int, help="grid points (power of two)")
    common.add_argument("--L", type=float, help="torus length")
    common.add_argument("--order", type=int, help="quadrature order")
    common.add_argument("--dim", default="3", help="dimension mode for bounds: 1, 2 or 3 (meaning d >= 3)")
    common.add_argument("--seed", type=_int, default=suite.DEFAULT_SEED, help="RNG seed (default 0xC0FFEE)")
    common.add_argument("--output", "-o", help="write the artifact here instead of stdout")
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--jobs", type=int, help="worker processes (default: $GPBG_JOBS or 1)")

    p = argparse.ArgumentParser(
        prog="gpbg",
        description="Collision maps, board-game normal forms, tree kernels and numerical checks "
        "for Duhamel expansions of the cubic Gross-Pitaevskii hierarchy.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "enumerate": "list all collision maps of type (k, n)",
        "reduce": "reduce a map to special upper echelon form",
        "classes": "partition all maps into echelon classes",
        "forest": "binary tree forest of a map",
        "kernels": "recursive kernels of every tree",
        "schedule": "replay the norm estimates and print the bound",
        "verify": "run numerical and combinatorial checks",
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=helps[name], description=helps[name])
        if name == "verify":
            sp.add_argument("target", choices=VERIFY_TARGETS)
    return p


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("GPBG_JOBS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise UsageError(f"GPBG_JOBS must be an integer, got {env!r}")


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs {', '.join(missing)}")


def _map(args) -> CollisionMap:
    _need(args, "k", "map")
    mu = parse_mu(args.map)
    n = len(mu) if args.n is None else args.n
    try:
        return CollisionMap(args.k, n, mu)
    except ValueError as exc:
        raise UsageError(str(exc))


def _unsupported(args):
    raise UsageError(f"format {args.format!r} is not available for {args.command}")


def cmd_enumerate(args):
    _need(args, "k", "n")
    maps = enumerate_maps(args.k, args.n)
    if args.format == "json":
        return dumps({"k": args.k, "n": args.n, "count": len(maps), "maps": [m.to_json() for m in maps]})
    if args.format == "csv":
        return to_csv([{"index": i, "mu": " ".join(map(str, m.mu))} for i, m in enumerate(maps)], ["index", "mu"])
    if args.format == "pretty":
        return "".join(f"{m}\n" for m in maps)
    _unsupported(args)


def cmd_reduce(args):
    m = _map(args)
    rep, sigma, moves = reduce_to_echelon(m)
    if args.format == "json":
        return dumps({"map": m.to_json(), "representative": rep.to_json(), "sigma": list(sigma.sigma), "moves": moves})
    if args.format == "dot":
        return reduction_dot(m)
    if args.format == "pretty":
        return (
            f"{m}\nmoves: {moves}\nsigma: {list(sigma.sigma)}\n"
            f"input:\n{map_to_matrix(m).render()}\nechelon:\n{rep.render()}\n"
        )
    _unsupported(args)


def cmd_classes(args):
    _need(args, "k", "n")
    classes = partition_classes(args.k, args.n)
    bound = 2 ** (args.k + 2 * args.n - 2)
    if args.format == "json":
        return dumps({"k": args.k, "n": args.n, "count": len(classes), "bound": bound,
                      "classes": [c.to_json() for c in classes]})
    if args.format == "csv":
        rows = [
            {"representative": " ".join(map(str, c.representative.highlight)),
             "mu": " ".join(map(str, m.mu)), "sigma": " ".join(map(str, s.sigma))}
            for c in classes for m, s in c.members
        ]
        return to_csv(rows, ["representative", "mu", "sigma"])
    if args.format == "pretty":
        lines = [f"{len(classes)} classes (bound {bound})"]
        for c in classes:
            lines.append(f"[{','.join(map(str, c.representative.highlight))}]: {len(c.members)} members")
        return "\n".join(lines) + "\n"
    _unsupported(args)


def cmd_forest(args):
    m = _map(args)
    f = build_forest(m)
    if args.format == "json":
        return dumps({**f.to_json(), "m": list(f.m), "factor_maps": [fm.to_json() for fm in extract_factor_maps(f)]})
    if args.format == "dot":
        return f.to_dot()
    if args.format == "pretty":
        lines = []
        for t in f.trees:
            tag = " (distinguished)" if t.root == f.distinguished_index else ""
            lines.append(f"tau{t.root}{tag}: internal {list(t.internal)} leaves {list(t.leaves)}")
        return "\n".join(lines) + "\n"
    _unsupported(args)


def cmd_kernels(args):
    m = _map(args)
    kernels = build_all_kernels(build_forest(m))
    if args.format == "json":
        return dumps({"map": m.to_json(), "factors": [fk.to_json() for fk in kernels]})
    if args.format == "pretty":
        return "\n\n".join(fk.pretty() for fk in kernels) + "\n"
    if args.format == "csv":
        rows = [
            {"tree": fk.j, "alpha": th.alpha, "column": th.column, "terms": len(th), "sign_sum": th.sign_sum()}
            for fk in kernels for th in fk.thetas
        ]
        return to_csv(rows, ["tree", "alpha", "column", "terms", "sign_sum"])
    _unsupported(args)


def cmd_schedule(args):
    m = _map(args)
    try:
        mode = normalize_mode(args.dim)
    except ValueError as exc:
        raise UsageError(str(exc))
    _, _, per, total = bound_for_map(m, mode)
    if args.format == "pretty":
        return render_schedule(m, mode)
    if args.format == "json":
        return dumps({"map": m.to_json(), "factors": [b.to_json() for b in per],
                      "total": total.to_json(), "final_norm": final_norm(mode)})
    if args.format == "csv":
        rows = [{"factor": i, **b.to_json()} for i, b in enumerate(per, start=1)]
        cols = ["factor", "m", "distinguished", "time_power", "phi_power", "prefactor_log2", "terminal_norm"]
        return to_csv(rows, cols)
    _unsupported(args)


def _verify_params(args) -> dict:
    params = {"seed": args.seed}
    for name in ("k", "n", "N", "L", "order"):
        v = getattr(args, name)
        if v is not None:
            params[name] = v
    return params


def cmd_verify(args):
    if args.format == "dot":
        _unsupported(args)
    if args.target == "all":
        ids = sorted(suite.CRITERIA)
        # acceptance configuration; only the seed is configurable
        params = {"seed": args.seed}
    else:
        ids = [suite.TARGETS[args.target]]
        params = _verify_params(args)
    results = suite.run_criteria(ids, params, _jobs(args))
    report = suite.summary(results)
    if args.format == "csv":
        rows = [{"criterion": r["criterion"], "check": r["check"], "pass": r["pass"]} for r in results]
        text = to_csv(rows, ["criterion", "check", "pass"])
    elif args.format == "pretty":
        text = "".join(f"[{'PASS' if r['pass'] else 'FAIL'}] {r['criterion']:>2} {r['check']}\n" for r in results)
    else:
        text = dumps(clean(report))
    return text, report["pass"]


HANDLERS = {
    "enumerate": cmd_enumerate,
    "reduce": cmd_reduce,
    "classes": cmd_classes,
    "forest": cmd_forest,
    "kernels": cmd_kernels,
    "schedule": cmd_schedule,
    "verify": cmd_verify,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    ok = True
    try:
        out = HANDLERS[args.command](args)
        if isinstance(out, tuple):
            out, ok = out
    except UsageError as exc:
        print(f"gpbg: error: {exc}", file=sys.stderr)
        return 2
    except GuardError as exc:
        print(f"gpbg: guard: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (GPBGError, ValueError) as exc:
        print(f"gpbg: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.output:
        atomic_write(args.output, out)
    else:
        sys.stdout.write(out)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
