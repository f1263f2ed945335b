"""Command line: solve, build, simulate, verify.

Exit codes: 0 success, 1 invariant failure or illegal move, 2 usage or
input error, 3 state budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .constructions import (HatSpace, WedgeSpace, attach_hat, build_cylinder, build_hat,
                            build_top, counterexample_one, default_levels, expand_subspace,
                            required_height, skeleton_of, subdivide)
from .discrete import DEFAULT_BUDGET, DiscreteGraph, solve
from .errors import BudgetExceeded, IllegalMove, MetricCopsError
from .game import GameTrace, Schedule, new_game
from .generators import from_spec, read_edge_list
from .metric import MetricGraph
from .strategies import (GreedyCops, LiftedCops, RandomCops, RandomRobber, ShadowRobber,
                         pretend_robber_strategy)
from .verify import verify_space, verify_trace

log = logging.getLogger("metric_cops")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- space files -------------------------------------------------------------

def load_space(path):
    with open(path) as fh:
        data = json.load(fh)
    if "hat" in data:
        return HatSpace.from_dict(data)
    if "components" in data:
        return WedgeSpace.from_dict(data)
    return MetricGraph.from_dict(data)


def save_space(space, path):
    with open(path, "w") as fh:
        json.dump(space.to_dict(), fh)


def _source_graph(args, attr="gen"):
    spec, path = getattr(args, attr, None), getattr(args, "graph", None)
    if (spec is None) == (path is None):
        raise UsageError("give exactly one of --%s and --graph" % attr.replace("_", "-"))
    return from_spec(spec, args.seed) if spec is not None else read_edge_list(path)


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()] if text else []


def _ids(text):
    out = []
    for t in text.split(","):
        t = t.strip()
        if t:
            out.append(int(t) if t.lstrip("-").isdigit() else t)
    return out


# -- commands ------------------------------------------------------------------

def cmd_solve(args):
    G = _source_graph(args)
    dg = DiscreteGraph.from_metric(G)
    k_max = args.k_max or max(dg.n, 1)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    for k in range(1, k_max + 1):
        table = solve(dg, k, args.budget)
        print(f"k={k}: {'cops win' if table.cops_win else 'robber wins'}")
        if args.out:
            table.save(os.path.join(args.out, f"table_k{k}.npz"))
        if table.cops_win:
            print(f"cop number: {k}")
            return EXIT_OK
    print(f"cop number: > {k_max}")
    return EXIT_OK


def _base_for_hat(args):
    X = _source_graph(args, "base")
    sk = None
    if args.subdivide and args.subdivide > 1:
        X, sk = subdivide(X, args.subdivide)
    else:
        try:
            sk = skeleton_of(X)
        except ValueError:
            sk = None
    return X, sk


def cmd_build(args):
    if args.kind == "wedge":
        if not args.components:
            raise UsageError("wedge needs --components")
        family = [from_spec(s, args.seed) for s in args.components.split(",")]
        space = counterexample_one(family, args.truncate or len(family))
        print(f"components: {len(space.components)}")
        for c in space.components:
            ell = c.skeleton.ell if c.skeleton is not None else float("nan")
            print(f"  G{c.index}: scale={c.scale:.6g} diameter={c.diameter:.6g} edge={ell:.6g}")
        print(f"diameter: {space.graph.diameter():.6g}")
    else:
        X, sk = _base_for_hat(args)
        if args.kind == "hat" and args.subspace:
            ids = _ids(args.subspace)
            S_ids = expand_subspace(sk, ids) if sk is not None and args.subdivide else ids
            ref = X
        else:
            S_ids, ref = None, X
        h = required_height(ref, args.tau_max) if args.h == "auto" else float(args.h)
        levels = args.levels or default_levels(h, X.mesh)
        if args.kind == "cylinder":
            space = build_cylinder(X, h, levels)
        elif args.kind == "top":
            space = build_top(X, h, levels)
        elif S_ids is None:
            space = build_hat(X, h, levels)
        else:
            space = attach_hat(X, S_ids, h, levels, tau_max=args.tau_max)
            space.skeleton = sk
        info = space.hats[-1]
        print(f"vertices: {space.graph.n_vertices}  edges: {space.graph.n_edges}")
        print(f"h: {info.h:.6g}  levels: {info.levels}  mesh: {info.mesh:.6g}  "
              f"spacing: {info.spacing:.6g}")
        print(f"error budget (tol): {info.tol:.6g}")
        print(f"base diameter: {space.base.diameter():.6g}")
    if args.out:
        save_space(space, args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def _make_robber(args, space, k):
    name = args.robber
    if name is None:
        name = ("shadow" if isinstance(space, HatSpace) and space.skeleton is not None
                else "pretend" if isinstance(space, WedgeSpace) else "random")
    if name == "pretend":
        return pretend_robber_strategy(space, k=k)
    if name == "shadow":
        if not isinstance(space, HatSpace) or space.skeleton is None:
            raise UsageError("the shadow robber needs a hat space built over a skeleton")
        return ShadowRobber(space, pretend_robber_strategy(space.skeleton, k=k), k)
    if name == "random":
        return RandomRobber(Schedule.parse(args.schedule or "const:1"))
    raise UsageError(f"unknown robber {name!r}")


def _make_cops(args, space, robber, k):
    G = getattr(space, "graph", space)
    if args.cops == "greedy":
        return GreedyCops(G)
    if args.cops == "random":
        return RandomCops(G)
    if args.cops == "lifted":
        inner = getattr(robber, "inner", robber)
        sk = getattr(inner, "skeleton", None)
        if sk is None:
            raise UsageError("lifted cops need a robber that plays on a skeleton")
        return LiftedCops(solve(sk.graph, k, args.budget), sk, G)
    raise UsageError(f"unknown cop strategy {args.cops!r}")


def cmd_simulate(args):
    space = load_space(args.space)
    robber = _make_robber(args, space, args.k)
    cops = _make_cops(args, space, robber, args.k)
    sched = Schedule.parse(args.schedule) if args.schedule else None
    game = new_game(space, args.k, robber, cops, schedule=sched, max_steps=args.steps,
                    capture_eps=_floats(args.eps), seed=args.seed)
    trace = game.run()
    if args.out:
        trace.write(args.out)
    print(f"steps: {trace.states[-1].n}  captured: {trace.captured}  value: {trace.value:.6g}")
    for eps, n in trace.first_approach.items():
        print(f"first approach within {eps:g}: {'never' if n is None else f'step {n}'}")
    return EXIT_OK


def cmd_verify(args):
    space = load_space(args.space)
    checks = args.checks.split(",") if args.checks else None
    if args.trace:
        results = verify_trace(GameTrace.read(args.trace), space, checks)
    else:
        results = verify_space(space, args.samples, args.seed)
    for c in results:
        print(c.line())
    return EXIT_OK if all(c.ok for c in results) else EXIT_FAIL


# -- parser --------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="metric-cops",
                                description="Cops and robber on metric graphs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="discrete cop number with strategy tables")
    s.add_argument("--gen", help="generator spec, e.g. petersen, cycle:4, grid:3x3")
    s.add_argument("--graph", help="edge-list file")
    s.add_argument("--k-max", type=int, default=None)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="directory for table_k<k>.npz files")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("build", help="build a wedge, cylinder, top or hat space")
    b.add_argument("kind", choices=["wedge", "cylinder", "top", "hat"])
    b.add_argument("--components", help="comma separated generator specs (wedge)")
    b.add_argument("--truncate", type=int, default=None)
    b.add_argument("--base", help="generator spec of the base space / S")
    b.add_argument("--graph", help="edge-list file of the base space")
    b.add_argument("--subspace", help="comma separated vertex ids of S (hat on X)")
    b.add_argument("--subdivide", type=int, default=0,
                   help="split every base edge into this many pieces")
    b.add_argument("--h", default="auto", help="hat height or 'auto'")
    b.add_argument("--tau-max", type=float, default=1.0)
    b.add_argument("--levels", type=int, default=None)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", help="space JSON file")
    b.set_defaults(func=cmd_build)

    m = sub.add_parser("simulate", help="play a game and write a JSON-lines trace")
    m.add_argument("--space", required=True)
    m.add_argument("--k", type=int, default=1)
    m.add_argument("--robber", choices=["pretend", "shadow", "random"], default=None)
    m.add_argument("--cops", choices=["greedy", "random", "lifted"], default="greedy")
    m.add_argument("--schedule", help="const:c | harmonic:c | list:a,b,...")
    m.add_argument("--steps", type=int, default=1000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--eps", help="comma separated approach radii to report")
    m.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    m.add_argument("--out", help="trace file")
    m.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="check a trace or a space file")
    v.add_argument("--space", required=True)
    v.add_argument("--trace")
    v.add_argument("--checks", help="comma separated subset of checks")
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except IllegalMove as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, MetricCopsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
