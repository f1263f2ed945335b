"""Compare the numba kernels against the same code run as plain Python.

Each backend runs in its own interpreter because the switch is read at
import time (METRIC_COPS_PURE=1 disables numba).

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]
"""
import argparse
import json
import os
import subprocess
import sys
import time

CASES = {
    "dijkstra (grid)": "dijkstra",
    "diameter (cycle)": "diameter",
    "solve (petersen, k=2)": "solve",
}


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def run_cases(repeat, quick):
    import numpy as np

    from metric_cops import backend
    from metric_cops.discrete import DiscreteGraph, solve
    from metric_cops.generators import from_spec
    from metric_cops import kernels

    grid = from_spec("grid:20x20" if quick else "grid:40x40")
    cyc = from_spec("cycle:30" if quick else "cycle:60")
    pet = DiscreteGraph.from_metric(from_spec("petersen"))
    seeds, zero = np.zeros(1, dtype=np.int64), np.zeros(1)

    def dij():
        for s in range(0, grid.n_vertices, 7):
            seeds[0] = s
            kernels.dijkstra(grid.indptr, grid.nbr, grid.wgt, seeds, zero, np.inf)

    def diam():
        D = kernels.all_pairs(cyc.indptr, cyc.nbr, cyc.wgt)
        kernels.diameter_from_apsp(D, cyc.eu, cyc.ev, cyc.elen)

    fns = {"dijkstra": dij, "diameter": diam, "solve": lambda: solve(pet, 2)}
    # warm-up triggers compilation so only steady-state time is measured
    for fn in fns.values():
        fn()
    return {"backend": backend(),
            "times": {name: _time(fns[key], repeat) for name, key in CASES.items()}}


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--quick", action="store_true")
    p.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = p.parse_args()
    if args.child:
        print(json.dumps(run_cases(args.repeat, args.quick)))
        return 0
    results = {}
    for pure in ("0", "1"):
        env = dict(os.environ, METRIC_COPS_PURE=pure)
        cmd = [sys.executable, __file__, "--child", "--repeat", str(args.repeat)]
        if args.quick:
            cmd.append("--quick")
        out = subprocess.run(cmd, env=env, check=True, capture_output=True, text=True)
        res = json.loads(out.stdout.strip().splitlines()[-1])
        results[res["backend"]] = res["times"]
    names = list(CASES)
    print(f"{'case':<24}" + "".join(f"{b:>12}" for b in results) + f"{'speedup':>10}")
    for name in names:
        row = [results[b][name] for b in results]
        speed = (results["python"][name] / results["numba"][name]
                 if "numba" in results and "python" in results else float("nan"))
        print(f"{name:<24}" + "".join(f"{t:>11.4f}s" for t in row) + f"{speed:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
