import json
import os
import subprocess
import sys

from metric_cops import _accel

PROBE = """
import json
import numpy as np
from metric_cops import _accel
from metric_cops.discrete import DiscreteGraph, solve
from metric_cops.generators import from_spec, spec_edges
G = from_spec("grid:3x4")
n, edges = spec_edges("petersen", 0)
t = solve(DiscreteGraph(n, edges), 2)
print(json.dumps({"backend": _accel.backend(),
                  "apsp": G.all_pairs().round(12).tolist(),
                  "diam": from_spec("cycle:7").diameter(),
                  "depth": t.cop_depth.tolist(), "win": t.cops_win}))
"""


def _probe(pure):
    env = dict(os.environ, METRIC_COPS_PURE="1" if pure else "0")
    res = subprocess.run([sys.executable, "-c", PROBE], env=env, capture_output=True, text=True,
                         check=True)
    return json.loads(res.stdout)


def test_default_backend_is_numba():
    assert _accel.backend() in ("numba", "python")
    if "METRIC_COPS_PURE" not in os.environ:
        assert _accel.backend() == "numba"


def test_pure_backend_matches_numba():
    fast, slow = _probe(False), _probe(True)
    assert fast["backend"] == "numba" and slow["backend"] == "python"
    for key in ("apsp", "diam", "depth", "win"):
        assert fast[key] == slow[key], key


def test_identity_decorator_forms():
    f = _accel._identity(lambda x: x + 1)
    assert f(1) == 2
    g = _accel._identity(cache=True)(lambda x: x * 2)
    assert g(3) == 6
