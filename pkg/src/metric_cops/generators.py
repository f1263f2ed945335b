"""Named unit-edge graphs: path, cycle, complete, grid, random tree, Petersen.

Each generator returns the edge list of a simple graph on ``range(n)``;
:func:`from_spec` turns a spec string such as ``"cycle:8"`` or ``"grid:3x4"``
into a unit-edge :class:`~metric_cops.metric.MetricGraph`.
"""
import numpy as np

from .metric import MetricGraph


def path_edges(n):
    return [(i, i + 1) for i in range(n - 1)]


def cycle_edges(n):
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return [(i, (i + 1) % n) for i in range(n)]


def complete_edges(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def grid_edges(rows, cols):
    out = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                out.append((v, v + 1))
            if i + 1 < rows:
                out.append((v, v + cols))
    return out


def tree_edges(n, seed=0):
    """Uniform random labelled tree via a Pruefer sequence."""
    if n <= 1:
        return []
    if n == 2:
        return [(0, 1)]
    rng = np.random.default_rng(seed)
    seq = [int(x) for x in rng.integers(0, n, size=n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    out = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        out.append((min(leaf, x), max(leaf, x)))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [i for i in range(n) if degree[i] == 1]
    out.append((u, v))
    return out


def petersen_edges():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return outer + spokes + inner


def spec_edges(spec: str, seed: int = 0):
    """(vertex count, edge list) for a generator spec string."""
    name, _, arg = spec.strip().partition(":")
    name = name.lower()
    if name == "petersen":
        return 10, petersen_edges()
    if name == "grid":
        rows, cols = (int(t) for t in arg.lower().replace("×", "x").split("x"))
        return rows * cols, grid_edges(rows, cols)
    if not arg:
        raise ValueError(f"generator {name!r} needs a size, e.g. {name}:5")
    n = int(arg)
    if name == "path":
        return n, path_edges(n)
    if name == "cycle":
        return n, cycle_edges(n)
    if name == "complete":
        return n, complete_edges(n)
    if name == "tree":
        return n, tree_edges(n, seed)
    raise ValueError(f"unknown generator {name!r}")


def unit_graph(n, edges) -> MetricGraph:
    return MetricGraph(range(n), [(u, v, 1.0) for u, v in edges])


def from_spec(spec: str, seed: int = 0) -> MetricGraph:
    n, edges = spec_edges(spec, seed)
    return unit_graph(n, edges)


def _vid(tok):
    try:
        return int(tok)
    except ValueError:
        return tok


def read_edge_list(path) -> MetricGraph:
    """Edge-list file: one ``u v [length]`` per line, ``#`` comments.
    Integer-looking ids become ints; a missing length means 1."""
    vertices, edges = {}, []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].split()
            if not line:
                continue
            if len(line) not in (1, 2, 3):
                raise ValueError(f"bad edge line: {' '.join(line)!r}")
            ids = [_vid(t) for t in line[:2]]
            for v in ids:
                vertices.setdefault(v, None)
            if len(line) >= 2:
                edges.append((ids[0], ids[1], float(line[2]) if len(line) == 3 else 1.0))
    return MetricGraph(list(vertices), edges)
