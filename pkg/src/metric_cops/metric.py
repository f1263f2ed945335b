"""Metric graphs: finite 1-complexes with prescribed edge lengths, carrying
their length metric.

Points are either a :class:`Vertex` or an :class:`EdgePoint` (an offset from
the first endpoint of an edge).  Distances between arbitrary points are
exact: an interior point leaves its edge through one of the two endpoints,
so every distance reduces to vertex-to-vertex shortest paths plus the
same-edge case.
"""
from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence, Union

import numpy as np

from . import kernels
from .errors import (
    DisconnectedGraph,
    InvalidPoint,
    MetricCopsError,
    NonpositiveLength,
    OutOfRange,
    UnknownVertex,
)

TOL = 1e-9
# offsets this close to an endpoint are the endpoint
SNAP = 1e-12


class SelfLoop(MetricCopsError, ValueError):
    pass


@dataclass(frozen=True)
class Vertex:
    id: Hashable


@dataclass(frozen=True)
class EdgePoint:
    edge: int
    offset: float


PointRef = Union[Vertex, EdgePoint]


@dataclass
class Path:
    """Consecutive points share ``edges[i]``; ``length`` is their arc length."""

    points: list
    edges: list
    length: float

    def __len__(self):
        return len(self.points)


def _id_key(vid):
    return (isinstance(vid, str), vid)


class MetricGraph:
    """Immutable weighted multigraph with its length metric.

    Vertex ids may be ints or strings.  Edge ``i`` runs from ``eu[i]`` to
    ``ev[i]``; edge-point offsets are measured from ``eu[i]``.
    """

    def __init__(self, vertices: Iterable[Hashable], edges: Iterable[Sequence], meta=None):
        self.ids = list(vertices)
        if not self.ids:
            raise DisconnectedGraph("a metric graph needs at least one vertex")
        self.index = {}
        for i, vid in enumerate(self.ids):
            if vid in self.index:
                raise ValueError(f"duplicate vertex id {vid!r}")
            self.index[vid] = i
        eu, ev, el = [], [], []
        for u, v, length in edges:
            if u not in self.index:
                raise UnknownVertex(u)
            if v not in self.index:
                raise UnknownVertex(v)
            length = float(length)
            if not (length > 0.0) or not math.isfinite(length):
                raise NonpositiveLength(f"edge ({u!r}, {v!r}) has length {length!r}")
            if u == v:
                raise SelfLoop(f"self-loop at {u!r}")
            eu.append(self.index[u])
            ev.append(self.index[v])
            el.append(length)
        self.eu = np.asarray(eu, dtype=np.int64)
        self.ev = np.asarray(ev, dtype=np.int64)
        self.elen = np.asarray(el, dtype=np.float64)
        self.meta = dict(meta or {})

        order = sorted(range(len(self.ids)), key=lambda i: _id_key(self.ids[i]))
        self.rank = np.empty(len(self.ids), dtype=np.int64)
        self.rank[order] = np.arange(len(self.ids))
        self._build_csr()

        self._rows = OrderedDict()
        self._row_cap = max(64, int(4e8 // (8 * self.n_vertices)))
        self._diameter = None

        d = self._row(0)
        if not np.all(np.isfinite(d)):
            raise DisconnectedGraph(
                f"{int(np.sum(~np.isfinite(d)))} vertices unreachable from {self.ids[0]!r}"
            )

    def _build_csr(self):
        n = len(self.ids)
        m = len(self.elen)
        src = np.concatenate([self.eu, self.ev])
        dst = np.concatenate([self.ev, self.eu])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        # neighbours sorted by rank then edge id: the geodesic walk relies on it
        order = np.lexsort((eid, self.rank[dst] if n else dst, src))
        src, dst, eid = src[order], dst[order], eid[order]
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.indptr, src + 1, 1)
        self.indptr = np.cumsum(self.indptr)
        self.nbr = dst.astype(np.int64)
        self.csr_edge = eid.astype(np.int64)
        self.wgt = self.elen[eid] if m else np.zeros(0)

    # -- basic accessors -------------------------------------------------
    @property
    def n_vertices(self):
        return len(self.ids)

    @property
    def n_edges(self):
        return len(self.elen)

    @property
    def mesh(self):
        return float(self.elen.max()) if self.n_edges else 0.0

    def edges(self):
        return [
            (self.ids[u], self.ids[v], float(L))
            for u, v, L in zip(self.eu, self.ev, self.elen)
        ]

    def vertex(self, vid) -> Vertex:
        if vid not in self.index:
            raise InvalidPoint(f"no vertex {vid!r}")
        return Vertex(vid)

    def point(self, edge: int, offset: float) -> PointRef:
        """Canonical point at ``offset`` along ``edge``."""
        if not 0 <= edge < self.n_edges:
            raise InvalidPoint(f"no edge {edge}")
        L = self.elen[edge]
        offset = float(offset)
        if offset < -SNAP or offset > L + SNAP or math.isnan(offset):
            raise InvalidPoint(f"offset {offset!r} outside edge {edge} of length {L!r}")
        if offset <= SNAP:
            return Vertex(self.ids[self.eu[edge]])
        if L - offset <= SNAP:
            return Vertex(self.ids[self.ev[edge]])
        return EdgePoint(int(edge), offset)

    def check(self, p) -> PointRef:
        if isinstance(p, Vertex):
            if p.id not in self.index:
                raise InvalidPoint(f"no vertex {p.id!r}")
            return p
        if isinstance(p, EdgePoint):
            return self.point(p.edge, p.offset)
        raise InvalidPoint(f"not a point: {p!r}")

    def endpoints(self, p):
        """(vertex index, distance) pairs through which ``p`` reaches the graph."""
        if isinstance(p, Vertex):
            return ((self.index[p.id], 0.0),)
        L = float(self.elen[p.edge])
        return ((int(self.eu[p.edge]), p.offset), (int(self.ev[p.edge]), L - p.offset))

    def neighbours(self, i):
        """(neighbour index, edge id, length) triples in rank order."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return zip(self.nbr[lo:hi].tolist(), self.csr_edge[lo:hi].tolist(), self.wgt[lo:hi].tolist())

    # -- shortest paths --------------------------------------------------
    def _row(self, i):
        row = self._rows.get(i)
        if row is not None:
            self._rows.move_to_end(i)
            return row
        row = kernels.dijkstra(
            self.indptr, self.nbr, self.wgt,
            np.array([i], dtype=np.int64), np.zeros(1), np.inf,
        )
        row.setflags(write=False)
        self._rows[i] = row
        if len(self._rows) > self._row_cap:
            self._rows.popitem(last=False)
        return row

    def field(self, p) -> np.ndarray:
        """Distances from point ``p`` to every vertex."""
        ends = self.endpoints(self.check(p))
        out = ends[0][1] + self._row(ends[0][0])
        for i, d in ends[1:]:
            out = np.minimum(out, d + self._row(i))
        return out

    def bounded_field(self, p, limit: float) -> np.ndarray:
        """Like :meth:`field` but only explores up to ``limit`` (inf beyond)."""
        ends = self.endpoints(self.check(p))
        seeds = np.array([i for i, _ in ends], dtype=np.int64)
        dist = np.array([d for _, d in ends])
        return kernels.dijkstra(self.indptr, self.nbr, self.wgt, seeds, dist, float(limit))

    def _same_edge(self, x, y):
        if isinstance(x, EdgePoint) and isinstance(y, EdgePoint) and x.edge == y.edge:
            return abs(x.offset - y.offset)
        return math.inf

    def _order(self, x, y):
        return (x, y) if _point_key(self, x) <= _point_key(self, y) else (y, x)

    def distance(self, x, y) -> float:
        x, y = self.check(x), self.check(y)
        if x == y:
            return 0.0
        a, b = self._order(x, y)
        best = self._same_edge(a, b)
        for i, di in self.endpoints(a):
            row = self._row(i)
            for j, dj in self.endpoints(b):
                best = min(best, di + row[j] + dj)
        return float(best)

    def within(self, x, y, radius: float) -> float:
        """Distance from x to y if it is at most ``radius``, else inf.

        Explores only the ball of that radius, so it stays cheap on large
        graphs; used for move-legality checks.
        """
        x, y = self.check(x), self.check(y)
        if x == y:
            return 0.0
        best = self._same_edge(x, y)
        f = self.bounded_field(x, radius)
        for j, dj in self.endpoints(y):
            best = min(best, f[j] + dj)
        return float(best) if best <= radius else math.inf

    def geodesic(self, x, y) -> Path:
        """Shortest x-y path; among ties, the lexicographically smallest
        sequence of vertex ids wins (a shorter sequence beats its
        extensions, so finishing directly on the target edge is preferred)."""
        x, y = self.check(x), self.check(y)
        if x == y:
            return Path([x], [], 0.0)
        total = self.distance(x, y)
        fy = self.field(y)
        tol = TOL * max(1.0, total)

        def finish_cost(i):
            # cost of running from vertex i straight onto y's edge
            if isinstance(y, Vertex):
                return 0.0 if self.index[y.id] == i else math.inf
            if self.eu[y.edge] == i:
                return y.offset
            if self.ev[y.edge] == i:
                return float(self.elen[y.edge]) - y.offset
            return math.inf

        points, edges = [x], []
        if isinstance(x, EdgePoint):
            direct = self._same_edge(x, y)
            if direct <= total + tol:
                return Path([x, y], [x.edge], direct)
            best = None
            for i, d in self.endpoints(x):
                if d + fy[i] <= total + tol and (best is None or self.rank[i] < self.rank[best]):
                    best = i
            if isinstance(y, Vertex) and best == self.index[y.id]:
                return Path([x, y], [x.edge], total)
            points.append(Vertex(self.ids[best]))
            edges.append(x.edge)
            cur = best
        else:
            cur = self.index[x.id]

        while True:
            fc = finish_cost(cur)
            if fc <= fy[cur] + tol:
                if isinstance(y, EdgePoint):
                    points.append(y)
                    edges.append(y.edge)
                break
            nxt = None
            for j, e, w in self.neighbours(cur):
                if w + fy[j] <= fy[cur] + tol:
                    nxt, ne = j, e
                    break
            if nxt is None:  # pragma: no cover - only on corrupted rows
                raise MetricCopsError("geodesic walk stalled")
            if isinstance(y, Vertex) and nxt == self.index[y.id]:
                points.append(y)
                edges.append(ne)
                break
            points.append(Vertex(self.ids[nxt]))
            edges.append(ne)
            cur = nxt
        return Path(points, edges, self.path_length(points, edges))

    def _offset_on(self, p, e):
        if isinstance(p, EdgePoint):
            if p.edge != e:
                raise InvalidPoint(f"{p!r} is not on edge {e}")
            return p.offset
        i = self.index[p.id]
        if i == self.eu[e]:
            return 0.0
        if i == self.ev[e]:
            return float(self.elen[e])
        raise InvalidPoint(f"{p!r} is not on edge {e}")

    def path_length(self, points, edges) -> float:
        total = 0.0
        for k, e in enumerate(edges):
            total += abs(self._offset_on(points[k + 1], e) - self._offset_on(points[k], e))
        return total

    def point_along(self, path: Path, s: float) -> PointRef:
        if s < -TOL or s > path.length + TOL:
            raise OutOfRange(f"arc length {s!r} outside [0, {path.length!r}]")
        if s <= 0.0 or not path.edges:
            return path.points[0]
        for k, e in enumerate(path.edges):
            a = self._offset_on(path.points[k], e)
            b = self._offset_on(path.points[k + 1], e)
            seg = abs(b - a)
            if s < seg:
                return self.point(e, a + math.copysign(s, b - a))
            s -= seg
        return path.points[-1]

    def nearest_vertex(self, p) -> Vertex:
        p = self.check(p)
        if isinstance(p, Vertex):
            return p
        (u, du), (v, dv) = self.endpoints(p)
        if abs(du - dv) <= TOL:
            return Vertex(self.ids[u if self.rank[u] < self.rank[v] else v])
        return Vertex(self.ids[u if du < dv else v])

    # -- global quantities ----------------------------------------------
    def all_pairs(self) -> np.ndarray:
        return kernels.all_pairs(self.indptr, self.nbr, self.wgt)

    def diameter(self) -> float:
        if self._diameter is None:
            D = self.all_pairs()
            self._diameter = float(kernels.diameter_from_apsp(D, self.eu, self.ev, self.elen))
        return self._diameter

    def random_point(self, rng, vertex_prob=0.2) -> PointRef:
        if self.n_edges == 0 or rng.random() < vertex_prob:
            return Vertex(self.ids[int(rng.integers(self.n_vertices))])
        e = int(rng.choice(self.n_edges, p=self.elen / self.elen.sum()))
        return self.point(e, float(rng.uniform(0.0, self.elen[e])))

    # -- serialisation ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "vertices": list(self.ids),
            "edges": [[u, v, L] for u, v, L in self.edges()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MetricGraph":
        return cls(data["vertices"], [tuple(e) for e in data["edges"]])


def _point_key(G, p):
    if isinstance(p, Vertex):
        return (0, int(G.rank[G.index[p.id]]), 0.0)
    return (1, p.edge, p.offset)


def point_to_json(p):
    if isinstance(p, Vertex):
        return {"v": p.id}
    return {"e": p.edge, "t": p.offset}


def point_from_json(obj):
    if "v" in obj:
        return Vertex(obj["v"])
    return EdgePoint(int(obj["e"]), float(obj["t"]))


# -- functional surface -----------------------------------------------------

def build_metric_graph(vertices, weighted_edges) -> MetricGraph:
    return MetricGraph(vertices, weighted_edges)


def distance(G: MetricGraph, x, y) -> float:
    return G.distance(x, y)


def geodesic(G: MetricGraph, x, y) -> Path:
    return G.geodesic(x, y)


def point_along(G: MetricGraph, path: Path, s: float) -> PointRef:
    return G.point_along(path, s)


def diameter(G: MetricGraph) -> float:
    return G.diameter()


@dataclass
class MetricReport:
    samples: int
    max_triangle_violation: float
    max_asymmetry: float
    max_geodesic_gap: float = 0.0
    worst_triple: tuple = field(default=None, repr=False)

    @property
    def ok(self):
        return (
            self.max_triangle_violation <= TOL
            and self.max_asymmetry <= TOL
            and self.max_geodesic_gap <= TOL
        )


def validate_length_metric(G: MetricGraph, sample_count: int, seed: int) -> MetricReport:
    """Sample point triples and measure how badly the metric axioms fail."""
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    tri = asym = gap = 0.0
    worst = None
    for _ in range(sample_count):
        x, y, z = (G.random_point(rng) for _ in range(3))
        dxy, dyx = G.distance(x, y), G.distance(y, x)
        dxz, dyz = G.distance(x, z), G.distance(y, z)
        asym = max(asym, abs(dxy - dyx))
        viol = dxz - (dxy + dyz)
        if viol > tri:
            tri, worst = viol, (x, y, z)
        gap = max(gap, abs(G.geodesic(x, y).length - dxy))
    return MetricReport(sample_count, max(tri, 0.0), asym, gap, worst)
