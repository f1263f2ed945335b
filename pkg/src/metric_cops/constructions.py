"""Spaces built from metric graphs: rescaled wedges of graphs, and hats
(cylinder over S glued to a shrinking top with a cone point) attached
along a subgraph S of a base space X.

Hat points carry a :class:`HatChart` recording their region, their trace
(the base point directly below them) and their height above the base.
"""
from __future__ import annotations

import math
import warnings
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .discrete import DiscreteGraph
from .errors import (
    DisconnectedGraph,
    DisconnectedSubspace,
    EmptyFamily,
    InvalidBasepoint,
    MissingChart,
    NonpositiveHeight,
    NonpositiveScale,
    NotSubgraph,
    TooFewLevels,
)
from .metric import (
    SNAP,
    TOL,
    EdgePoint,
    MetricGraph,
    Vertex,
    _id_key,
    point_from_json,
    point_to_json,
)

BASE, CYLINDER, TOP, CONE = "Base", "Cylinder", "Top", "ConePoint"
_REGION_ORDER = {BASE: 0, CYLINDER: 1, TOP: 2, CONE: 3}


@dataclass(frozen=True)
class HatChart:
    region: str
    trace: object  # PointRef into the base space
    height: float
    hat: int = -1


# ---------------------------------------------------------------------------
# skeletons: a discrete graph drawn inside a metric graph
# ---------------------------------------------------------------------------

class Skeleton:
    """A discrete graph whose vertices are metric-graph vertices and whose
    edges are chains of metric edges, every chain of the same length.

    ``locate`` maps a point of the metric graph to its position relative to
    the discrete graph: ``("v", i)`` for a discrete vertex, ``("e", j, s)``
    for arc length ``s`` along discrete edge ``j`` from its first endpoint,
    or ``None`` when the point lies outside the drawn graph.
    """

    def __init__(self, graph: DiscreteGraph, vertex_map, chains, ell, hub):
        self.graph = graph
        self.vertex_map = list(vertex_map)
        self.chains = [list(c) for c in chains]
        self.ell = float(ell)
        self.hub = hub
        self._vertex = {vid: i for i, vid in enumerate(self.vertex_map)}
        if hub not in self._vertex:
            raise InvalidBasepoint(f"hub {hub!r} is not a skeleton vertex")
        self.hub_index = self._vertex[hub]
        self._edge = {}
        self._inner = {}
        self._starts = []

    def bind(self, G: MetricGraph) -> "Skeleton":
        """Resolve chain geometry against the metric graph ``G``."""
        self._edge, self._inner, self._starts = {}, {}, []
        for j, chain in enumerate(self.chains):
            s = 0.0
            starts = []
            for e, forward in chain:
                L = float(G.elen[e])
                self._edge[e] = (j, s, bool(forward), L)
                starts.append(s)
                s += L
                if abs(s - self.ell) > TOL:
                    far = G.ids[G.ev[e] if forward else G.eu[e]]
                    self._inner[far] = (j, s)
            if abs(s - self.ell) > 1e-9 * max(1.0, self.ell):
                raise ValueError(f"chain {j} has length {s!r}, expected {self.ell!r}")
            self._starts.append(starts)
        self.metric = G
        return self

    def locate(self, p):
        if isinstance(p, Vertex):
            if p.id in self._vertex:
                return ("v", self._vertex[p.id])
            if p.id in self._inner:
                j, s = self._inner[p.id]
                return ("e", j, s)
            return None
        info = self._edge.get(p.edge)
        if info is None:
            return None
        j, start, forward, L = info
        return ("e", j, start + (p.offset if forward else L - p.offset))

    def contains(self, p) -> bool:
        return self.locate(p) is not None

    def vertex_point(self, i) -> Vertex:
        return Vertex(self.vertex_map[i])

    def point_on_edge(self, j, s):
        """Metric point at arc length ``s`` along discrete edge ``j``."""
        chain = self.chains[j]
        starts = self._starts[j]
        k = max(0, min(len(chain) - 1, bisect_right(starts, s) - 1))
        e, forward = chain[k]
        t = s - starts[k]
        L = float(self.metric.elen[e])
        return self.metric.point(e, t if forward else L - t)

    def to_dict(self) -> dict:
        return {
            "labels": self.graph.labels,
            "edges": [list(e) for e in self.graph.edges],
            "vertex_map": self.vertex_map,
            "chains": [[[int(e), bool(f)] for e, f in c] for c in self.chains],
            "ell": self.ell,
            "hub": self.hub,
        }

    @classmethod
    def from_dict(cls, data, G: MetricGraph) -> "Skeleton":
        labels = data["labels"]
        dg = DiscreteGraph(len(labels), [tuple(e) for e in data["edges"]], labels=labels)
        chains = [[(int(e), bool(f)) for e, f in c] for c in data["chains"]]
        return cls(dg, data["vertex_map"], chains, data["ell"], data["hub"]).bind(G)


def _discrete_skeleton(G: MetricGraph, vertex_map, edge_chain_for, ell, hub):
    """Skeleton of a graph whose metric edges are (chains over) its own edges."""
    dg = DiscreteGraph.from_metric(G)
    chains = []
    for a, b in dg.edges:
        chains.append(edge_chain_for(a, b))
    return Skeleton(dg, vertex_map, chains, ell, hub)


def _uniform_length(G: MetricGraph):
    if G.n_edges == 0:
        return None
    L = float(G.elen[0])
    return L if np.all(np.abs(G.elen - L) <= TOL * max(1.0, L)) else None


def skeleton_of(G: MetricGraph, hub=None) -> Skeleton:
    """The graph itself as a skeleton (one metric edge per discrete edge)."""
    ell = _uniform_length(G)
    if ell is None:
        raise ValueError("skeleton edges must all have the same length")
    first = {}
    for e, (u, v) in enumerate(zip(G.eu.tolist(), G.ev.tolist())):
        first.setdefault((min(u, v), max(u, v)), (e, u < v))

    def chain(a, b):
        e, fwd = first[(a, b)]
        return [(e, fwd)]

    hub = G.ids[int(np.argmin(G.rank))] if hub is None else hub
    sk = _discrete_skeleton(G, G.ids, chain, ell, hub).bind(G)
    # parallel copies of a discrete edge map onto the same chain index
    for e, (u, v) in enumerate(zip(G.eu.tolist(), G.ev.tolist())):
        if e not in sk._edge:
            j = sk.graph.edges.index((min(u, v), max(u, v)))
            sk._edge[e] = (j, 0.0, u < v, float(G.elen[e]))
    return sk


def subdivide(G: MetricGraph, parts: int):
    """Split every edge into ``parts`` equal pieces.

    The result is isometric to ``G`` (same 1-complex) but has mesh
    ``mesh(G)/parts``.  Returns the new graph and the skeleton of ``G``
    inside it; original vertex ids and edge orientation are kept.
    """
    if parts < 1:
        raise ValueError("parts must be >= 1")
    ell = _uniform_length(G)
    vertices = list(G.ids)
    edges, chains_of = [], {}
    for e, (u, v, L) in enumerate(G.edges()):
        piece = L / parts
        ids = [u] + [f"e{e}.{j}" for j in range(1, parts)] + [v]
        vertices.extend(ids[1:-1])
        chains_of[e] = list(range(len(edges), len(edges) + parts))
        for j in range(parts):
            edges.append((ids[j], ids[j + 1], piece))
    H = MetricGraph(vertices, edges)
    if ell is None:
        return H, None
    dg = DiscreteGraph.from_metric(G)
    first = {}
    for e, (u, v) in enumerate(zip(G.eu.tolist(), G.ev.tolist())):
        first.setdefault((min(u, v), max(u, v)), e)
    chains = []
    for a, b in dg.edges:
        e = first[(a, b)]
        fwd = int(G.eu[e]) == a
        pieces = chains_of[e] if fwd else list(reversed(chains_of[e]))
        chains.append([(p, fwd) for p in pieces])
    hub = G.ids[int(np.argmin(G.rank))]
    return H, Skeleton(dg, G.ids, chains, ell, hub).bind(H)


def expand_subspace(sk: Skeleton, vertices):
    """Metric vertices of the subgraph induced by ``vertices`` (ids of the
    skeleton's discrete graph) after subdivision: the vertices themselves
    plus the interior vertices of every chain joining two of them."""
    keep = {sk._vertex[v] for v in vertices if v in sk._vertex}
    missing = [v for v in vertices if v not in sk._vertex]
    if missing:
        raise NotSubgraph(f"vertices {missing!r} are not skeleton vertices")
    G = sk.metric
    out = [sk.vertex_map[i] for i in sorted(keep)]
    for j, (a, b) in enumerate(sk.graph.edges):
        if a in keep and b in keep:
            for e, forward in sk.chains[j][:-1]:
                out.append(G.ids[G.ev[e] if forward else G.eu[e]])
    return out


# ---------------------------------------------------------------------------
# rescaling and wedges
# ---------------------------------------------------------------------------

def rescale(G: MetricGraph, scale: float) -> MetricGraph:
    scale = float(scale)
    if not scale > 0 or not math.isfinite(scale):
        raise NonpositiveScale(f"scale must be positive, got {scale!r}")
    return MetricGraph(G.ids, [(u, v, L * scale) for u, v, L in G.edges()])


@dataclass
class WedgeComponent:
    index: int  # 1-based, the n of G_n
    scale: float
    diameter: float  # of the rescaled copy
    source: MetricGraph
    basepoint: object
    skeleton: Skeleton = None


@dataclass
class WedgeSpace:
    graph: MetricGraph
    hub: object
    components: list

    def component_of(self, p):
        for comp in self.components:
            if comp.skeleton.contains(p):
                return comp
        return None

    def to_dict(self) -> dict:
        out = self.graph.to_dict()
        out["hub"] = self.hub
        out["components"] = [
            {
                "index": c.index,
                "scale": c.scale,
                "diameter": c.diameter,
                "basepoint": c.basepoint,
                "skeleton": c.skeleton.to_dict(),
            }
            for c in self.components
        ]
        return out

    @classmethod
    def from_dict(cls, data) -> "WedgeSpace":
        G = MetricGraph.from_dict(data)
        comps = []
        for c in data["components"]:
            sk = Skeleton.from_dict(c["skeleton"], G)
            source = MetricGraph(sk.graph.labels, [
                (sk.graph.labels[a], sk.graph.labels[b], sk.ell / c["scale"])
                for a, b in sk.graph.edges
            ])
            comps.append(WedgeComponent(c["index"], c["scale"], c["diameter"], source,
                                        c["basepoint"], sk))
        return cls(G, data["hub"], comps)


def _component_vertex(n, vid):
    return f"{n}.{vid}"


def counterexample_one(family, truncate: int, hub="w") -> WedgeSpace:
    """Wedge of the first ``truncate`` graphs, graph n rescaled by
    1/(n * diam(G_n)) and glued to the others at its basepoint.

    ``family`` items are metric graphs or ``(graph, basepoint)`` pairs; a
    missing basepoint defaults to the smallest vertex id.
    """
    family = list(family)
    if not family or truncate < 1:
        raise EmptyFamily("need at least one graph in the family")
    if truncate > len(family):
        raise EmptyFamily(f"truncation {truncate} exceeds family size {len(family)}")
    vertices = [hub]
    edges = []
    comps = []
    for n, item in enumerate(family[:truncate], start=1):
        G, base = item if isinstance(item, tuple) else (item, None)
        if base is None:
            base = min(G.ids, key=_id_key)
        if base not in G.index:
            raise InvalidBasepoint(f"basepoint {base!r} not in graph {n}")
        if G.n_edges == 0:
            raise DisconnectedGraph(f"graph {n} has no edges to rescale")
        scale = 1.0 / (n * G.diameter())
        names = {vid: (hub if vid == base else _component_vertex(n, vid)) for vid in G.ids}
        vertices.extend(names[v] for v in G.ids if v != base)
        first_edge = len(edges)
        for u, v, L in G.edges():
            edges.append((names[u], names[v], L * scale))
        comps.append((n, scale, G, base, names, first_edge))
    W = MetricGraph(vertices, edges)
    components = []
    for n, scale, G, base, names, first_edge in comps:
        sub = rescale(G, scale)
        ell = _uniform_length(sub)
        comp = WedgeComponent(n, scale, sub.diameter(), G, base)
        if ell is not None:
            local = skeleton_of(G, hub=base)
            chains = [[(first_edge + e, f) for e, f in c] for c in local.chains]
            sk = Skeleton(local.graph, [names[v] for v in G.ids], chains, ell, hub)
            sk.bind(W)
            for e_local, (j, _, fwd, _) in local._edge.items():
                sk._edge.setdefault(first_edge + e_local, (j, 0.0, fwd, ell))
            comp.skeleton = sk
        components.append(comp)
    return WedgeSpace(W, hub, components)


# ---------------------------------------------------------------------------
# hats
# ---------------------------------------------------------------------------

@dataclass
class HatInfo:
    h: float
    levels: int
    s_vertices: list
    cone: object
    top_height: float  # h + diam(S)
    mesh: float
    legal: bool = True

    @property
    def spacing(self):
        return self.h / self.levels

    @property
    def top_spacing(self):
        return self.top_height / self.levels

    @property
    def tol(self):
        return 2.0 * (self.mesh + self.spacing)


@dataclass
class HatSpace:
    """Metric graph with charts.  ``base`` is the space hats were attached
    to; its vertices and edges keep their ids and indices in ``graph``."""

    graph: MetricGraph
    base: MetricGraph
    charts: dict  # vertex id -> HatChart (hat vertices only)
    edge_base: dict  # horizontal hat edge -> base edge it copies
    hats: list = field(default_factory=list)
    skeleton: Skeleton = None

    @property
    def cone(self):
        return self.hats[-1].cone if self.hats else None

    @property
    def tol(self):
        return max((hat.tol for hat in self.hats), default=0.0)

    def vertex_chart(self, vid) -> HatChart:
        chart = self.charts.get(vid)
        if chart is not None:
            return chart
        if vid in self.base.index:
            return HatChart(BASE, Vertex(vid), 0.0)
        raise MissingChart(vid)

    def chart(self, p) -> HatChart:
        p = self.graph.check(p)
        if isinstance(p, Vertex):
            return self.vertex_chart(p.id)
        e = p.edge
        if e < self.base.n_edges and e not in self.edge_base:
            return HatChart(BASE, p, 0.0)
        G = self.graph
        cu = self.vertex_chart(G.ids[G.eu[e]])
        cv = self.vertex_chart(G.ids[G.ev[e]])
        frac = p.offset / float(G.elen[e])
        if e in self.edge_base:
            b = self.edge_base[e]
            trace = self.base.point(b, frac * float(self.base.elen[b]))
            return HatChart(cu.region, trace, cu.height, cu.hat)
        hi = cu if _REGION_ORDER[cu.region] >= _REGION_ORDER[cv.region] else cv
        region = TOP if hi.region == CONE else hi.region
        lo = cv if hi is cu else cu
        trace = lo.trace if hi.region == CONE else cu.trace
        height = cu.height + frac * (cv.height - cu.height)
        return HatChart(region, trace, height, hi.hat)

    def trace(self, p):
        return self.chart(p).trace

    def height(self, p):
        return self.chart(p).height

    # -- serialisation ---------------------------------------------------
    def to_dict(self) -> dict:
        out = self.graph.to_dict()
        out["charts"] = {
            str(vid): {"region": c.region, "trace": point_to_json(c.trace),
                       "height": c.height, "hat": c.hat}
            for vid, c in self.charts.items()
        }
        out["edge_traces"] = {str(e): b for e, b in self.edge_base.items()}
        out["hat"] = {
            "base_vertices": list(self.base.ids),
            "base_edges": self.base.n_edges,
            "hats": [
                {"h": hat.h, "levels": hat.levels, "S": hat.s_vertices, "cone": hat.cone,
                 "top_height": hat.top_height, "mesh": hat.mesh, "legal": hat.legal,
                 "tol": hat.tol}
                for hat in self.hats
            ],
        }
        if self.skeleton is not None:
            out["skeleton"] = self.skeleton.to_dict()
        return out

    @classmethod
    def from_dict(cls, data) -> "HatSpace":
        G = MetricGraph.from_dict(data)
        info = data["hat"]
        m = int(info["base_edges"])
        base = MetricGraph(info["base_vertices"], G.edges()[:m])
        by_name = {str(v): v for v in G.ids}
        charts = {}
        for key, c in data.get("charts", {}).items():
            charts[by_name[key]] = HatChart(c["region"], point_from_json(c["trace"]),
                                            float(c["height"]), int(c.get("hat", -1)))
        edge_base = {int(e): int(b) for e, b in data.get("edge_traces", {}).items()}
        hats = [HatInfo(float(x["h"]), int(x["levels"]), x["S"], x["cone"],
                        float(x["top_height"]), float(x["mesh"]), bool(x["legal"]))
                for x in info["hats"]]
        space = cls(G, base, charts, edge_base, hats)
        if "skeleton" in data:
            space.skeleton = Skeleton.from_dict(data["skeleton"], base)
        return space


def required_height(X: MetricGraph, tau_max: float) -> float:
    """Smallest hat height for which the shadow argument goes through."""
    return float(tau_max) + X.diameter()


def default_levels(h, mesh, tau_min=None):
    """Levels so that the vertical spacing is at most min(tau_min/4, mesh)."""
    step = mesh if tau_min is None else min(tau_min / 4.0, mesh)
    return max(2, int(math.ceil(h / step - 1e-12)))


class _Builder:
    def __init__(self, vertices, edges):
        self.vertices = list(vertices)
        self.edges = list(edges)
        self.charts = {}
        self.edge_base = {}

    def add_vertex(self, vid, chart):
        self.vertices.append(vid)
        self.charts[vid] = chart

    def add_edge(self, u, v, L, base_edge=None):
        if base_edge is not None:
            self.edge_base[len(self.edges)] = base_edge
        self.edges.append((u, v, L))


def _grow(b: _Builder, s_ids, s_edges, diam_s, h, levels, hat, tag,
          cylinder=True, top=True, layer0_region=BASE):
    """Add cylinder and/or top layers over the copy of S already in ``b``.

    ``s_edges`` holds (a, b, length, base edge index); S's layer-0 copy has
    the ids in ``s_ids`` and its trace is itself.
    """
    H = h + diam_s
    trace_of = {s: Vertex(s) for s in s_ids}
    layer = {s: s for s in s_ids}
    if cylinder:
        dz = h / levels
        for j in range(1, levels + 1):
            nxt = {}
            for s in s_ids:
                vid = f"{tag}c{j}:{s}"
                b.add_vertex(vid, HatChart(CYLINDER, trace_of[s], j * dz, hat))
                b.add_edge(layer[s], vid, dz)
                nxt[s] = vid
            for a, c, L, be in s_edges:
                b.add_edge(nxt[a], nxt[c], L, be)
            layer = nxt
    cone = None
    if top:
        dz = H / levels
        for j in range(1, levels):
            t = j * dz
            sigma = (H - t) / H
            nxt = {}
            for s in s_ids:
                vid = f"{tag}t{j}:{s}"
                b.add_vertex(vid, HatChart(TOP, trace_of[s], h + t, hat))
                b.add_edge(layer[s], vid, dz)
                nxt[s] = vid
            for a, c, L, be in s_edges:
                b.add_edge(nxt[a], nxt[c], L * sigma, be)
            layer = nxt
        cone = f"{tag}z"
        anchor = min(s_ids, key=_id_key)
        b.add_vertex(cone, HatChart(CONE, trace_of[anchor], 2.0 * h, hat))
        for s in s_ids:
            b.add_edge(layer[s], cone, dz)
    return cone


def _check_hat_args(h, levels, minimum):
    if not h > 0 or not math.isfinite(h):
        raise NonpositiveHeight(f"hat height must be positive, got {h!r}")
    if levels < minimum:
        raise TooFewLevels(f"need at least {minimum} levels, got {levels}")


def _s_edges(S: MetricGraph):
    return [(S.ids[u], S.ids[v], float(L), e)
            for e, (u, v, L) in enumerate(zip(S.eu, S.ev, S.elen))]


def build_cylinder(S: MetricGraph, h: float, levels: int) -> HatSpace:
    """S x [0, h] with the l1 product metric, as a grid of S copies."""
    _check_hat_args(h, levels, 1)
    b = _Builder(S.ids, S.edges())
    _grow(b, S.ids, _s_edges(S), S.diameter(), h, levels, 0, "", top=False)
    G = MetricGraph(b.vertices, b.edges)
    info = HatInfo(float(h), levels, list(S.ids), None, h + S.diameter(), S.mesh)
    return HatSpace(G, S, b.charts, b.edge_base, [info])


def build_top(S: MetricGraph, h: float, levels: int) -> HatSpace:
    """Copies of S at heights t_j = j*H/levels (H = h + diam S), copy j
    shrunk by (H - t_j)/H, closed off by a cone point."""
    _check_hat_args(h, levels, 2)
    b = _Builder(S.ids, S.edges())
    cone = _grow(b, S.ids, _s_edges(S), S.diameter(), h, levels, 0, "", cylinder=False)
    G = MetricGraph(b.vertices, b.edges)
    # layer 0 of a free-standing top sits at height h
    for s in S.ids:
        b.charts[s] = HatChart(TOP, Vertex(s), float(h), 0)
    for e in range(S.n_edges):
        b.edge_base[e] = e
    info = HatInfo(float(h), levels, list(S.ids), cone, h + S.diameter(), S.mesh)
    return HatSpace(G, S, b.charts, b.edge_base, [info])


def build_hat(S: MetricGraph, h: float, levels: int) -> HatSpace:
    _check_hat_args(h, levels, 2)
    b = _Builder(S.ids, S.edges())
    cone = _grow(b, S.ids, _s_edges(S), S.diameter(), h, levels, 0, "")
    G = MetricGraph(b.vertices, b.edges)
    info = HatInfo(float(h), levels, list(S.ids), cone, h + S.diameter(), S.mesh)
    return HatSpace(G, S, b.charts, b.edge_base, [info])


def induced_subgraph(X: MetricGraph, vertices):
    vertices = list(dict.fromkeys(vertices))
    missing = [v for v in vertices if v not in X.index]
    if missing:
        raise NotSubgraph(f"vertices {missing!r} are not in the base space")
    keep = set(vertices)
    edges = []
    for e, (u, v, L) in enumerate(X.edges()):
        if u in keep and v in keep:
            edges.append((u, v, L, e))
    return vertices, edges


def attach_hat(X, s_vertices, h: float, levels: int, tau_max=None) -> HatSpace:
    """Glue hat(h, S) onto X along S (the subgraph induced by ``s_vertices``).

    ``X`` may be a metric graph or a :class:`HatSpace` that already carries
    hats; charts of earlier hats are kept.  Passing ``tau_max`` records
    whether ``h`` reaches :func:`required_height`; a lower ``h`` is accepted
    with a warning.  A two-vertex S with no edge between the two vertices
    is the 0-sphere: its hat is a pair of vertical segments joined at the
    cone point.
    """
    if isinstance(X, HatSpace):
        space = X
        G, base = X.graph, X.base
    else:
        space = None
        G = base = X
    _check_hat_args(h, levels, 2)
    s_ids, s_edges = induced_subgraph(G, s_vertices)
    if any(s not in base.index for s in s_ids):
        raise NotSubgraph("S must lie in the base space")
    if len(s_ids) == 2 and not s_edges:
        diam_s = base.distance(Vertex(s_ids[0]), Vertex(s_ids[1]))
        mesh = 0.0
    else:
        try:
            S = MetricGraph(s_ids, [(u, v, L) for u, v, L, _ in s_edges])
        except DisconnectedGraph as exc:
            raise DisconnectedSubspace(str(exc)) from None
        diam_s, mesh = S.diameter(), S.mesh
    legal = True
    if tau_max is not None:
        need = required_height(base, tau_max)
        if h < need - TOL:
            legal = False
            warnings.warn(f"hat height {h} is below the required {need}; "
                          "the shadow guarantee does not apply", stacklevel=2)
    hat = len(space.hats) if space is not None else 0
    b = _Builder(G.ids, G.edges())
    if space is not None:
        b.charts.update(space.charts)
        b.edge_base.update(space.edge_base)
    cone = _grow(b, s_ids, s_edges, diam_s, h, levels, hat, f"h{hat}.")
    graph = MetricGraph(b.vertices, b.edges)
    info = HatInfo(float(h), levels, s_ids, cone, h + diam_s, mesh, legal)
    hats = (list(space.hats) if space is not None else []) + [info]
    sk = space.skeleton if space is not None else None
    return HatSpace(graph, base, b.charts, b.edge_base, hats, sk)
