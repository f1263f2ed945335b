"""Offline checks of traces and spaces.

Every check returns a :class:`Check` whose ``margin`` is the worst slack
observed (negative means violated).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constructions import BASE, CONE, CYLINDER, HatSpace, Skeleton, WedgeSpace
from .errors import SchemaMismatch
from .metric import TOL, MetricGraph, Vertex, point_from_json, validate_length_metric


@dataclass
class Check:
    name: str
    ok: bool
    margin: float
    detail: str = ""

    def line(self):
        tag = "PASS" if self.ok else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{tag} {self.name}: margin={self.margin:.3g}{extra}"


def _check(name, margin, detail="", slack=0.0):
    return Check(name, bool(margin >= -slack), float(margin), detail)


def _graph(space):
    return getattr(space, "graph", space)


def _require(trace, key):
    for s in trace.states:
        if key not in s.extras:
            raise SchemaMismatch(f"step {s.n} has no {key!r} field")


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

def check_legality(trace, space) -> Check:
    """Every move of every agent has length at most tau(n) + 1e-9."""
    G = _graph(space)
    worst, where = math.inf, ""
    for prev, cur in zip(trace.states, trace.states[1:]):
        tau = cur.tau
        pairs = [("robber", prev.robber, cur.robber)]
        pairs += [(f"cop {i}", a, b) for i, (a, b) in enumerate(zip(prev.cops, cur.cops))]
        for who, a, b in pairs:
            d = G.within(a, b, tau + TOL)
            slack = (tau + TOL - d) if d < math.inf else -G.distance(a, b) + tau
            if slack < worst:
                worst, where = slack, f"step {cur.n}, {who}"
    if worst == math.inf:
        worst = 0.0
    return _check("legality", worst, where)


def check_value(trace, space) -> Check:
    """Recorded min distances match the positions; running value is monotone."""
    G = _graph(space)
    worst, where = 0.0, ""
    running = math.inf
    for s in trace.states:
        md = min((G.distance(s.robber, c) for c in s.cops), default=math.inf)
        err = abs(md - s.min_dist) if math.isfinite(md) else 0.0
        if -err < worst:
            worst, where = -err, f"step {s.n}: recorded {s.min_dist}, actual {md}"
        if s.captured and md > TOL:
            worst, where = -md, f"step {s.n}: capture flagged at distance {md}"
        running = min(running, md)
    if trace.states and trace.captured:
        if trace.value != 0.0:
            worst, where = -trace.value, "captured trace with nonzero value"
    return _check("value", worst, where, slack=1e-9)


def _pret_skeleton(space, trace) -> Skeleton:
    if isinstance(space, WedgeSpace):
        comp = trace.header.get("component")
        for c in space.components:
            if c.index == comp:
                return c.skeleton
        raise SchemaMismatch(f"trace refers to component {comp!r} not in the space")
    sk = getattr(space, "skeleton", None)
    if sk is None:
        raise SchemaMismatch("space has no skeleton for pretended positions")
    return sk


def check_pret(trace, space) -> list:
    """Pretended cops sit within ell/2 of the real ones (at the hub when the
    real cop is off the component) and move like discrete cops."""
    _require(trace, "pretended")
    sk = _pret_skeleton(space, trace)
    index = {vid: i for i, vid in enumerate(sk.vertex_map)}
    half = sk.ell / 2
    shadow = "shadows" in trace.states[0].extras if trace.states else False
    worst_d, where_d = math.inf, ""
    worst_adj, where_adj = 0.0, ""
    prev = None
    for s in trace.states:
        try:
            pret = [index[p] for p in s.extras["pretended"]]
        except KeyError as exc:
            raise SchemaMismatch(f"pretended vertex {exc} is not a skeleton vertex") from None
        cops = ([point_from_json(c) for c in s.extras["shadows"]] if shadow else s.cops)
        for i, (p, c) in enumerate(zip(pret, cops)):
            if sk.locate(c) is not None:
                slack = half + TOL - sk.metric.distance(sk.vertex_point(p), c)
            else:
                slack = 0.0 if p == sk.hub_index else -1.0
            if slack < worst_d:
                worst_d, where_d = slack, f"step {s.n}, cop {i}"
        if prev is not None:
            for i, (a, b) in enumerate(zip(prev, pret)):
                if b != a and b not in sk.graph.adj[a]:
                    worst_adj, where_adj = -1.0, f"step {s.n}, cop {i}: {a} -> {b}"
        prev = pret
    if worst_d == math.inf:
        worst_d = 0.0
    return [_check("pret", worst_d, where_d), _check("pret-adjacency", worst_adj, where_adj)]


def _shadows(trace):
    _require(trace, "shadows")
    return [[point_from_json(p) for p in s.extras["shadows"]] for s in trace.states]


def _tol(trace, space):
    return float(trace.header.get("tol", space.tol))


def check_sce(trace, space: HatSpace) -> Check:
    """d(s_i, pi(c_i)) <= hei(c_i) + tol at every step."""
    tol = _tol(trace, space)
    worst, where = math.inf, ""
    for s, shadows in zip(trace.states, _shadows(trace)):
        for i, (c, sh) in enumerate(zip(s.cops, shadows)):
            chart = space.chart(c)
            slack = chart.height + tol - space.base.distance(sh, chart.trace)
            if slack < worst:
                worst, where = slack, f"step {s.n}, cop {i} ({chart.region})"
    return _check("sce", 0.0 if worst == math.inf else worst, where)


def check_eps3(trace, space: HatSpace) -> Check:
    """min d(cop, robber) >= min d(shadow, robber) / 3 - tol over the trace."""
    tol = _tol(trace, space)
    shadows = _shadows(trace)
    cop_min = min(s.min_dist for s in trace.states)
    sh_min = min(space.base.distance(s.robber, p)
                 for s, sh in zip(trace.states, shadows) for p in sh)
    return _check("eps3", cop_min - (sh_min / 3.0 - tol),
                  f"cop min {cop_min:.6g}, shadow min {sh_min:.6g}")


def check_shadow_legality(trace, space: HatSpace) -> Check:
    """Shadows stay in the base and move at most tau(n) per step."""
    shadows = _shadows(trace)
    worst, where = math.inf, ""
    for i, sh in enumerate(shadows):
        for j, p in enumerate(sh):
            try:
                space.base.check(p)
            except Exception:
                return _check("shadow-legality", -1.0, f"step {trace.states[i].n}: shadow {j} off base")
    for s_prev, s, a, b in zip(trace.states, trace.states[1:], shadows, shadows[1:]):
        for j, (p, q) in enumerate(zip(a, b)):
            slack = s.tau + TOL - space.base.distance(p, q)
            if slack < worst:
                worst, where = slack, f"step {s.n}, shadow {j}"
    return _check("shadow-legality", 0.0 if worst == math.inf else worst, where)


def verify_trace(trace, space, checks=None) -> list:
    """Run the applicable checks (or the named ones) on a trace."""
    extras = trace.states[0].extras if trace.states else {}
    available = ["legality", "value"]
    if "pretended" in extras:
        available.append("pret")
    if "shadows" in extras:
        if not isinstance(space, HatSpace):
            raise SchemaMismatch("shadow trace needs a hat space")
        available += ["sce", "eps3", "shadow-legality"]
    wanted = available if checks is None else list(checks)
    out = []
    for name in wanted:
        if name not in available:
            raise SchemaMismatch(f"check {name!r} does not apply to this trace")
        if name == "legality":
            out.append(check_legality(trace, space))
        elif name == "value":
            out.append(check_value(trace, space))
        elif name == "pret":
            out.extend(check_pret(trace, space))
        elif name == "sce":
            out.append(check_sce(trace, space))
        elif name == "eps3":
            out.append(check_eps3(trace, space))
        elif name == "shadow-legality":
            out.append(check_shadow_legality(trace, space))
    return out


# ---------------------------------------------------------------------------
# spaces
# ---------------------------------------------------------------------------

def check_metric(space, samples=200, seed=0) -> Check:
    rep = validate_length_metric(_graph(space), samples, seed)
    margin = -max(rep.max_triangle_violation, rep.max_asymmetry, rep.max_geodesic_gap)
    return _check("metric", margin, f"{rep.samples} samples", slack=1e-9)


def hat_subspace(space: HatSpace, hat=0) -> MetricGraph:
    """S of the given hat as a metric graph on its own."""
    s_ids = space.hats[hat].s_vertices
    keep = set(s_ids)
    edges = [(u, v, L) for u, v, L in space.base.edges() if u in keep and v in keep]
    return MetricGraph(s_ids, edges)


def _grid(space: HatSpace, hat=0):
    """Cylinder grid vertices of one hat with their charts, S layer included."""
    pts = [(Vertex(s), space.vertex_chart(s)) for s in space.hats[hat].s_vertices]
    pts += [(Vertex(v), c) for v, c in space.charts.items()
            if c.region == CYLINDER and c.hat == hat]
    return pts


def cylinder_law(space: HatSpace, samples=1000, seed=0, hat=0) -> Check:
    """Grid distances follow d_S(s, s') + |t - t'| within 2 mesh(S)."""
    S = hat_subspace(space, hat)
    grid = _grid(space, hat)
    rng = np.random.default_rng(seed)
    budget = 2.0 * S.mesh
    worst, where = math.inf, ""
    for _ in range(samples):
        (x, cx), (y, cy) = (grid[i] for i in rng.integers(len(grid), size=2))
        want = S.distance(cx.trace, cy.trace) + abs(cx.height - cy.height)
        got = space.graph.distance(x, y)
        slack = budget + TOL - abs(got - want)
        if slack < worst:
            worst, where = slack, f"{x.id} ~ {y.id}: {got} vs {want}"
    return _check("cylinder-l1", worst, where)


def chart_law(space: HatSpace, tol=None) -> Check:
    """|d(x, pi(x)) - hei(x)| <= tol on the cylinder grid, 0 on the base."""
    tol = space.tol if tol is None else tol
    worst, where = math.inf, ""
    by_trace = {}
    for hat in range(len(space.hats)):
        for x, c in _grid(space, hat):
            by_trace.setdefault(c.trace, []).append((x, c))
    for trace, pts in by_trace.items():
        f = space.graph.field(trace)
        for x, c in pts:
            d = f[space.graph.index[x.id]]
            slack = tol - abs(d - c.height)
            if slack < worst:
                worst, where = slack, f"{x.id}: d={d}, hei={c.height}"
    return _check("chart-hei", 0.0 if worst == math.inf else worst, where)


def random_path(space: HatSpace, rng, steps, regions=(BASE, CYLINDER)):
    """Random vertex walk staying in the given regions (and off the cone)."""
    G = space.graph
    allowed = [i for i, vid in enumerate(G.ids)
               if space.vertex_chart(vid).region in regions and space.vertex_chart(vid).region != CONE]
    ok = np.zeros(G.n_vertices, dtype=bool)
    ok[allowed] = True
    cur = int(rng.choice(allowed))
    walk, length = [cur], 0.0
    for _ in range(steps):
        nbrs = [(j, w) for j, _, w in G.neighbours(cur) if ok[j]]
        if not nbrs:
            break
        j, w = nbrs[int(rng.integers(len(nbrs)))]
        walk.append(j)
        length += w
        cur = j
    return [Vertex(G.ids[i]) for i in walk], length


def projection_contraction(space: HatSpace, samples=100, steps=40, seed=0,
                           regions=(BASE, CYLINDER)) -> Check:
    """Length of pi o p is at most length(p) + 2 * breakpoints * mesh(S)."""
    rng = np.random.default_rng(seed)
    mesh = max(h.mesh for h in space.hats)
    worst, where = math.inf, ""
    for k in range(samples):
        pts, length = random_path(space, rng, steps, regions)
        traces = [space.chart(p).trace for p in pts]
        proj = sum(space.base.distance(a, b) for a, b in zip(traces, traces[1:]))
        slack = length + 2.0 * len(pts) * mesh + TOL - proj
        if slack < worst:
            worst, where = slack, f"path {k}: projected {proj:.6g} vs {length:.6g}"
    return _check("projection", worst, where)


def base_preserved(space: HatSpace) -> Check:
    """Vertex-pair distances of the base are unchanged by the hats."""
    base, G = space.base, space.graph
    D0 = base.all_pairs()
    idx = np.array([G.index[v] for v in base.ids])
    worst = 0.0
    for a, v in enumerate(base.ids):
        row = G.field(Vertex(v))[idx]
        worst = max(worst, float(np.max(np.abs(row - D0[a]))))
    return _check("base-preserved", 1e-9 - worst, f"max change {worst:.3g}")


def verify_space(space, samples=200, seed=0) -> list:
    out = [check_metric(space, samples, seed)]
    if isinstance(space, HatSpace):
        out += [cylinder_law(space, samples, seed), chart_law(space),
                projection_contraction(space, max(1, samples // 10), seed=seed),
                base_preserved(space)]
    return out
