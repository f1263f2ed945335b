"""Robber and cop strategies.

``PretendRobber`` plays a solved discrete game on a skeleton drawn inside a
metric graph: each real cop is replaced by a pretended vertex and the
robber answers those with the table's move.  ``ShadowRobber`` lets an inner
robber play against shadow cops kept in the base space of a hat by an
accomplice.  The cop strategies are baselines to play against.
"""
from __future__ import annotations

from dataclasses import dataclass

from .constructions import CONE, TOP, HatSpace, Skeleton, WedgeSpace
from .discrete import solve
from .errors import (InconsistentState, MissingChart, NoSuitableComponent,
                     ScheduleMismatch)
from .game import CopStrategy, GameState, RobberStrategy, Schedule
from .metric import TOL, point_to_json


def _step_toward(G, src, dst, tau):
    """Point reached by walking at most ``tau`` from src along a geodesic to dst."""
    d = G.distance(src, dst)
    if d <= tau:
        return dst
    return G.point_along(G.geodesic(src, dst), tau)


# ---------------------------------------------------------------------------
# pretended positions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PretendState:
    pretended: tuple  # discrete vertex per cop
    component: int
    ell: float


def _skeleton(space, component=None) -> Skeleton:
    if isinstance(space, Skeleton):
        return space
    if isinstance(space, WedgeSpace):
        for comp in space.components:
            if comp.index == component:
                return comp.skeleton
        raise InconsistentState(f"no component {component!r}")
    sk = getattr(space, "skeleton", None)
    if sk is None:
        raise InconsistentState("space carries no skeleton")
    return sk


def pretend_vertex(sk: Skeleton, prev: int, x) -> int:
    """Pretended vertex of a cop standing at ``x`` whose previous pretended
    vertex was ``prev``."""
    loc = sk.locate(x)
    if loc is None:
        return sk.hub_index
    if loc[0] == "v":
        return loc[1]
    _, j, s = loc
    a, b = sk.graph.edges[j]
    half = sk.ell / 2
    if abs(s - half) > TOL:
        return a if s < half else b
    # midpoint: follow a geodesic from the previous pretended vertex and
    # take the last skeleton vertex strictly inside it
    path = sk.metric.geodesic(sk.vertex_point(prev), x)
    z = prev
    for p in path.points[1:-1]:
        hit = sk.locate(p)
        if hit is not None and hit[0] == "v":
            z = hit[1]
    return z


def pretend_update(prev: PretendState, cop_moves, space) -> PretendState:
    cop_moves = list(cop_moves)
    if len(cop_moves) != len(prev.pretended):
        raise InconsistentState(
            f"{len(cop_moves)} cop positions for {len(prev.pretended)} pretended cops")
    sk = _skeleton(space, prev.component)
    n = sk.graph.n
    if any(not 0 <= p < n for p in prev.pretended):
        raise InconsistentState(f"pretended vertices {prev.pretended!r} out of range")
    new = tuple(pretend_vertex(sk, p, x) for p, x in zip(prev.pretended, cop_moves))
    return PretendState(new, prev.component, prev.ell)


class PretendRobber(RobberStrategy):
    """Robber that consults a discrete table through pretended cop vertices."""

    name = "pretend"

    def __init__(self, skeleton: Skeleton, k: int, table=None, component: int = 1):
        self.skeleton = skeleton
        self.k = k
        self.table = table
        self.component = component
        self.ell = skeleton.ell
        self.state = None
        self.r = None

    def place(self, graph, k, rng):
        if k != self.k:
            raise InconsistentState(f"strategy built for {self.k} cops, game has {k}")
        sk = self.skeleton
        hub = sk.hub_index
        cops = (hub,) * k
        self.r = self.table.robber_start(cops) if k else hub
        self.state = PretendState(cops, self.component, self.ell)
        return (sk.vertex_point(self.r), [sk.vertex_point(hub)] * k,
                Schedule.constant(self.ell))

    def move(self, history, tau):
        if self.k:
            self.r = self.table.robber_move(self.state.pretended, self.r)
        return self.skeleton.vertex_point(self.r)

    def observe(self, state):
        if state.n == 0:
            return
        self.state = pretend_update(self.state, state.cops, self.skeleton)

    def annotations(self):
        vm = self.skeleton.vertex_map
        return {"pretended": [vm[p] for p in self.state.pretended]}

    def header(self):
        return {"component": self.component, "ell": self.ell}


def pretend_robber_strategy(space, tables=None, k: int = 1) -> PretendRobber:
    """Pick the least component whose discrete cop number exceeds ``k`` and
    play its table.  ``space`` is a WedgeSpace or anything carrying a
    skeleton (a Skeleton itself, or a HatSpace over a drawn graph)."""
    tables = tables or {}
    if isinstance(space, WedgeSpace):
        candidates = [(c.index, c.skeleton) for c in space.components if c.skeleton is not None]
    else:
        candidates = [(1, _skeleton(space))]
    for index, sk in candidates:
        if k == 0:
            return PretendRobber(sk, 0, None, index)
        table = tables.get(index)
        if table is None:
            table = solve(sk.graph, k)
        if table.k != k:
            raise InconsistentState(f"table for component {index} is for {table.k} cops")
        if not table.cops_win:
            return PretendRobber(sk, k, table, index)
    raise NoSuitableComponent(f"every component is {k}-cop-win")


# ---------------------------------------------------------------------------
# shadows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShadowState:
    positions: tuple


def accomplice_update(shadow, cop_new, tau, base, chart=None):
    """New position of one shadow cop.

    ``chart`` is the HatChart of ``cop_new``; alternatively ``cop_new`` may
    be passed as a ``(point, chart)`` pair.  In the top or at the cone the
    shadow sits; otherwise it walks up to ``tau`` along a geodesic of the
    base towards the trace of the cop.
    """
    if chart is None and isinstance(cop_new, tuple):
        cop_new, chart = cop_new
    if chart is None:
        raise MissingChart(cop_new)
    if chart.region in (TOP, CONE):
        return shadow
    return _step_toward(base, shadow, chart.trace, tau)


def accomplice_state(shadows: ShadowState, cops, tau, space: HatSpace) -> ShadowState:
    new = tuple(accomplice_update(s, c, tau, space.base, space.chart(c))
                for s, c in zip(shadows.positions, cops))
    return ShadowState(new)


class ShadowRobber(RobberStrategy):
    """The inner robber plays against shadow cops living in the base space."""

    name = "shadow"

    def __init__(self, space: HatSpace, inner: RobberStrategy, k: int):
        self.space = space
        self.inner = inner
        self.k = k
        self.shadows = None
        self._shadow_history = []

    def place(self, graph, k, rng):
        r0, c0, sched = self.inner.place(self.space.base, k, rng)
        self.shadows = ShadowState(tuple(c0))
        return r0, c0, sched

    def move(self, history, tau):
        return self.inner.move(self._shadow_history, tau)

    def observe(self, state):
        if state.n > 0:
            self.shadows = accomplice_state(self.shadows, state.cops, state.tau, self.space)
        shadow_state = GameState(state.n, state.tau, state.robber, self.shadows.positions,
                                 min((self.space.base.distance(state.robber, s)
                                      for s in self.shadows.positions), default=float("inf")),
                                 False)
        self._shadow_history.append(shadow_state)
        self.inner.observe(shadow_state)

    def annotations(self):
        out = {"shadows": [point_to_json(s) for s in self.shadows.positions]}
        out.update(self.inner.annotations())
        return out

    def header(self):
        out = dict(getattr(self.inner, "header", lambda: {})())
        out["tol"] = self.space.tol
        out["inner"] = getattr(self.inner, "name", type(self.inner).__name__)
        return out


def shadow_robber_strategy(X_hat: HatSpace, inner: RobberStrategy, k: int) -> ShadowRobber:
    return ShadowRobber(X_hat, inner, k)


# ---------------------------------------------------------------------------
# simple robbers
# ---------------------------------------------------------------------------

class IdleRobber(RobberStrategy):
    """Fixed placement; the robber never moves."""

    name = "idle"

    def __init__(self, robber, cops, schedule):
        self.robber = robber
        self.cops = list(cops)
        self.schedule = schedule

    def place(self, graph, k, rng):
        return self.robber, list(self.cops), self.schedule

    def move(self, history, tau):
        return history[-1].robber


class RandomRobber(RobberStrategy):
    """Random placement, then a walk towards random waypoints."""

    name = "random"

    def __init__(self, schedule, vertex_prob=0.2):
        self.schedule = schedule
        self.vertex_prob = vertex_prob

    def place(self, graph, k, rng):
        self.graph, self.rng = graph, rng
        self.target = graph.random_point(rng, self.vertex_prob)
        pts = [graph.random_point(rng, self.vertex_prob) for _ in range(k + 1)]
        return pts[0], pts[1:], self.schedule

    def move(self, history, tau):
        here = history[-1].robber
        if here == self.target:
            self.target = self.graph.random_point(self.rng, self.vertex_prob)
        return _step_toward(self.graph, here, self.target, tau * self.rng.uniform(0.0, 1.0))


# ---------------------------------------------------------------------------
# cops
# ---------------------------------------------------------------------------

class GreedyCops(CopStrategy):
    """Every cop runs along a geodesic straight at the revealed robber."""

    name = "greedy"

    def __init__(self, space):
        self.graph = getattr(space, "graph", space)

    def move(self, history, robber, tau):
        return [_step_toward(self.graph, c, robber, tau) for c in history[-1].cops]


def greedy_cop_strategy(space) -> GreedyCops:
    return GreedyCops(space)


class RandomCops(CopStrategy):
    """Each cop heads for its own random waypoint at full speed and draws a
    new one on arrival.  The randomness comes from the game seed."""

    name = "random"

    def __init__(self, space, vertex_prob=0.2):
        self.graph = getattr(space, "graph", space)
        self.vertex_prob = vertex_prob
        self.targets = []

    def start(self, state, schedule, rng):
        self.rng = rng
        self.targets = [self.graph.random_point(rng, self.vertex_prob) for _ in state.cops]

    def move(self, history, robber, tau):
        out = []
        for i, c in enumerate(history[-1].cops):
            if c == self.targets[i]:
                self.targets[i] = self.graph.random_point(self.rng, self.vertex_prob)
            out.append(_step_toward(self.graph, c, self.targets[i], tau))
        return out


class LiftedCops(CopStrategy):
    """Discrete optimal cops replayed vertex to vertex with tau = edge length."""

    name = "lifted"

    def __init__(self, table, skeleton: Skeleton, space=None):
        self.table = table
        self.skeleton = skeleton
        self.graph = getattr(space, "graph", space) if space is not None else skeleton.metric

    def start(self, state, schedule, rng):
        ell = self.skeleton.ell
        if schedule.kind != "constant" or abs(schedule.c - ell) > TOL * max(1.0, ell):
            raise ScheduleMismatch(f"lifted cops need tau = {ell!r}, got {schedule}")

    def _snap(self, p):
        """Nearest skeleton vertex, or None off the skeleton."""
        sk = self.skeleton
        loc = sk.locate(p)
        if loc is None:
            return None
        if loc[0] == "v":
            return loc[1]
        _, j, s = loc
        a, b = sk.graph.edges[j]
        if abs(s - sk.ell / 2) <= TOL:
            ra, rb = sk.metric.rank[sk.metric.index[sk.vertex_map[a]]], \
                sk.metric.rank[sk.metric.index[sk.vertex_map[b]]]
            return a if ra < rb else b
        return a if s < sk.ell / 2 else b

    def _vertex_of(self, p):
        loc = self.skeleton.locate(p)
        return loc[1] if loc is not None and loc[0] == "v" else None

    def move(self, history, robber, tau):
        sk, G = self.skeleton, self.graph
        cops = list(history[-1].cops)
        hub = sk.vertex_point(sk.hub_index)
        r = self._snap(robber)
        here = [self._vertex_of(c) for c in cops]
        plan = None
        if r is not None and all(v is not None for v in here):
            plan = self.table.cop_move(tuple(here), r)
        out = []
        for i, c in enumerate(cops):
            if G.distance(c, robber) <= tau:
                out.append(robber)
            elif r is None:
                out.append(_step_toward(G, c, hub, tau))
            elif plan is not None:
                out.append(sk.vertex_point(plan[i]))
            else:
                # get back onto a skeleton vertex first
                v = self._snap(c)
                out.append(sk.vertex_point(v) if v is not None else _step_toward(G, c, hub, tau))
        return out


def lifted_cop_strategy(table, component, space=None) -> LiftedCops:
    sk = component.skeleton if hasattr(component, "skeleton") else component
    return LiftedCops(table, sk, space)
