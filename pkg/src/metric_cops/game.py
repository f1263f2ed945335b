"""The pursuit game on a metric graph.

Each step n: the robber moves at most tau(n), his new position is revealed,
then every cop moves at most tau(n).  The engine enforces the agility bound
(it never clamps), detects capture and keeps the running value
min_n min_i d(r^n, c_i^n) over the finite horizon it is asked to play.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadPlacement, EmptyTrace, IllegalMove, InvalidPoint
from .metric import TOL, point_from_json, point_to_json


@dataclass(frozen=True)
class Schedule:
    """Agility function tau(n), n = 1, 2, ...

    ``constant`` and ``harmonic`` are nonincreasing; ``cycle`` repeats a
    list.  All three have divergent partial sums by construction.
    """

    kind: str
    c: float = 1.0
    values: tuple = ()

    def __post_init__(self):
        vals = (self.c,) if self.kind != "cycle" else self.values
        if self.kind not in ("constant", "harmonic", "cycle"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if not vals or any(not (v > 0) or not math.isfinite(v) for v in vals):
            raise ValueError("agility values must be positive and finite")

    @classmethod
    def constant(cls, c):
        return cls("constant", float(c))

    @classmethod
    def harmonic(cls, c):
        return cls("harmonic", float(c))

    @classmethod
    def cycle(cls, values):
        return cls("cycle", values=tuple(float(v) for v in values))

    def __call__(self, n: int) -> float:
        if n < 1:
            raise ValueError("steps are numbered from 1")
        if self.kind == "constant":
            return self.c
        if self.kind == "harmonic":
            return self.c / n
        return self.values[(n - 1) % len(self.values)]

    @property
    def max(self):
        return max(self.values) if self.kind == "cycle" else self.c

    @property
    def nonincreasing(self):
        if self.kind == "cycle":
            return all(a >= b for a, b in zip(self.values, self.values[1:])) and len(set(self.values)) == 1
        return True

    diverges = True

    def __str__(self):
        if self.kind == "constant":
            return f"const:{self.c!r}"
        if self.kind == "harmonic":
            return f"harmonic:{self.c!r}"
        return "list:" + ",".join(repr(v) for v in self.values)

    @classmethod
    def parse(cls, text: str) -> "Schedule":
        kind, _, arg = text.partition(":")
        kind = kind.strip().lower()
        if kind in ("const", "constant"):
            return cls.constant(float(arg))
        if kind == "harmonic":
            return cls.harmonic(float(arg))
        if kind in ("list", "cycle"):
            return cls.cycle(float(v) for v in arg.split(","))
        raise ValueError(f"bad schedule {text!r}")


@dataclass(frozen=True)
class GameState:
    n: int
    tau: float | None
    robber: object
    cops: tuple
    min_dist: float
    captured: bool
    extras: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "tau": self.tau,
            "robber": point_to_json(self.robber),
            "cops": [point_to_json(c) for c in self.cops],
            "min_dist": self.min_dist,
            "captured": self.captured,
        }
        out.update(self.extras)
        return out

    @classmethod
    def from_json(cls, obj) -> "GameState":
        known = {"n", "tau", "robber", "cops", "min_dist", "captured"}
        return cls(
            int(obj["n"]),
            obj["tau"],
            point_from_json(obj["robber"]),
            tuple(point_from_json(c) for c in obj["cops"]),
            float(obj["min_dist"]),
            bool(obj["captured"]),
            {k: v for k, v in obj.items() if k not in known},
        )


@dataclass
class GameTrace:
    states: list
    header: dict = field(default_factory=dict)
    capture_eps: tuple = ()

    @property
    def captured(self):
        return any(s.captured for s in self.states)

    @property
    def value(self):
        return game_value(self)

    @property
    def min_dists(self):
        return [s.min_dist for s in self.states]

    @property
    def running_value(self):
        return np.minimum.accumulate(np.asarray(self.min_dists)) if self.states else np.array([])

    @property
    def first_approach(self):
        """For every eps, the first step whose min distance is at most eps."""
        out = {}
        for eps in self.capture_eps:
            out[eps] = next((s.n for s in self.states if s.min_dist <= eps), None)
        return out

    def dumps(self) -> str:
        lines = [json.dumps({"header": self.header}, sort_keys=True)]
        lines += [json.dumps(s.to_json(), sort_keys=True) for s in self.states]
        return "\n".join(lines) + "\n"

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "GameTrace":
        header, states = {}, []
        for line in text.splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            if "header" in obj:
                header = obj["header"]
            else:
                states.append(GameState.from_json(obj))
        eps = tuple(header.get("capture_eps", ()))
        return cls(states, header, eps)

    @classmethod
    def read(cls, path) -> "GameTrace":
        with open(path) as fh:
            return cls.loads(fh.read())


def game_value(trace: GameTrace) -> float:
    if not trace.states:
        raise EmptyTrace("trace has no states")
    if trace.captured:
        return 0.0
    return float(min(s.min_dist for s in trace.states))


class RobberStrategy:
    """Robber interface: ``place`` picks everybody's start and the agility
    function, ``move`` picks the next robber point, ``observe`` sees the
    completed step (the cops' answer included)."""

    name = "robber"

    def place(self, graph, k, rng):
        raise NotImplementedError

    def move(self, history, tau):
        raise NotImplementedError

    def observe(self, state):
        pass

    def annotations(self) -> dict:
        return {}


class CopStrategy:
    """Cop interface: ``move`` sees the history and the revealed robber
    destination and returns one point per cop."""

    name = "cops"

    def start(self, state, schedule, rng):
        pass

    def move(self, history, robber, tau):
        raise NotImplementedError


def _graph(space):
    return getattr(space, "graph", space)


class Game:
    def __init__(self, space, k, robber, cops, max_steps, capture_eps=(), seed=0,
                 schedule=None):
        if k < 0:
            raise ValueError("k must be >= 0")
        self.space = space
        self.graph = _graph(space)
        self.k = k
        self.robber = robber
        self.cops = cops
        self.max_steps = int(max_steps)
        self.capture_eps = tuple(float(e) for e in capture_eps)
        self.seed = seed
        rng_robber, rng_cops = (np.random.default_rng(s)
                                for s in np.random.SeedSequence(seed).spawn(2))
        r0, c0, sched = robber.place(self.graph, k, rng_robber)
        self.schedule = schedule if schedule is not None else sched
        try:
            r0 = self.graph.check(r0)
            c0 = tuple(self.graph.check(c) for c in c0)
        except InvalidPoint as exc:
            raise BadPlacement(str(exc)) from None
        if len(c0) != k:
            raise BadPlacement(f"placed {len(c0)} cops, expected {k}")
        s0 = self._state(0, None, r0, c0)
        self.history = [s0]
        robber.observe(s0)
        self.history[0] = self._annotate(s0)
        cops.start(self.history[0], self.schedule, rng_cops)
        self.phase = "over" if s0.captured else "robber"

    def _state(self, n, tau, r, cops):
        dists = [self.graph.distance(r, c) for c in cops]
        md = min(dists) if dists else math.inf
        return GameState(n, tau, r, tuple(cops), md, md <= TOL)

    def _annotate(self, state):
        extra = self.robber.annotations()
        if not extra:
            return state
        return GameState(state.n, state.tau, state.robber, state.cops, state.min_dist,
                         state.captured, dict(extra))

    def _legal(self, agent, prev, nxt, tau, n):
        try:
            nxt = self.graph.check(nxt)
        except InvalidPoint:
            raise IllegalMove(agent, n, math.inf, tau) from None
        if self.graph.within(prev, nxt, tau + TOL) == math.inf:
            raise IllegalMove(agent, n, self.graph.distance(prev, nxt), tau)
        return nxt

    @property
    def over(self):
        return self.phase == "over" or len(self.history) > self.max_steps

    def step(self) -> GameState:
        if self.phase == "over":
            raise RuntimeError("game is over")
        prev = self.history[-1]
        n = prev.n + 1
        if n > self.max_steps:
            raise RuntimeError("horizon reached")
        tau = self.schedule(n)
        r = self._legal("robber", prev.robber, self.robber.move(self.history, tau), tau, n)
        self.phase = "cops"
        moves = list(self.cops.move(self.history, r, tau))
        if len(moves) != self.k:
            raise IllegalMove("cops", n, math.inf, tau)
        cops = tuple(self._legal(f"cop {i}", prev.cops[i], c, tau, n)
                     for i, c in enumerate(moves))
        state = self._state(n, tau, r, cops)
        self.robber.observe(state)
        state = self._annotate(state)
        self.history.append(state)
        self.phase = "over" if state.captured else "robber"
        return state

    def run(self) -> GameTrace:
        while self.phase != "over" and self.history[-1].n < self.max_steps:
            self.step()
        return self.trace()

    def trace(self) -> GameTrace:
        header = {
            "k": self.k,
            "seed": self.seed,
            "schedule": str(self.schedule),
            "max_steps": self.max_steps,
            "robber": getattr(self.robber, "name", type(self.robber).__name__),
            "cops": getattr(self.cops, "name", type(self.cops).__name__),
            "capture_eps": list(self.capture_eps),
        }
        header.update(getattr(self.robber, "header", lambda: {})())
        return GameTrace(list(self.history), header, self.capture_eps)


def new_game(space, k, robber_strategy, cop_strategy, schedule=None, max_steps=100,
             capture_eps=(), seed=0) -> Game:
    return Game(space, k, robber_strategy, cop_strategy, max_steps, capture_eps, seed,
                schedule)


def step(game: Game) -> GameState:
    return game.step()


def run(game: Game) -> GameTrace:
    return game.run()
