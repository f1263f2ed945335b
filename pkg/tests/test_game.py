import math

import numpy as np
import pytest

from metric_cops.errors import BadPlacement, EmptyTrace, IllegalMove
from metric_cops.game import (CopStrategy, GameState, GameTrace, Schedule, game_value, new_game,
                              run, step)
from metric_cops.generators import from_spec
from metric_cops.metric import EdgePoint, MetricGraph, Vertex
from metric_cops.strategies import GreedyCops, IdleRobber, RandomCops, RandomRobber


class StayCops(CopStrategy):
    def move(self, history, robber, tau):
        return list(history[-1].cops)


class TeleportCops(CopStrategy):
    """Jumps to the robber regardless of distance."""

    def move(self, history, robber, tau):
        return [robber for _ in history[-1].cops]


class Overshoot(CopStrategy):
    """Moves a hair more than allowed along a geodesic."""

    def __init__(self, graph, extra):
        self.graph, self.extra = graph, extra

    def move(self, history, robber, tau):
        out = []
        for c in history[-1].cops:
            g = self.graph.geodesic(c, robber)
            out.append(self.graph.point_along(g, min(g.length, tau + self.extra)))
        return out


@pytest.fixture
def interval():
    return MetricGraph([0, 1], [(0, 1, 3.0)])


def test_schedule_kinds():
    s = Schedule.constant(0.5)
    assert [s(n) for n in (1, 2, 10)] == [0.5, 0.5, 0.5]
    h = Schedule.harmonic(2.0)
    assert [h(n) for n in (1, 2, 4)] == [2.0, 1.0, 0.5]
    c = Schedule.cycle([1.0, 0.25])
    assert [c(n) for n in (1, 2, 3)] == [1.0, 0.25, 1.0]
    assert c.max == 1.0 and s.nonincreasing and h.nonincreasing and not c.nonincreasing
    assert s.diverges and h.diverges and c.diverges
    for text in ("const:0.5", "harmonic:2.0", "list:1.0,0.25"):
        assert str(Schedule.parse(text)) == text
    with pytest.raises(ValueError):
        Schedule.constant(0)
    with pytest.raises(ValueError):
        Schedule.parse("weird:1")
    with pytest.raises(ValueError):
        s(0)


def test_immediate_capture_on_k2():
    G = from_spec("path:2")
    rob = IdleRobber(Vertex(0), [Vertex(0)], Schedule.constant(1))
    tr = new_game(G, 1, rob, StayCops(), max_steps=10).run()
    assert len(tr.states) == 1 and tr.captured and tr.value == 0.0


def test_zero_steps_gives_initial_state(c4):
    rob = IdleRobber(Vertex(0), [Vertex(2)], Schedule.constant(1))
    tr = run(new_game(c4, 1, rob, StayCops(), max_steps=0))
    assert len(tr.states) == 1 and tr.value == 2.0


def test_stationary_distances_constant(c4):
    rob = IdleRobber(Vertex(0), [Vertex(2), EdgePoint(0, 0.5)], Schedule.constant(1))
    tr = new_game(c4, 2, rob, StayCops(), max_steps=5).run()
    assert len(set(tr.min_dists)) == 1 and len(tr.states) == 6


def test_interval_chase_greedy(interval):
    rob = IdleRobber(Vertex(1), [Vertex(0)], Schedule.constant(1.0))
    tr = new_game(interval, 1, rob, GreedyCops(interval), max_steps=10).run()
    assert tr.captured and tr.states[-1].n == 3
    assert tr.min_dists == [3.0, 2.0, 1.0, 0.0]


@pytest.mark.parametrize("d,tau", [(3.0, 0.7), (2.5, 1.0), (3.0, 3.0)])
def test_interval_chase_ceil(d, tau):
    G = MetricGraph([0, 1], [(0, 1, d)])
    rob = IdleRobber(Vertex(1), [Vertex(0)], Schedule.constant(tau))
    tr = new_game(G, 1, rob, GreedyCops(G), max_steps=50).run()
    assert tr.captured and tr.states[-1].n == math.ceil(d / tau - 1e-12)


def test_greedy_equal_positions_and_two_cops(c4):
    g = GreedyCops(c4)
    st = GameState(0, None, Vertex(0), (Vertex(0), Vertex(2)), 0.0, True)
    out = g.move([st], Vertex(0), 0.5)
    assert out[0] == Vertex(0)
    assert c4.distance(out[1], Vertex(0)) == pytest.approx(1.5)


def test_exact_tau_move_is_legal(interval):
    class Exact(CopStrategy):
        def move(self, history, robber, tau):
            return [interval.point(0, tau * history[-1].n + tau)]

    rob = IdleRobber(Vertex(1), [Vertex(0)], Schedule.constant(0.75))
    tr = new_game(interval, 1, rob, Exact(), max_steps=3).run()
    assert tr.states[-1].cops[0] == EdgePoint(0, 2.25)


def test_teleport_rejected(c4):
    rob = IdleRobber(Vertex(0), [Vertex(2)], Schedule.constant(0.5))
    game = new_game(c4, 1, rob, TeleportCops(), max_steps=5)
    with pytest.raises(IllegalMove) as err:
        game.step()
    assert err.value.agent == "cop 0" and err.value.step == 1


def test_overshoot_rejected(c4):
    rob = IdleRobber(Vertex(0), [Vertex(2)], Schedule.constant(0.5))
    game = new_game(c4, 1, rob, Overshoot(c4, 1e-6), max_steps=5)
    with pytest.raises(IllegalMove):
        game.step()
    # within the 1e-9 slack it is fine
    rob = IdleRobber(Vertex(0), [Vertex(2)], Schedule.constant(0.5))
    new_game(c4, 1, rob, Overshoot(c4, 1e-10), max_steps=5).run()


def test_cheating_robber_rejected(c4):
    class Jumper(IdleRobber):
        def move(self, history, tau):
            return Vertex(2)

    rob = Jumper(Vertex(0), [Vertex(1)], Schedule.constant(0.5))
    with pytest.raises(IllegalMove) as err:
        new_game(c4, 1, rob, StayCops(), max_steps=5).step()
    assert err.value.agent == "robber"


def test_wrong_cop_count_rejected(c4):
    class Few(CopStrategy):
        def move(self, history, robber, tau):
            return []

    rob = IdleRobber(Vertex(0), [Vertex(2)], Schedule.constant(1))
    with pytest.raises(IllegalMove):
        new_game(c4, 1, rob, Few(), max_steps=2).step()


def test_bad_placement(c4):
    with pytest.raises(BadPlacement):
        new_game(c4, 1, IdleRobber(Vertex(99), [Vertex(0)], Schedule.constant(1)), StayCops())
    with pytest.raises(BadPlacement):
        new_game(c4, 2, IdleRobber(Vertex(0), [Vertex(1)], Schedule.constant(1)), StayCops())
    with pytest.raises(BadPlacement):
        new_game(c4, 1, IdleRobber(Vertex(0), [EdgePoint(0, 7.0)], Schedule.constant(1)),
                 StayCops())


def test_value_of_trace():
    states = [GameState(n, 1.0, Vertex(0), (Vertex(1),), d, False)
              for n, d in enumerate([3.0, 2.0, 1.0, 2.0])]
    tr = GameTrace(states)
    assert game_value(tr) == 1.0
    assert list(tr.running_value) == [3.0, 2.0, 1.0, 1.0]
    with pytest.raises(EmptyTrace):
        game_value(GameTrace([]))


def test_first_approach(interval):
    rob = IdleRobber(Vertex(1), [Vertex(0)], Schedule.constant(1.0))
    tr = new_game(interval, 1, rob, GreedyCops(interval), max_steps=10,
                  capture_eps=(2.5, 0.5, 0.0)).run()
    assert tr.first_approach == {2.5: 1, 0.5: 3, 0.0: 3}


def test_step_after_capture_raises():
    G = from_spec("path:2")
    game = new_game(G, 1, IdleRobber(Vertex(0), [Vertex(0)], Schedule.constant(1)), StayCops())
    with pytest.raises(RuntimeError):
        step(game)


def _random_game(G, k, seed, steps=30, cops="random"):
    rob = RandomRobber(Schedule.cycle([0.7, 0.3, 0.5]))
    cs = RandomCops(G) if cops == "random" else GreedyCops(G)
    return new_game(G, k, rob, cs, max_steps=steps, capture_eps=(0.1,), seed=seed)


def test_determinism_by_seed(petersen):
    a = _random_game(petersen, 2, seed=7).run().dumps()
    b = _random_game(petersen, 2, seed=7).run().dumps()
    c = _random_game(petersen, 2, seed=8).run().dumps()
    assert a == b and a != c


def test_trace_jsonl_round_trip(tmp_path, petersen):
    tr = _random_game(petersen, 2, seed=3).run()
    tr.write(tmp_path / "t.jsonl")
    back = GameTrace.read(tmp_path / "t.jsonl")
    assert back.states == tr.states
    assert back.header == tr.header
    assert back.dumps() == tr.dumps()


@pytest.mark.parametrize("seed", range(20))
def test_engine_properties_random(seed):
    specs = ["cycle:5", "grid:2x3", "tree:6", "complete:4", "petersen"]
    G = from_spec(specs[seed % len(specs)], seed=seed)
    tr = _random_game(G, 1 + seed % 3, seed, cops="greedy" if seed % 2 else "random").run()
    run_val = np.asarray(tr.running_value)
    assert np.all(np.diff(run_val) <= 0)
    for prev, cur in zip(tr.states, tr.states[1:]):
        assert G.distance(prev.robber, cur.robber) <= cur.tau + 1e-9
        for a, b in zip(prev.cops, cur.cops):
            assert G.distance(a, b) <= cur.tau + 1e-9
    if tr.captured:
        assert tr.value == 0.0 and tr.states[-1].min_dist <= 1e-9
