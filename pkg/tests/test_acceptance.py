"""Acceptance criteria 1-5, one PASS/FAIL line each (see the summary section)."""
import time

import networkx as nx
import numpy as np

from acceptance_log import record
from metric_cops.constructions import BASE, CYLINDER, TOP
from metric_cops.discrete import DiscreteGraph, cop_number_discrete, is_dismantlable, k_copwin, solve
from metric_cops.errors import IllegalMove
from metric_cops.game import CopStrategy, Schedule, new_game
from metric_cops.generators import from_spec, spec_edges
from metric_cops.metric import MetricGraph
from metric_cops.strategies import (GreedyCops, RandomCops, RandomRobber, lifted_cop_strategy,
                                    pretend_robber_strategy, shadow_robber_strategy)
from metric_cops.verify import (base_preserved, chart_law, cylinder_law, projection_contraction,
                                verify_trace)
from oracles import connected_graphs, random_tree_edges


# -- 1. solver ground truth ----------------------------------------------------

def test_criterion_1_solver_ground_truth():
    t0 = time.perf_counter()
    bad = []
    trees = 0
    for n in range(2, 13):
        for T in nx.nonisomorphic_trees(n):
            trees += 1
            if cop_number_discrete(DiscreteGraph(n, list(T.edges()))) != 1:
                bad.append(("tree", sorted(T.edges())))
    rng = np.random.default_rng(20)
    for n in range(13, 21):
        for _ in range(25):
            trees += 1
            edges = random_tree_edges(n, rng)
            if cop_number_discrete(DiscreteGraph(n, edges)) != 1:
                bad.append(("tree", edges))
    if cop_number_discrete(DiscreteGraph(1, [])) != 1:
        bad.append(("tree", 1))
    for n in range(4, 13):
        if cop_number_discrete(DiscreteGraph(*spec_edges(f"cycle:{n}", 0))) != 2:
            bad.append(("cycle", n))
    if cop_number_discrete(DiscreteGraph(*spec_edges("petersen", 0))) != 3:
        bad.append("petersen")
    catalog = 0
    for g in connected_graphs(7):
        catalog += 1
        G = DiscreteGraph(g.number_of_nodes(), list(g.edges()))
        if k_copwin(G, 1)[0] != is_dismantlable(G):
            bad.append(("atlas", list(g.edges())))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed <= 120
    record(1, "solver ground truth", ok,
           f"{trees} trees, C4..C12, Petersen, {catalog} atlas graphs; "
           f"{len(bad)} mismatches; {elapsed:.1f}s")
    assert not bad, bad[:5]
    assert elapsed <= 120


# -- 2. pretend robber on the wedge --------------------------------------------

def test_criterion_2_pretend_robber(wedge):
    comp = wedge.components[2]
    ell = comp.skeleton.ell
    table = solve(comp.skeleton.graph, 2)
    makers = {"greedy": lambda: GreedyCops(wedge),
              "lifted": lambda: lifted_cop_strategy(table, comp, wedge),
              "random": lambda: RandomCops(wedge)}
    worst, slowest, failures = np.inf, 0.0, []
    for name, make in makers.items():
        for seed in range(3):
            t0 = time.perf_counter()
            rob = pretend_robber_strategy(wedge, k=2)
            assert rob.component == comp.index
            tr = new_game(wedge, 2, rob, make(), max_steps=10_000, seed=seed).run()
            checks = verify_trace(tr, wedge)
            slowest = max(slowest, time.perf_counter() - t0)
            worst = min(worst, tr.value)
            if len(tr.states) != 10_001 or tr.value < ell / 2 - 1e-9:
                failures.append(f"{name}/{seed}: value {tr.value}")
            failures += [f"{name}/{seed}: {c.line()}" for c in checks if not c.ok]
    ok = not failures and slowest <= 60
    record(2, "pretend robber keeps l/2", ok,
           f"min distance {worst:.6g} vs l/2 = {ell / 2:.6g}; pret checks "
           f"{'ok' if not failures else failures[:3]}; slowest run {slowest:.1f}s")
    assert not failures, failures
    assert slowest <= 60


# -- 3. shadow invariant on the hat --------------------------------------------

def test_criterion_3_shadow_invariant(petersen_hat):
    H = petersen_hat
    assert H.tol <= 0.3
    runs = [("greedy", 0), ("random", 0), ("random", 1), ("random", 2)]
    margins, slowest, failures = {}, 0.0, []
    for name, seed in runs:
        t0 = time.perf_counter()
        inner = pretend_robber_strategy(H.skeleton, k=2)
        rob = shadow_robber_strategy(H, inner, 2)
        cops = GreedyCops(H) if name == "greedy" else RandomCops(H)
        tr = new_game(H, 2, rob, cops, max_steps=1000, seed=seed).run()
        assert tr.header["schedule"] == "const:1.0"
        checks = {c.name: c for c in verify_trace(tr, H)}
        slowest = max(slowest, time.perf_counter() - t0)
        for key in ("sce", "eps3"):
            margins[key] = min(margins.get(key, np.inf), checks[key].margin)
        failures += [f"{name}/{seed}: {c.line()}" for c in checks.values() if not c.ok]
    ok = not failures and slowest <= 120
    record(3, "shadow invariant", ok,
           f"tol {H.tol:.3g}; worst (sce) margin {margins['sce']:.3g}; "
           f"worst eps/3 margin {margins['eps3']:.3g}; slowest run {slowest:.1f}s")
    assert not failures, failures
    assert slowest <= 120


# -- 4. construction laws ------------------------------------------------------

def test_criterion_4_construction_laws(petersen_hat):
    H = petersen_hat
    t0 = time.perf_counter()
    checks = [cylinder_law(H, samples=1000, seed=4),
              chart_law(H),
              projection_contraction(H, samples=100, seed=4, regions=(BASE, CYLINDER, TOP)),
              base_preserved(H)]
    elapsed = time.perf_counter() - t0
    ok = all(c.ok for c in checks) and elapsed <= 60
    record(4, "construction laws", ok,
           "; ".join(f"{c.name} margin {c.margin:.3g}" for c in checks) + f"; {elapsed:.1f}s")
    assert all(c.ok for c in checks), [c.line() for c in checks]
    assert elapsed <= 60


# -- 5. engine soundness -------------------------------------------------------

class Cheat(CopStrategy):
    """Wraps a cop strategy and at one chosen step jumps too far."""

    def __init__(self, inner, graph, at):
        self.inner, self.graph, self.at = inner, graph, at
        self.cheated = False

    def start(self, state, schedule, rng):
        self.inner.start(state, schedule, rng)

    def move(self, history, robber, tau):
        out = self.inner.move(history, robber, tau)
        if history[-1].n + 1 == self.at:
            far = _far_point(self.graph, history[-1].cops[0])
            if self.graph.distance(history[-1].cops[0], far) > tau + 1e-6:
                out[0] = far
                self.cheated = True
        return out


class CheatRobber(RandomRobber):
    def __init__(self, schedule, graph, at):
        super().__init__(schedule)
        self.graph, self.at, self.cheated = graph, at, False

    def move(self, history, tau):
        nxt = super().move(history, tau)
        if history[-1].n + 1 == self.at:
            far = _far_point(self.graph, history[-1].robber)
            if self.graph.distance(history[-1].robber, far) > tau + 1e-6:
                self.cheated = True
                return far
        return nxt


def _far_point(G, x):
    cands = [G.point(e, L * j / 8) for e, (_, _, L) in enumerate(G.edges()) for j in range(9)]
    return max(cands, key=lambda p: G.distance(x, p))


def _small_space(rng):
    kind = int(rng.integers(6))
    if kind == 5:
        n = int(rng.integers(3, 6))
        edges = [(i, int(rng.integers(i)), float(rng.uniform(0.5, 2))) for i in range(1, n)]
        edges.append((0, n - 1, float(rng.uniform(0.5, 2))))
        return MetricGraph(range(n), edges)
    spec = ["cycle:5", "grid:2x3", "tree:6", "complete:4", "path:4"][kind]
    return from_spec(spec, seed=int(rng.integers(100)))


def _schedule(rng):
    kind = int(rng.integers(3))
    if kind == 0:
        return Schedule.constant(float(rng.uniform(0.1, 0.7)))
    if kind == 1:
        return Schedule.harmonic(float(rng.uniform(0.2, 0.7)))
    return Schedule.cycle([float(x) for x in rng.uniform(0.1, 0.7, size=3)])


def test_criterion_5_engine_soundness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    games = illegal_ok = replays = 0
    problems = []
    for g in range(1000):
        G = _small_space(rng)
        k = int(rng.integers(1, 4))
        sched = _schedule(rng)
        seed = int(rng.integers(2**31))
        steps = int(rng.integers(5, 30))
        mode = g % 4
        random_cops = bool(rng.integers(2))

        def make(cheat_at=None, robber_cheat=False):
            cops = RandomCops(G) if random_cops else GreedyCops(G)
            rob = CheatRobber(sched, G, cheat_at) if robber_cheat else RandomRobber(sched)
            if cheat_at is not None and not robber_cheat:
                cops = Cheat(cops, G, cheat_at)
            return rob, cops

        if mode in (0, 1):
            rob, cops = make()
            game = new_game(G, k, rob, cops, max_steps=steps, seed=seed)
            tr = game.run()
            games += 1
            for prev, cur in zip(tr.states, tr.states[1:]):
                if cur.tau != sched(cur.n):
                    problems.append((g, "schedule"))
                if G.distance(prev.robber, cur.robber) > cur.tau + 1e-9:
                    problems.append((g, "robber step"))
                if any(G.distance(a, b) > cur.tau + 1e-9 for a, b in zip(prev.cops, cur.cops)):
                    problems.append((g, "cop step"))
                if cur.min_dist != min(G.distance(cur.robber, c) for c in cur.cops):
                    problems.append((g, "min_dist"))
            if np.any(np.diff(np.asarray(tr.running_value)) > 0):
                problems.append((g, "value"))
            if tr.captured != (tr.states[-1].min_dist <= 1e-9):
                problems.append((g, "capture"))
            if mode == 0:
                rob2, cops2 = make()
                again = new_game(G, k, rob2, cops2, max_steps=steps, seed=seed).run()
                replays += 1
                if again.dumps() != tr.dumps():
                    problems.append((g, "determinism"))
        else:
            at = int(rng.integers(1, steps + 1))
            rob, cops = make(at, robber_cheat=(mode == 3))
            game = new_game(G, k, rob, cops, max_steps=steps, seed=seed)
            try:
                game.run()
                raised = None
            except IllegalMove as exc:
                raised = exc
            games += 1
            cheater = rob if mode == 3 else cops
            if cheater.cheated:
                if raised is None or raised.step != at:
                    problems.append((g, "not rejected"))
                else:
                    illegal_ok += 1
            elif raised is not None:
                problems.append((g, "false rejection"))
    elapsed = time.perf_counter() - t0
    ok = not problems and illegal_ok >= 100 and elapsed <= 60
    record(5, "engine soundness", ok,
           f"{games} games, {replays} replays identical, {illegal_ok} illegal moves rejected, "
           f"{len(problems)} problems; {elapsed:.1f}s")
    assert not problems, problems[:10]
    assert illegal_ok >= 100
    assert elapsed <= 60
