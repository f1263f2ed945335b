"""Exact solver for the classical Cops-and-Robber game on finite graphs.

Rules: the cops are placed first, then the robber; afterwards cops and
robber alternate, cops first, each player moving to a vertex of the closed
neighbourhood of its position.  The cops win by occupying the robber's
vertex.  Cop positions are multisets (cops are interchangeable).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from math import comb

import numpy as np

from . import kernels
from .errors import BudgetExceeded, DisconnectedGraph, UnknownState

DEFAULT_BUDGET = 50_000_000
COPS, ROBBER = 0, 1  # whose turn it is


class DiscreteGraph:
    """Finite simple connected graph on vertices ``0..n-1`` with labels."""

    def __init__(self, n, edges, labels=None):
        self.n = int(n)
        self.labels = list(labels) if labels is not None else list(range(self.n))
        adj = [set() for _ in range(self.n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at {u}")
            adj[u].add(v)
            adj[v].add(u)
        self.adj = [sorted(a) for a in adj]
        self.closed = [sorted(a | {i}) for i, a in enumerate(adj)]
        self.dist = self._hop_distances()
        if self.n and np.any(self.dist < 0):
            raise DisconnectedGraph("discrete graph is not connected")

    @classmethod
    def from_metric(cls, G):
        pairs = {tuple(sorted((int(u), int(v)))) for u, v in zip(G.eu, G.ev)}
        return cls(G.n_vertices, sorted(pairs), labels=G.ids)

    @property
    def edges(self):
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def _hop_distances(self):
        D = np.full((self.n, self.n), -1, dtype=np.int64)
        for s in range(self.n):
            D[s, s] = 0
            frontier = [s]
            while frontier:
                nxt = []
                for u in frontier:
                    for v in self.adj[u]:
                        if D[s, v] < 0:
                            D[s, v] = D[s, u] + 1
                            nxt.append(v)
                frontier = nxt
        return D

    def csr_closed(self):
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(c) for c in self.closed])
        idx = np.array([v for c in self.closed for v in c], dtype=np.int64)
        return ptr, idx


def state_count(n, k):
    return 2 * comb(n + k - 1, k) * n


def _multisets(n, k):
    ms = np.array(list(itertools.combinations_with_replacement(range(n), k)), dtype=np.int64)
    return ms.reshape(-1, k)


def _encode(rows, n):
    k = rows.shape[-1]
    weights = n ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return rows @ weights


def _successors(G, ms, lookup, chunk=4096):
    """CSR of distinct multisets reachable in one cop move from each row."""
    n, k = G.n, ms.shape[1]
    width = max(len(c) for c in G.closed)
    nb = np.full((n, width), -1, dtype=np.int64)
    for i, c in enumerate(G.closed):
        nb[i, : len(c)] = c
    choices = np.array(list(itertools.product(range(width), repeat=k)), dtype=np.int64)
    sentinel = np.iinfo(np.int64).max
    counts, chunks = [], []
    for lo in range(0, len(ms), chunk):
        block = ms[lo: lo + chunk]
        moves = nb[block[:, None, :], choices[None, :, :]]  # (b, width**k, k)
        valid = np.all(moves >= 0, axis=2)
        moves = np.sort(moves, axis=2)
        codes = np.where(valid, lookup[_encode(np.maximum(moves, 0), n)], sentinel)
        codes.sort(axis=1)
        keep = codes != sentinel
        keep[:, 1:] &= codes[:, 1:] != codes[:, :-1]
        counts.append(keep.sum(axis=1))
        chunks.append(codes[keep])
    ptr = np.zeros(len(ms) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum(np.concatenate(counts))
    return ptr, np.concatenate(chunks).astype(np.int64)


@dataclass
class StrategyTable:
    """Solved game: retrograde depths for every (cops, robber, turn) state
    plus the move-selection rules built on top of them."""

    graph: DiscreteGraph
    k: int
    multisets: np.ndarray
    lookup: np.ndarray
    succ_ptr: np.ndarray
    succ_idx: np.ndarray
    cop_depth: np.ndarray  # cops to move; -1 = robber escapes
    rob_depth: np.ndarray  # robber to move

    # -- indexing ----------------------------------------------------------
    def index(self, cops):
        cops = tuple(cops)
        if len(cops) != self.k or any(not 0 <= c < self.graph.n for c in cops):
            raise UnknownState(f"cop tuple {cops!r} not in a {self.k}-cop table")
        code = _encode(np.sort(np.asarray(cops, dtype=np.int64)), self.graph.n)
        return int(self.lookup[code])

    def _check_robber(self, r):
        if not 0 <= r < self.graph.n:
            raise UnknownState(f"robber vertex {r!r} not in table")

    def cops_win_from(self, cops, robber, turn=COPS) -> bool:
        self._check_robber(robber)
        m = self.index(cops)
        depth = self.cop_depth if turn == COPS else self.rob_depth
        return bool(depth[m, robber] >= 0)

    @property
    def cops_win(self) -> bool:
        return bool(np.any(np.all(self.cop_depth >= 0, axis=1)))

    def winning_placement(self):
        """Cop multiset from which every robber placement loses, if any."""
        rows = np.nonzero(np.all(self.cop_depth >= 0, axis=1))[0]
        return tuple(int(c) for c in self.multisets[rows[0]]) if len(rows) else None

    def robber_start(self, cops):
        """Least robber vertex that escapes forever against ``cops``."""
        m = self.index(cops)
        free = np.nonzero(self.cop_depth[m] < 0)[0]
        if len(free) == 0:
            raise UnknownState(f"no escaping robber placement against {tuple(cops)!r}")
        return int(free[0])

    # -- moves ---------------------------------------------------------------
    def _near(self, cops, r):
        return min(int(self.graph.dist[c, r]) for c in cops)

    def robber_move(self, cops, robber) -> int:
        self._check_robber(robber)
        m = self.index(cops)
        if robber in cops:
            return robber
        best, best_key = None, None
        escaping = self.rob_depth[m, robber] < 0
        for r2 in self.graph.closed[robber]:
            d = int(self.cop_depth[m, r2])
            if escaping:
                if d >= 0:
                    continue
                key = (self._near(cops, r2), -r2)
            else:
                key = (d, self._near(cops, r2), -r2)
            if best_key is None or key > best_key:
                best, best_key = r2, key
        return best

    def cop_move(self, cops, robber) -> tuple:
        """Next positions, aligned with the order of ``cops``."""
        self._check_robber(robber)
        cops = tuple(int(c) for c in cops)
        m = self.index(cops)
        if robber in cops:
            return cops
        D = self.graph.dist
        best, best_key = None, None
        for m2 in self.succ_idx[self.succ_ptr[m]: self.succ_ptr[m + 1]]:
            d = int(self.rob_depth[m2, robber])
            spread = int(sum(D[c, robber] for c in self.multisets[m2]))
            key = (d < 0, d, spread, int(m2))
            if best_key is None or key < best_key:
                best, best_key = m2, key
        return self._align(cops, tuple(int(c) for c in self.multisets[best]))

    def _align(self, cops, target):
        closed = self.graph.closed
        for perm in itertools.permutations(target):
            if all(perm[i] in closed[cops[i]] for i in range(len(cops))):
                return tuple(perm)
        raise UnknownState(f"{target!r} is not one cop move from {cops!r}")

    # -- export --------------------------------------------------------------
    def to_json(self) -> dict:
        states = {}
        for m, ms in enumerate(self.multisets):
            tag = ",".join(str(c) for c in ms)
            for r in range(self.graph.n):
                for turn, depth in ((COPS, self.cop_depth), (ROBBER, self.rob_depth)):
                    d = int(depth[m, r])
                    cops = tuple(int(c) for c in ms)
                    move = self.cop_move(cops, r) if turn == COPS else self.robber_move(cops, r)
                    states[f"{tag}|{r}|{'cops' if turn == COPS else 'robber'}"] = {
                        "winner": "cops" if d >= 0 else "robber",
                        "depth": d,
                        "move": list(move) if turn == COPS else move,
                    }
        return {
            "k": self.k,
            "n": self.graph.n,
            "labels": self.graph.labels,
            "edges": [list(e) for e in self.graph.edges],
            "cops_win": self.cops_win,
            "states": states,
        }

    def save(self, path):
        np.savez_compressed(
            path,
            k=self.k,
            n=self.graph.n,
            edges=np.asarray(self.graph.edges, dtype=np.int64).reshape(-1, 2),
            cop_depth=self.cop_depth,
            rob_depth=self.rob_depth,
            labels=np.asarray(json.dumps(self.graph.labels)),
        )

    @classmethod
    def load(cls, path) -> "StrategyTable":
        with np.load(path) as z:
            G = DiscreteGraph(int(z["n"]), [tuple(e) for e in z["edges"]],
                              labels=json.loads(str(z["labels"])))
            k = int(z["k"])
            ms, lookup, ptr, idx = _index_states(G, k)
            return cls(G, k, ms, lookup, ptr, idx, z["cop_depth"], z["rob_depth"])


def _index_states(G, k):
    ms = _multisets(G.n, k)
    lookup = np.full(G.n ** k, -1, dtype=np.int64)
    lookup[_encode(ms, G.n)] = np.arange(len(ms))
    ptr, idx = _successors(G, ms, lookup)
    return ms, lookup, ptr, idx


def solve(G: DiscreteGraph, k: int, budget: int = DEFAULT_BUDGET) -> StrategyTable:
    if k < 1:
        raise ValueError("k must be >= 1")
    states = state_count(G.n, k)
    if states > budget:
        raise BudgetExceeded(states, budget)
    ms, lookup, ptr, idx = _index_states(G, k)
    captured = np.zeros((len(ms), G.n), dtype=np.bool_)
    for j in range(k):
        captured[np.arange(len(ms)), ms[:, j]] = True
    rptr, ridx = G.csr_closed()
    cop_depth, rob_depth = kernels.retrograde(G.n, ptr, idx, rptr, ridx, captured)
    return StrategyTable(G, k, ms, lookup, ptr, idx, cop_depth, rob_depth)


def k_copwin(G: DiscreteGraph, k: int, budget: int = DEFAULT_BUDGET):
    table = solve(G, k, budget)
    return table.cops_win, table


def cop_number_discrete(G: DiscreteGraph, budget: int = DEFAULT_BUDGET) -> int:
    for k in range(1, max(G.n, 1) + 1):
        if solve(G, k, budget).cops_win:
            return k
    return max(G.n, 1)  # pragma: no cover - n cops always win


def is_dismantlable(G: DiscreteGraph) -> bool:
    """Strip dominated vertices (N[u] inside N[v], u != v) until one is left."""
    alive = set(range(G.n))
    closed = [set(c) for c in G.closed]
    changed = True
    while len(alive) > 1 and changed:
        changed = False
        for u in sorted(alive):
            Nu = closed[u] & alive
            if any(v != u and Nu <= (closed[v] & alive) for v in Nu):
                alive.remove(u)
                changed = True
                break
    return len(alive) <= 1


def robber_table_move(table: StrategyTable, state) -> int:
    cops, robber, *_ = state
    return table.robber_move(cops, robber)


def cop_table_move(table: StrategyTable, state) -> tuple:
    cops, robber, *_ = state
    return table.cop_move(cops, robber)
