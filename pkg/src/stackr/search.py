"""Uninformed and heuristic search over arrangements.

A search state is the ``stacks`` tuple of an ``Arrangement``.  Python's
tuple order on states matches the byte order of ``core.canonical_key``, so
ties broken on the raw state are the same ties the canonical key gives.
Every action a(i, j) is undone by a(j, i), so backward search reuses the
forward successor function unchanged.
"""

from __future__ import annotations

import enum
import heapq
import time
from collections import deque
from dataclasses import dataclass, field

from .core import Action, Arrangement, Instance, Kind, Solution, SolverStats, StackError
from .heuristics import Evaluator, HeuristicKind

_INF = float("inf")


class Algorithm(str, enum.Enum):
    BFS = "bfs"
    BIBFS = "bibfs"
    ASTAR = "astar"
    BHPA = "bhpa"

    @classmethod
    def parse(cls, name) -> "Algorithm":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            names = ", ".join(a.value for a in cls)
            raise StackError(f"unknown algorithm {name!r}; choose from {names}") from None


@dataclass
class SearchConfig:
    algorithm: Algorithm = Algorithm.ASTAR
    heuristic: HeuristicKind = HeuristicKind.CBH
    weight: float = 1.0
    timeout: float | None = 5.0
    check_interval: int = 1024

    def __post_init__(self):
        self.algorithm = Algorithm.parse(self.algorithm)
        self.heuristic = HeuristicKind.parse(self.heuristic)
        if not self.weight >= 1:
            raise StackError(f"weight must be >= 1, got {self.weight}")
        if self.check_interval < 1:
            raise StackError("check_interval must be positive")


@dataclass
class SearchStats(SolverStats):
    f_start: float = _INF
    f_goal: float = _INF
    mu: float = _INF


class SearchTimeout(Exception):
    def __init__(self, stats: SearchStats):
        super().__init__(f"search timed out after {stats.expansions} expansions")
        self.stats = stats


class Unsolvable(Exception):
    def __init__(self, stats: SearchStats):
        super().__init__("goal not reachable from the start arrangement")
        self.stats = stats


def successors(state: tuple, depth: int):
    """(i, j, next_state) for every permissible a(i, j), 0-based, (i, j) ascending."""
    open_to = [j for j, s in enumerate(state) if len(s) < depth]
    for i, src in enumerate(state):
        if not src:
            continue
        o, rest = src[0], src[1:]
        for j in open_to:
            if j == i:
                continue
            nxt = list(state)
            nxt[i] = rest
            nxt[j] = (o,) + state[j]
            yield i, j, tuple(nxt)


def expand(pi: Arrangement) -> list:
    g = pi.geometry
    return [(Action(i + 1, j + 1), Arrangement(g, nxt))
            for i, j, nxt in successors(pi.stacks, g.depth)]


def _goal_test(inst: Instance):
    if inst.kind is Kind.LABELED:
        target = inst.goal.stacks
        return lambda state: state == target
    sets = [frozenset(s) for s in inst.goal.stacks]
    return lambda state: all(len(s) == len(t) and t.issuperset(s) for s, t in zip(state, sets))


class _Clock:
    def __init__(self, cfg: SearchConfig, stats: SearchStats):
        self.limit = cfg.timeout
        self.every = cfg.check_interval
        self.stats = stats
        self.t0 = time.perf_counter()

    def tick(self):
        st = self.stats
        st.expansions += 1
        if self.limit is not None and st.expansions % self.every == 0:
            st.elapsed = time.perf_counter() - self.t0
            if st.elapsed > self.limit:
                raise SearchTimeout(st)

    def stop(self):
        self.stats.elapsed = time.perf_counter() - self.t0


def _walk(parent: dict, state: tuple) -> list:
    """Moves from the root of ``parent`` to ``state``."""
    out = []
    while parent[state] is not None:
        prev, move = parent[state]
        out.append(move)
        state = prev
    out.reverse()
    return out


def _join(fwd: dict, bwd: dict, meet: tuple) -> list:
    # the backward tree stores moves away from the goal; undo them in reverse
    tail = [(j, i) for i, j in reversed(_walk(bwd, meet))]
    return _walk(fwd, meet) + tail


def _bfs(inst, cfg, stats, clock):
    depth = inst.geometry.depth
    is_goal = _goal_test(inst)
    root = inst.start.stacks
    parent = {root: None}
    if is_goal(root):
        return []
    frontier = deque([root])
    while frontier:
        stats.peak_open = max(stats.peak_open, len(frontier))
        state = frontier.popleft()
        clock.tick()
        for i, j, nxt in successors(state, depth):
            stats.generations += 1
            if nxt in parent:
                continue
            parent[nxt] = (state, (i, j))
            if is_goal(nxt):
                stats.peak_closed = len(parent)
                return _walk(parent, nxt)
            frontier.append(nxt)
        stats.peak_closed = len(parent)
    raise Unsolvable(stats)


def _bibfs(inst, cfg, stats, clock):
    depth = inst.geometry.depth
    a, z = inst.start.stacks, inst.goal.stacks
    if a == z:
        return []
    trees = ({a: None}, {z: None})
    layers = ([a], [z])
    while layers[0] and layers[1]:
        side = 0 if len(layers[0]) <= len(layers[1]) else 1
        mine, other = trees[side], trees[1 - side]
        nxt_layer, meet = [], None
        # finish the whole layer so the best meeting point in it is kept
        for state in layers[side]:
            clock.tick()
            for i, j, nxt in successors(state, depth):
                stats.generations += 1
                if nxt in mine:
                    continue
                mine[nxt] = (state, (i, j))
                if nxt in other:
                    cost = len(_walk(mine, nxt)) + len(_walk(other, nxt))
                    if meet is None or cost < meet[0] or (cost == meet[0] and nxt < meet[1]):
                        meet = (cost, nxt)
                nxt_layer.append(nxt)
        layers = (nxt_layer, layers[1]) if side == 0 else (layers[0], nxt_layer)
        stats.peak_open = max(stats.peak_open, len(layers[0]) + len(layers[1]))
        stats.peak_closed = len(trees[0]) + len(trees[1])
        if meet is not None:
            stats.mu = meet[0]
            return _join(trees[0], trees[1], meet[1])
    raise Unsolvable(stats)


class _Frontier:
    """One A* direction: lazy-deletion heap keyed (f, -g, state), with reopening."""

    def __init__(self, root: tuple, h, weight: float):
        self.h = h
        self.weight = weight
        self.g = {root: 0}
        self.parent = {root: None}
        self.heap = [(weight * h(root), 0, root)]

    def clean(self):
        heap, g = self.heap, self.g
        while heap and -heap[0][1] != g[heap[0][2]]:
            heapq.heappop(heap)

    def fmin(self) -> float:
        self.clean()
        return self.heap[0][0] if self.heap else _INF

    def pop(self):
        self.clean()
        _, ng, state = heapq.heappop(self.heap)
        return state, -ng

    def relax(self, state, gval, nxt, move) -> bool:
        old = self.g.get(nxt)
        if old is not None and old <= gval:
            return False
        self.g[nxt] = gval
        self.parent[nxt] = (state, move)
        heapq.heappush(self.heap, (gval + self.weight * self.h(nxt), -gval, nxt))
        return True


def _astar(inst, cfg, stats, clock):
    depth = inst.geometry.depth
    is_goal = _goal_test(inst)
    h = Evaluator(inst, cfg.heuristic)
    side = _Frontier(inst.start.stacks, h, cfg.weight)
    while side.heap:
        stats.peak_open = max(stats.peak_open, len(side.heap))
        side.clean()
        if not side.heap:
            break
        state, g = side.pop()
        if is_goal(state):
            stats.peak_closed = len(side.g)
            stats.mu = g
            return _walk(side.parent, state)
        clock.tick()
        for i, j, nxt in successors(state, depth):
            stats.generations += 1
            side.relax(state, g + 1, nxt, (i, j))
        stats.peak_closed = len(side.g)
    raise Unsolvable(stats)


def _bhpa(inst, cfg, stats, clock):
    depth = inst.geometry.depth
    a, z = inst.start.stacks, inst.goal.stacks
    if a == z:
        return []
    sides = (_Frontier(a, Evaluator(inst, cfg.heuristic), cfg.weight),
             _Frontier(z, Evaluator(inst, cfg.heuristic, towards=inst.start), cfg.weight))
    mu, meet = _INF, None
    while True:
        stats.f_start, stats.f_goal = sides[0].fmin(), sides[1].fmin()
        stats.mu = mu
        if mu <= max(stats.f_start, stats.f_goal):
            break
        if not sides[0].heap or not sides[1].heap:
            break
        k = 0 if len(sides[0].heap) <= len(sides[1].heap) else 1
        mine, other = sides[k], sides[1 - k]
        state, g = mine.pop()
        clock.tick()
        for i, j, nxt in successors(state, depth):
            stats.generations += 1
            if mine.relax(state, g + 1, nxt, (i, j)) and nxt in other.g:
                cost = g + 1 + other.g[nxt]
                if cost < mu or (cost == mu and nxt < meet):
                    mu, meet = cost, nxt
        stats.peak_open = max(stats.peak_open, len(sides[0].heap) + len(sides[1].heap))
        stats.peak_closed = len(sides[0].g) + len(sides[1].g)
    if meet is None:
        raise Unsolvable(stats)
    return _join(sides[0].parent, sides[1].parent, meet)


_RUNNERS = {
    Algorithm.BFS: _bfs,
    Algorithm.BIBFS: _bibfs,
    Algorithm.ASTAR: _astar,
    Algorithm.BHPA: _bhpa,
}


def solve(inst: Instance, cfg: SearchConfig | None = None) -> Solution:
    """Search for a solution; raises SearchTimeout or Unsolvable.

    BFS, Bi-BFS, and A*/BHPA with an admissible heuristic and weight 1 are
    optimal.  The weight only affects A* and BHPA.
    """
    cfg = cfg or SearchConfig()
    if inst.kind is Kind.COLUMN and cfg.algorithm in (Algorithm.BIBFS, Algorithm.BHPA):
        raise StackError(f"{cfg.algorithm.value} needs a single goal state; "
                         "column instances support bfs and astar")
    stats = SearchStats()
    clock = _Clock(cfg, stats)
    try:
        moves = _RUNNERS[cfg.algorithm](inst, cfg, stats, clock)
    finally:
        clock.stop()
    return Solution([Action(i + 1, j + 1) for i, j in moves], stats)
