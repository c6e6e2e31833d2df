"""Mutable move recorder shared by the constructive solvers.

Stacks are 0-based lists stored bottom-first, so the accessible object is
``stacks[k][-1]``.  The buffer is the last stack.  Every move is checked and
appended to ``actions``; solvers only ever touch the board through ``move``.
"""

from __future__ import annotations

from .core import Action, Arrangement, StackError

_INF = float("inf")


class Board:
    def __init__(self, pi: Arrangement, rank: dict | None = None):
        g = pi.geometry
        self.depth = g.depth
        self.num_stacks = g.num_stacks
        self.buffer = g.num_stacks - 1
        self.stacks = [list(reversed(s)) for s in pi.stacks]
        self.where = {o: k for k, s in enumerate(self.stacks) for o in s}
        self.actions: list[tuple[int, int]] = []
        # running minimum of `rank` along each stack, bottom to top
        self.rank = rank
        self.minrank = None
        if rank is not None:
            self.minrank = []
            for s in self.stacks:
                col, cur = [], _INF
                for o in s:
                    cur = min(cur, rank.get(o, _INF))
                    col.append(cur)
                self.minrank.append(col)

    def move(self, i: int, j: int) -> None:
        src, dst = self.stacks[i], self.stacks[j]
        if i == j or not src or len(dst) >= self.depth:
            raise StackError(f"internal solver error: illegal move {i + 1}->{j + 1}")
        o = src.pop()
        dst.append(o)
        self.where[o] = j
        self.actions.append((i, j))
        if self.minrank is not None:
            self.minrank[i].pop()
            col = self.minrank[j]
            r = self.rank.get(o, _INF)
            col.append(min(col[-1], r) if col else r)

    def moves(self, i: int, j: int, count: int) -> None:
        for _ in range(count):
            self.move(i, j)

    def room(self, k: int) -> int:
        return self.depth - len(self.stacks[k])

    def height(self, k: int) -> int:
        return len(self.stacks[k])

    def depth_of(self, o: int) -> int:
        """Top-first depth (1 = accessible) of object ``o``."""
        s = self.stacks[self.where[o]]
        return len(s) - s.index(o)

    def top_first(self, k: int) -> list:
        return self.stacks[k][::-1]

    def mark(self) -> int:
        return len(self.actions)

    def since(self, mark: int) -> list:
        return self.actions[mark:]

    def undo_sequence(self, seq) -> None:
        """Replay the inverse of ``seq``: reversed order, each move flipped."""
        for i, j in reversed(seq):
            self.move(j, i)

    def solution_actions(self) -> list:
        return [Action(i + 1, j + 1) for i, j in self.actions]

    def nearest(self, candidates, origin: int) -> list:
        return sorted(candidates, key=lambda k: (abs(k - origin), k))
