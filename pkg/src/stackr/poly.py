"""Constructive polynomial-time solvers with bounded action counts.

* :func:`poly_d_solve` builds the goal stack by stack, bottom slot first,
  spending O(d) actions per object, O(wd^2) in total.
* :func:`poly_clsr_solve` splits the stack window in halves and moves every
  object into the half holding its goal stack, O(wd) per level and
  O(wd log w) overall.
* :func:`sort_stack` orders one stack with a helper stack and the buffer by
  merging runs, O(d log d).
* :func:`poly_lsr_solve` chains the last two.

All solvers require the buffer (last stack) to be empty at start and goal.
"""

from __future__ import annotations

from typing import Sequence

from .board import Board
from .core import (Action, Arrangement, Instance, Kind, Solution, SolverStats,
                   StackError)

_INF = float("inf")


class PreconditionError(StackError):
    """The instance lies outside what a constructive solver accepts."""


# -- primitives ---------------------------------------------------------------

def _bring_to_top(b: Board, s: int, y: int, t: int) -> None:
    """Lift the object at depth ``y`` of stack ``s`` to the top of ``s``.

    ``t`` lends one slot and is restored; the buffer must be empty and ends
    empty.  The blockers above the object come back in reversed order.
    """
    if y <= 1:
        return
    buf = b.buffer
    parked = b.room(t) == 0
    if parked:
        b.move(t, buf)
    b.moves(s, buf, y - 1)
    b.move(s, t)
    b.moves(buf, s, y - 1)
    b.move(t, s)
    if parked:
        b.move(buf, t)


def _swap_tops(b: Board, s: int, t: int) -> None:
    buf = b.buffer
    b.move(s, buf)
    b.move(t, s)
    b.move(buf, t)


def _partition_pass(b: Board, s: int, popped: int, key: dict, helper: int,
                    shifted: int = 0, keep: bool = False) -> int:
    """Pop the top ``popped`` objects of ``s`` and push them back regrouped.

    ``key[o] = (block, part)``: blocks are numbered top-down and must be
    contiguous in ``s``; part 0 ends above part 1 inside its block.  The two
    parts of a block travel through different temporaries (buffer and
    helper), so each temporary stays last-in-first-out per block.

    ``shifted`` helper objects already sit in the buffer; with ``keep`` they
    stay there (the new count is returned), otherwise they go back.
    """
    buf = b.buffer
    sizes: dict = {}
    for o in b.stacks[s][len(b.stacks[s]) - popped:]:
        sizes[key[o]] = sizes.get(key[o], 0) + 1
    blocks = sorted({blk for blk, _ in sizes})
    side = {}
    to_buffer = 0
    for blk in blocks:
        upper, lower = sizes.get((blk, 0), 0), sizes.get((blk, 1), 0)
        big, small = ((blk, 0), (blk, 1)) if upper >= lower else ((blk, 1), (blk, 0))
        side[big] = buf
        side[small] = helper
        to_buffer += max(upper, lower)
    # helper needs room for the small parts, buffer for the big ones
    extra = max((popped - to_buffer) - b.room(helper), -shifted)
    extra = min(extra, b.room(buf) - to_buffer)
    if extra > 0:
        b.moves(helper, buf, extra)
    elif extra < 0:
        b.moves(buf, helper, -extra)
    shifted += extra
    src = b.stacks[s]
    for _ in range(popped):
        b.move(s, side[key[src[-1]]])
    for blk in reversed(blocks):
        for part in (1, 0):
            count = sizes.get((blk, part), 0)
            if count:
                b.moves(side[(blk, part)], s, count)
    if keep:
        return shifted
    b.moves(buf, helper, shifted)
    return 0


def _choose_helper(b: Board, s: int, stacks) -> int:
    """Stack with the most free room (fewest shifted objects), nearest first."""
    cands = [k for k in stacks if k != s and k != b.buffer]
    return min(cands, key=lambda k: (-b.room(k), abs(k - s), k))


def _chain_segments(seq: Sequence[int]) -> list:
    """Label each rank with (segment, chain).

    Segments are maximal contiguous pieces that split into two increasing
    chains; within a segment each rank joins the chain whose last rank is the
    largest one below it, which finds a split whenever one exists.
    """
    labels = []
    seg, tops = 0, [-1, -1]
    for r in seq:
        fits = [i for i in (0, 1) if tops[i] < r]
        if not fits:
            seg, tops, fits = seg + 1, [-1, -1], [0]
        i = max(fits, key=lambda i: tops[i])
        tops[i] = r
        labels.append((seg, i))
    return labels


def _sort_on_board(b: Board, s: int, order: Sequence[int], helper: int) -> None:
    """Sort ``s`` into ``order`` (top-first) through the buffer and ``helper``.

    Each pass pops the unsorted top and sends the two chains of every
    segment to different temporaries, then merges each segment back as one
    increasing run, so the number of runs at least halves.  Helper objects
    shifted into the buffer to make room stay there between passes.
    """
    rank = {o: i for i, o in enumerate(order)}
    buf = b.buffer
    shifted = 0
    while True:
        cur = [rank[o] for o in b.top_first(s)]
        j = len(cur)
        while j and cur[j - 1] == j - 1:
            j -= 1
        if j == 0:
            b.moves(buf, helper, shifted)
            return
        seq = cur[:j]
        labels = _chain_segments(seq)
        sizes: dict = {}
        for lab in labels:
            sizes[lab] = sizes.get(lab, 0) + 1
        segs = sorted({seg for seg, _ in labels})
        side = {}
        to_buffer = 0
        for seg in segs:
            a, c = sizes.get((seg, 0), 0), sizes.get((seg, 1), 0)
            big = 0 if a >= c else 1
            side[(seg, big)] = buf
            side[(seg, 1 - big)] = helper
            to_buffer += max(a, c)
        extra = max((j - to_buffer) - b.room(helper), -shifted)
        extra = min(extra, b.room(buf) - to_buffer)
        if extra > 0:
            b.moves(helper, buf, extra)
        elif extra < 0:
            b.moves(buf, helper, -extra)
        shifted += extra
        for lab in labels:
            b.move(s, side[lab])
        # temporaries top-first as (rank, segment)
        temps = {t: [(r, lab[0]) for r, lab in zip(seq, labels) if side[lab] == t][::-1]
                 for t in (buf, helper)}
        pos = {buf: 0, helper: 0}
        for seg in reversed(segs):
            while True:
                heads = [(temps[t][pos[t]][0], t) for t in (buf, helper)
                         if pos[t] < len(temps[t]) and temps[t][pos[t]][1] == seg]
                if not heads:
                    break
                _, t = max(heads)
                pos[t] += 1
                b.move(t, s)


def sort_stack(pi: Arrangement, target_stack: int, helper_stack: int,
               buffer_stack: int, desired_order: Sequence[int]) -> list:
    """Actions reordering ``target_stack`` into ``desired_order`` (top-first).

    Helper and buffer end exactly as they started.  Stack indices are 1-based.
    """
    g = pi.geometry
    idx = (target_stack, helper_stack, buffer_stack)
    if len(set(idx)) != 3:
        raise PreconditionError("target, helper and buffer stacks must be distinct")
    for k in idx:
        if not 1 <= k <= g.num_stacks:
            raise PreconditionError(f"stack index {k} outside 1..{g.num_stacks}")
    if pi.stack(buffer_stack):
        raise PreconditionError(f"buffer stack {buffer_stack} is not empty")
    if sorted(pi.stack(target_stack)) != sorted(desired_order):
        raise PreconditionError("desired order does not match the target stack's objects")
    b = Board(pi)
    b.buffer = buffer_stack - 1
    _sort_on_board(b, target_stack - 1, desired_order, helper_stack - 1)
    return b.solution_actions()


# -- Poly-C-LSR ---------------------------------------------------------------

def _groups(l: int, r: int, ways: int) -> list:
    """Split the window [l, r] into up to ``ways`` contiguous balanced ranges."""
    size = r - l + 1
    ways = min(ways, size)
    bounds = [l - (-size * i // ways) for i in range(ways + 1)]
    return [(bounds[i], bounds[i + 1] - 1) for i in range(ways)]


class _Split:
    """One level of the column split: the window is cut into groups of stacks.

    An object is foreign on a stack outside the group holding its goal
    stack.  The main step pops a dirty stack to some depth, sending each
    object to a clean stack of its own group with room (a hole) when there
    is one and to the buffer otherwise; the buffer's top run bound for the
    popped stack's group then goes back onto it.
    """

    def __init__(self, b: Board, goal_of: dict, groups: list):
        self.b = b
        self.goal_of = goal_of
        self.window = range(groups[0][0], groups[-1][1] + 1)
        self.gid = {k: g for g, (lo, hi) in enumerate(groups) for k in range(lo, hi + 1)}
        self.members = [range(lo, hi + 1) for lo, hi in groups]
        self.fc = {k: sum(self.foreign(o, k) for o in b.stacks[k]) for k in self.window}

    def group(self, o: int) -> int:
        return self.gid[self.goal_of[o]]

    def foreign(self, o: int, k: int) -> bool:
        return self.group(o) != self.gid[k]

    def move(self, i: int, j: int) -> None:
        o = self.b.stacks[i][-1]
        self.b.move(i, j)
        if i in self.fc:
            self.fc[i] -= self.foreign(o, i)
        if j in self.fc:
            self.fc[j] += self.foreign(o, j)

    def holes(self, g: int, exclude: int = -1) -> list:
        return [t for t in self.members[g]
                if t != exclude and self.fc[t] == 0 and self.b.room(t) > 0]

    def drop(self, src: int, exclude: int = -1) -> bool:
        o = self.b.stacks[src][-1]
        dests = self.holes(self.group(o), exclude)
        if not dests:
            return False
        g = self.goal_of[o]
        self.move(src, min(dests, key=lambda t: (abs(t - g), t)))
        return True

    def flush(self) -> None:
        buf = self.b.stacks[self.b.buffer]
        while buf and self.drop(self.b.buffer):
            pass

    def best_pop(self, k: int):
        """Cheapest productive pop of k as ((tier, score), depth), or None.

        A partial pop must be refilled completely so no idle room is left on
        a dirty stack.  A full pop leaves k clean and its room becomes a
        hole, so it may rank (last) even when it resolves nothing, provided
        no proper object of k waits in the buffer.
        """
        b = self.b
        own = self.gid[k]
        room = {g: sum(b.room(t) for t in self.holes(g, k)) for g in range(len(self.members))}
        older = 0
        for o in reversed(b.stacks[b.buffer]):
            if self.group(o) != own:
                break
            older += 1
        space = b.room(b.buffer)
        stack = b.stacks[k]
        deepest = max(y for y, o in enumerate(reversed(stack), 1) if self.foreign(o, k))
        best = None
        f = over_p = over_f = 0
        run, clean_run = 0, True
        for y in range(1, deepest + 1):
            o = stack[-y]
            g = self.group(o)
            if g != own:
                f += 1
            if room[g]:
                room[g] -= 1
            elif g == own:
                over_p += 1
                run += 1
            else:
                over_f += 1
                run, clean_run = 0, False
            if over_p + over_f > space:
                break
            if g == own:
                continue
            back = min(y, run + (older if clean_run else 0))
            full = y == deepest
            if not full and back < y:
                continue
            gain = (f - over_f) - over_p + back
            cost = y + back
            if gain > 0:
                rank = (1 + full, gain / cost)
            elif full and not over_p:
                rank = (0, -cost)
            else:
                continue
            if best is None or rank > best[0]:
                best = (rank, y)
        return best

    def pop(self, k: int, depth: int) -> None:
        b = self.b
        buf = b.buffer
        for _ in range(depth):
            if not self.drop(k, k):
                self.move(k, buf)
        own = self.gid[k]
        stack = b.stacks[buf]
        while stack and b.room(k) and self.group(stack[-1]) == own:
            self.move(buf, k)
        self.flush()

    def foreign_on_top(self, k: int) -> None:
        """Reorder stack k into a foreign block above a proper block."""
        top = self.b.top_first(k)
        flags = [self.foreign(o, k) for o in top]
        run = 0
        while run < len(flags) and flags[run]:
            run += 1
        if not any(flags[run:]):
            return
        bottom = len(flags)
        while not flags[bottom - 1]:
            bottom -= 1
        key = {o: (0, 0 if f else 1) for o, f in zip(top, flags)}
        helper = _choose_helper(self.b, k, range(self.b.buffer))
        _partition_pass(self.b, k, bottom, key, helper)

    def unload_buffer(self) -> None:
        """Give buffered objects any room, own group first."""
        b = self.b
        while b.stacks[b.buffer]:
            g = self.group(b.stacks[b.buffer][-1])
            dests = [t for t in self.window if b.room(t) > 0]
            t = min(dests, key=lambda t: (self.gid[t] != g, self.fc[t] > 0, t))
            self.move(b.buffer, t)

    def potential(self) -> tuple:
        return sum(self.fc.values()), len(self.b.stacks[self.b.buffer])

    def run(self) -> bool:
        """True when the level completed, False when it stalled."""
        b = self.b
        last = None
        while True:
            self.flush()
            dirty = [k for k in self.window if self.fc[k]]
            if not dirty:
                if b.stacks[b.buffer]:
                    raise StackError("internal solver error: buffer left occupied")
                return True
            best = None
            for k in dirty:
                p = self.best_pop(k)
                if p and (best is None or p[0] > best[0][0]):
                    best = (p, k)
            if best:
                (_, depth), k = best
                self.pop(k, depth)
                continue
            self.unload_buffer()
            dirty = [k for k in self.window if self.fc[k]]
            now = self.potential()
            if now == last:
                if len(self.members) != 2:
                    return False
                self.exchange(dirty)
                continue
            last = now
            if self.open_hole(dirty):
                continue
            self.foreign_on_top(max(dirty, key=lambda k: (self.fc[k], -k)))

    def open_hole(self, dirty: list) -> bool:
        """Shift the top of a clean stack into the empty buffer so it can take
        a dirty stack's foreign objects, then pop that stack fully."""
        b = self.b
        best = None
        for k in dirty:
            top = b.top_first(k)
            deepest = max(y for y, o in enumerate(top, 1) if self.foreign(o, k))
            groups = {self.group(o) for o in top[:deepest] if self.foreign(o, k)}
            if len(groups) != 1:
                continue
            g = groups.pop()
            f = self.fc[k]
            if deepest > b.room(b.buffer):
                continue
            hosts = [t for t in self.members[g] if self.fc[t] == 0 and b.height(t) >= f - b.room(t)]
            if not hosts:
                continue
            rank = (f / (deepest + f), -k)
            if best is None or rank > best[0]:
                best = (rank, k, deepest, f, min(hosts, key=lambda t: (abs(t - k), t)))
        if best is None:
            return False
        _, k, deepest, f, h = best
        for _ in range(max(0, f - b.room(h))):
            self.move(h, b.buffer)
        self.pop(k, deepest)
        return True

    def exchange(self, dirty: list) -> None:
        """Swap foreign blocks of one dirty stack per half via the buffer.

        Always makes progress; with one half dirty, the other half's holes
        take the prepared block instead.
        """
        b = self.b
        sides = [[k for k in dirty if self.gid[k] == g] for g in (0, 1)]
        if not all(sides):
            k = max(dirty, key=lambda k: (self.fc[k], -k))
            self.foreign_on_top(k)
            while self.fc[k]:
                if not self.drop(k, k):
                    raise StackError("internal solver error: no hole for a foreign block")
            return
        i, j = (max(side, key=lambda k: (self.fc[k], -k)) for side in sides)
        self.foreign_on_top(i)
        self.foreign_on_top(j)
        count = min(self.fc[i], self.fc[j])
        for _ in range(count):
            self.move(i, b.buffer)
        for _ in range(count):
            self.move(j, i)
        for _ in range(count):
            self.move(b.buffer, j)


WAYS = 2


def _clsr_on_board(b: Board, goal_of: dict, l: int, r: int) -> None:
    if l >= r:
        return
    groups = _groups(l, r, WAYS)
    if not _Split(b, goal_of, groups).run():
        groups = _groups(l, r, 2)
        if not _Split(b, goal_of, groups).run():
            raise StackError("internal solver error: column split stalled")
    for lo, hi in groups:
        _clsr_on_board(b, goal_of, lo, hi)


def _check_buffer(inst: Instance, goal_too: bool) -> None:
    last = inst.geometry.num_stacks
    if inst.start.stack(last):
        raise PreconditionError(f"buffer stack {last} must be empty at the start")
    if goal_too and inst.goal.stack(last):
        raise PreconditionError(f"buffer stack {last} must be empty in the goal")


def _goal_columns(inst: Instance) -> dict:
    return {o: k for k, s in enumerate(inst.goal.stacks) for o in s}


def poly_clsr_solve(inst: Instance) -> Solution:
    """Move every object into its goal stack, ignoring depth."""
    _check_buffer(inst, goal_too=True)
    b = Board(inst.start)
    _clsr_on_board(b, _goal_columns(inst), 0, inst.geometry.w - 1)
    return Solution(b.solution_actions(), SolverStats())


def poly_lsr_solve(inst: Instance) -> Solution:
    if inst.kind is not Kind.LABELED:
        raise PreconditionError("Poly-LSR needs a labeled instance")
    _check_buffer(inst, goal_too=True)
    w = inst.geometry.w
    b = Board(inst.start)
    _clsr_on_board(b, _goal_columns(inst), 0, w - 1)
    for c in range(w):
        order = list(inst.goal.stacks[c])
        if b.top_first(c) != order:
            _sort_on_board(b, c, order, _choose_helper(b, c, range(w)))
    return Solution(b.solution_actions(), SolverStats())


# -- Poly-D -------------------------------------------------------------------

class _PolyD:
    def __init__(self, inst: Instance):
        g = inst.geometry
        self.w, self.d = g.w, g.depth
        self.targets = [list(reversed(s)) for s in inst.goal.stacks[:self.w]]
        rank = {o: c * self.d + p for c, t in enumerate(self.targets) for p, o in enumerate(t)}
        self.b = Board(inst.start, rank)

    def _urgency(self, k: int) -> float:
        col = self.b.minrank[k]
        return col[-1] if col else _INF

    def _spread(self, src: int, count: int, cands, keep: int | None = None) -> None:
        """Move ``count`` tops of ``src`` onto ``cands``, least urgent stacks first.

        ``keep`` names a candidate that must retain one free slot.
        """
        b = self.b
        order = sorted(cands, key=lambda k: (-self._urgency(k), k))
        for k in order:
            floor = 1 if k == keep else 0
            while count and b.room(k) > floor:
                b.move(src, k)
                count -= 1
            if not count:
                return
        if count:
            raise StackError("internal solver error: no room to spread objects")

    def run(self) -> list:
        b = self.b
        for c in range(self.w):
            target = self.targets[c]
            done = 0
            col = b.stacks[c]
            while done < len(target) and done < len(col) and col[done] == target[done]:
                done += 1
            if c == self.w - 1 and done < len(target):
                self._sort_last(c)
                break
            while done < len(target):
                if not self._place_direct(c, done, target[done]):
                    self._place_by_swaps(c, done, target[done])
                done += 1
            junk = b.height(c) - done
            if junk:
                self._spread(c, junk, self._storage(c))
        return b.solution_actions()

    def _sort_last(self, c: int) -> None:
        """Everything left lives on c and the buffer: gather and sort."""
        b = self.b
        b.moves(b.buffer, c, b.height(b.buffer))
        helper = _choose_helper(b, c, range(self.w))
        _sort_on_board(b, c, self.targets[c][::-1], helper)

    def _storage(self, c: int) -> list:
        return list(range(c + 1, self.w)) + [self.b.buffer]

    def _place_direct(self, c: int, done: int, g: int) -> bool:
        """Dig ``g`` out and drop it on the finished part of stack ``c``."""
        b = self.b
        store = self._storage(c)
        x = b.where[g]
        junk = b.height(c) - done
        y = b.depth_of(g)
        if x != c:
            others = [t for t in store if t != x]
            free = sum(b.room(t) for t in others)
            if free >= junk + y - 1:
                self._spread(x, y - 1, others)
                self._spread(c, junk, others)
                b.move(x, c)
                return True
            # short of room: hold the deepest blockers on c itself and
            # keep one slot elsewhere to park g while they go back to x
            if free < junk + 1:
                return self._park_first(c, done, g, others)
            held = y - 1 - (free - junk - 1)
            if self.d - done < held:
                return False
            park = max((t for t in others if b.room(t) > 0), key=lambda t: (b.room(t), -t))
            self._spread(c, junk, others, keep=park)
            self._spread(x, y - 1 - held, others, keep=park)
            b.moves(x, c, held)
            b.move(x, park)
            b.moves(c, x, held)
            b.move(park, c)
            return True
        # g sits in the junk of c: park it on its own stack meanwhile
        open_ = [t for t in store if b.room(t) > 0]
        if not open_:
            return False
        park = min(open_, key=lambda t: (b.room(t), t))
        others = [t for t in store if t != park]
        if sum(b.room(t) for t in others) < junk - 1:
            return False
        self._spread(c, y - 1, others)
        b.move(c, park)
        self._spread(c, junk - y, others)
        b.move(park, c)
        return True

    def _park_first(self, c: int, done: int, g: int, others: list) -> bool:
        """Blockers out (onto c if need be), g parked, then c cleared.

        Junk may fill the park stack under g; the rest lands on x once g
        is gone.  With no free slot anywhere one top is borrowed onto c.
        """
        b = self.b
        x = b.where[g]
        y = b.depth_of(g)
        free = sum(b.room(t) for t in others)
        borrow = None
        if free == 0:
            full = [t for t in others if b.stacks[t]]
            if not full:
                return False
            borrow = max(full, key=lambda t: (self._urgency(t), -t))
            free = 1
        to_others = min(y - 1, free - 1)
        held = y - 1 - to_others
        if held + (borrow is not None) > b.room(c):
            return False
        pile = b.height(c) - done + held + (borrow is not None)
        spill = min(pile, free - 1 - to_others)
        if pile - spill > b.room(x) + y:
            return False
        if borrow is not None:
            b.move(borrow, c)
            park = borrow
        else:
            park = max((t for t in others if b.room(t) > 0), key=lambda t: (b.room(t), -t))
        self._spread(x, to_others, others, keep=park)
        b.moves(x, c, held)
        self._spread(c, spill, others, keep=park)
        b.move(x, park)
        b.moves(c, x, pile - spill)
        b.move(park, c)
        return True

    def _place_by_swaps(self, c: int, done: int, g: int) -> None:
        """O(d) exchange of ``g`` into slot ``done`` with a full-height stack c."""
        b = self.b
        buf = b.buffer
        k = len(self.targets[c])
        upper = list(range(c + 1, self.w))
        while b.stacks[buf]:
            roomy = [t for t in upper if b.room(t) > 0]
            if roomy:
                self._spread(buf, 1, roomy)
            else:
                b.move(buf, c)
        if b.height(c) > k:
            self._spread(c, b.height(c) - k, upper)
        while b.height(c) < k:
            src = max((t for t in upper if b.stacks[t]),
                      key=lambda t: (b.rank.get(b.stacks[t][-1], _INF), -t))
            b.move(src, c)
        p = k - done
        if b.stacks[c][done] == g:
            return
        x = b.where[g]
        y = b.depth_of(g)
        if x != c:
            _bring_to_top(b, x, y, c)
            mark = b.mark()
            _bring_to_top(b, c, p, x)
            seq = b.since(mark)
            _swap_tops(b, c, x)
            b.undo_sequence(seq)
            return
        helpers = [t for t in range(self.w) if t != c]
        filled = [t for t in helpers if b.stacks[t]]
        t = min(filled or helpers, key=lambda s: (abs(s - c), s))
        _bring_to_top(b, c, y, t)
        if b.stacks[t]:
            _swap_tops(b, c, t)
            mark = b.mark()
            _bring_to_top(b, c, p, t)
            seq = b.since(mark)
            _swap_tops(b, c, t)
            b.undo_sequence(seq)
            _swap_tops(b, c, t)
        else:
            b.move(c, t)
            mark = b.mark()
            _bring_to_top(b, c, p - 1, t)
            seq = b.since(mark)
            _swap_tops(b, c, t)
            b.undo_sequence(seq)
            b.move(t, c)


def poly_d_solve(inst: Instance) -> Solution:
    if inst.kind is not Kind.LABELED:
        raise PreconditionError("Poly-D needs a labeled instance")
    _check_buffer(inst, goal_too=True)
    return Solution(_PolyD(inst).run(), SolverStats())


SOLVERS = {
    "poly-d": poly_d_solve,
    "poly-lsr": poly_lsr_solve,
    "poly-clsr": poly_clsr_solve,
}
