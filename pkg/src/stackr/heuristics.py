"""Lower-bound style estimates of the remaining number of actions.

Every heuristic here is a sum or a max of per-stack terms, and a stack's
term depends only on its index and contents.  ``Evaluator`` exploits that by
caching terms per (stack, contents), which is what the search uses; the
module-level functions evaluate a single arrangement from scratch.
"""

from __future__ import annotations

import enum
from functools import lru_cache

from .core import Arrangement, Instance, Kind, StackError


class HeuristicKind(str, enum.Enum):
    DBH1 = "dbh1"
    DBHN = "dbhn"
    CBH = "cbh"
    CBH_DBH1 = "cbh+dbh1"
    ZERO = "zero"

    @property
    def admissible(self) -> bool:
        return self is not HeuristicKind.DBHN

    @classmethod
    def parse(cls, name) -> "HeuristicKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise StackError(f"unknown heuristic {name!r}; choose from {names}") from None


def _goal_slots(goal: Arrangement) -> dict:
    """object -> (stack, slot, objects in front), 0-based stack.

    Slots are numbered 1..d from the opening of the fixed-capacity stack, so
    an object keeps its slot until it is popped.
    """
    d = goal.geometry.depth
    return {o: (k, d - len(s) + y, y - 1)
            for k, s in enumerate(goal.stacks) for y, o in enumerate(s, start=1)}


def _free(pi: Arrangement) -> int:
    return pi.geometry.slots - pi.n


def _dbh_terms(k: int, stack: tuple, slots: dict, free: int, d: int) -> list:
    out = []
    base = d - len(stack)
    for y, o in enumerate(stack, start=1):
        gk, gslot, ng = slots[o]
        slot, nc = base + y, y - 1
        if (gk, gslot) == (k, slot):
            out.append(0)
        elif gk == k:
            out.append(2 * nc - ng + 2 if nc > ng else ng + 2)
        elif slot + gslot - 1 <= free:
            out.append(nc + ng + 1)
        else:
            out.append(nc + ng + 2)
    return out


def _cbh_term(k: int, stack: tuple, slots: dict, free: int, d: int, column: bool) -> int:
    h = 0
    settled = True
    base = d - len(stack)
    # bottom-up: `settled` says this object and everything below it are home
    for y in range(len(stack), 0, -1):
        o = stack[y - 1]
        gk, gslot, _ = slots[o]
        slot = base + y
        if gk == k:
            settled = settled and (column or gslot == slot)
            if not settled:
                h += 2
        else:
            # column goals fix no slot: assume the shallowest one
            need = slot + (1 if column else gslot) - 1
            h += 2 if free < need else 1
            settled = False
    return h


def _check_kind(inst_kind: Kind, kind: HeuristicKind):
    if inst_kind is Kind.COLUMN and kind in (HeuristicKind.DBH1, HeuristicKind.DBHN,
                                              HeuristicKind.CBH_DBH1):
        raise StackError(f"{kind.value} needs goal depths; column instances support cbh and zero")


def dbh(o: int, current: Arrangement, goal: Arrangement) -> int:
    """Estimated actions to bring the single object ``o`` to its goal slot."""
    slots = _goal_slots(goal)
    for k, s in enumerate(current.stacks):
        if o in s:
            y = s.index(o)
            return _dbh_terms(k, s, slots, _free(current), current.geometry.depth)[y]
    raise StackError(f"object {o} not in the current arrangement")


def dbh1(current: Arrangement, goal: Arrangement) -> int:
    slots, free, d = _goal_slots(goal), _free(current), current.geometry.depth
    return max((t for k, s in enumerate(current.stacks) for t in _dbh_terms(k, s, slots, free, d)),
               default=0)


def dbhn(current: Arrangement, goal: Arrangement) -> int:
    slots, free = _goal_slots(goal), _free(current)
    d = current.geometry.depth
    return sum(t for k, s in enumerate(current.stacks) for t in _dbh_terms(k, s, slots, free, d))


def cbh(current: Arrangement, goal: Arrangement, kind: Kind = Kind.LABELED) -> int:
    slots, free = _goal_slots(goal), _free(current)
    column = Kind(kind) is Kind.COLUMN
    d = current.geometry.depth
    return sum(_cbh_term(k, s, slots, free, d, column) for k, s in enumerate(current.stacks))


def combined_max(current: Arrangement, goal: Arrangement) -> int:
    return max(cbh(current, goal), dbh1(current, goal))


class Evaluator:
    """h(state) for one instance and heuristic, with per-stack caching.

    States are tuples of top-first stack tuples, as in ``Arrangement.stacks``.
    ``towards`` selects the target arrangement, so a backward search can
    estimate distance to the start with the same code.
    """

    def __init__(self, inst: Instance, kind: HeuristicKind | str, towards: Arrangement | None = None,
                 cache_size: int = 1 << 18):
        self.kind = HeuristicKind.parse(kind) if not isinstance(kind, HeuristicKind) else kind
        _check_kind(inst.kind, self.kind)
        target = inst.goal if towards is None else towards
        slots = _goal_slots(target)
        free = _free(inst.start)
        column = inst.kind is Kind.COLUMN
        d = inst.geometry.depth

        @lru_cache(maxsize=cache_size)
        def dbh_stack(k, s):
            terms = _dbh_terms(k, s, slots, free, d)
            return max(terms, default=0), sum(terms)

        @lru_cache(maxsize=cache_size)
        def cbh_stack(k, s):
            return _cbh_term(k, s, slots, free, d, column)

        self._dbh = dbh_stack
        self._cbh = cbh_stack

    def __call__(self, state: tuple) -> int:
        kind = self.kind
        if kind is HeuristicKind.ZERO:
            return 0
        if kind is HeuristicKind.CBH:
            return sum(self._cbh(k, s) for k, s in enumerate(state))
        if kind is HeuristicKind.DBH1:
            return max(self._dbh(k, s)[0] for k, s in enumerate(state))
        if kind is HeuristicKind.DBHN:
            return sum(self._dbh(k, s)[1] for k, s in enumerate(state))
        c = sum(self._cbh(k, s) for k, s in enumerate(state))
        return max(c, max(self._dbh(k, s)[0] for k, s in enumerate(state)))


def evaluate(kind: HeuristicKind | str, current: Arrangement, goal: Arrangement,
             inst_kind: Kind = Kind.LABELED) -> int:
    kind = HeuristicKind.parse(kind) if not isinstance(kind, HeuristicKind) else kind
    _check_kind(Kind(inst_kind), kind)
    if kind is HeuristicKind.ZERO:
        return 0
    if kind is HeuristicKind.CBH:
        return cbh(current, goal, inst_kind)
    if kind is HeuristicKind.DBH1:
        return dbh1(current, goal)
    if kind is HeuristicKind.DBHN:
        return dbhn(current, goal)
    return combined_max(current, goal)
