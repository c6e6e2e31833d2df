"""Domain model: stacks, arrangements, pop-and-push actions and instances.

Stacks are indexed from 1 in every public interface.  Internally an
arrangement is a tuple of stacks, each stack a tuple of object ids ordered
top-first (depth 1 at position 0).  The last stack is the buffer.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

FORMAT_VERSION = 1


class StackError(ValueError):
    """Raised when an arrangement, action or instance violates the model."""


class Kind(str, enum.Enum):
    LABELED = "labeled"
    COLUMN = "column"


@dataclass(frozen=True)
class Geometry:
    """Board shape: ``num_stacks`` stacks (buffer included) of capacity ``depth``."""

    num_stacks: int
    depth: int

    def __post_init__(self):
        if self.num_stacks < 3:
            raise StackError(f"num_stacks must be >= 3, got {self.num_stacks}")
        if self.depth < 1:
            raise StackError(f"depth must be >= 1, got {self.depth}")

    @property
    def w(self) -> int:
        """Number of non-buffer stacks."""
        return self.num_stacks - 1

    @property
    def slots(self) -> int:
        return self.num_stacks * self.depth


@dataclass(frozen=True)
class Action:
    """Pop the top of ``from_stack`` and push it onto ``to_stack`` (1-based)."""

    from_stack: int
    to_stack: int

    def __post_init__(self):
        if self.from_stack == self.to_stack:
            raise StackError(f"action {self} moves a stack onto itself")

    def reversed(self) -> "Action":
        return Action(self.to_stack, self.from_stack)

    def as_pair(self) -> list[int]:
        return [self.from_stack, self.to_stack]

    def __str__(self):
        return f"a({self.from_stack},{self.to_stack})"


@dataclass(frozen=True)
class Arrangement:
    """Immutable board state.

    ``stacks[k]`` lists the occupants of stack ``k + 1`` top-first.
    """

    geometry: Geometry
    stacks: tuple

    def __post_init__(self):
        stacks = tuple(tuple(int(o) for o in s) for s in self.stacks)
        object.__setattr__(self, "stacks", stacks)
        g = self.geometry
        if len(stacks) != g.num_stacks:
            raise StackError(
                f"arrangement has {len(stacks)} stacks, geometry needs {g.num_stacks}")
        seen = set()
        for k, s in enumerate(stacks, start=1):
            if len(s) > g.depth:
                raise StackError(f"stack {k} holds {len(s)} objects, capacity {g.depth}")
            for o in s:
                if o < 1:
                    raise StackError(f"object ids must be positive, got {o}")
                if o in seen:
                    raise StackError(f"object {o} appears more than once")
                seen.add(o)

    @classmethod
    def from_lists(cls, geometry: Geometry, stacks: Sequence[Sequence[int]]) -> "Arrangement":
        return cls(geometry, tuple(tuple(s) for s in stacks))

    @property
    def objects(self) -> frozenset:
        return frozenset(o for s in self.stacks for o in s)

    @property
    def n(self) -> int:
        return sum(len(s) for s in self.stacks)

    def stack(self, k: int) -> tuple:
        """Contents of stack ``k`` (1-based), top-first."""
        return self.stacks[k - 1]

    def positions(self) -> dict:
        """Map object -> (stack, depth), both 1-based."""
        return {o: (k, y)
                for k, s in enumerate(self.stacks, start=1)
                for y, o in enumerate(s, start=1)}

    def to_lists(self) -> list[list[int]]:
        return [list(s) for s in self.stacks]

    def render(self) -> str:
        """ASCII grid, one column per stack, opening on the first row.

        Objects rest at the closed bottom, so a stack's depth-1 object is its
        highest drawn cell.
        """
        g = self.geometry
        width = max(2, len(str(max(self.objects, default=0))))
        rows = []
        for slot in range(1, g.depth + 1):
            cells = []
            for s in self.stacks:
                y = slot - (g.depth - len(s))
                cells.append(str(s[y - 1]).rjust(width) if y >= 1 else ".".rjust(width))
            rows.append(" ".join(cells))
        rows.append(" ".join("-" * width for _ in self.stacks))
        rows.append(" ".join(str(k).rjust(width) for k in range(1, g.num_stacks + 1)))
        return "\n".join(rows)


@dataclass(frozen=True)
class Instance:
    geometry: Geometry
    start: Arrangement
    goal: Arrangement
    kind: Kind = Kind.LABELED

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.start.geometry != self.geometry or self.goal.geometry != self.geometry:
            raise StackError("start/goal geometry differs from instance geometry")
        if self.start.objects != self.goal.objects:
            raise StackError("start and goal hold different object sets")

    @property
    def n(self) -> int:
        return self.start.n


@dataclass
class SolverStats:
    expansions: int = 0
    generations: int = 0
    elapsed: float = 0.0
    peak_open: int = 0
    peak_closed: int = 0

    def as_dict(self) -> dict:
        return {
            "expansions": self.expansions,
            "elapsed_ms": round(self.elapsed * 1000.0, 3),
            "peak_open": self.peak_open,
            "peak_closed": self.peak_closed,
        }


@dataclass
class Solution:
    actions: list
    stats: SolverStats = field(default_factory=SolverStats)

    def __post_init__(self):
        self.actions = [a if isinstance(a, Action) else Action(*a) for a in self.actions]

    @property
    def cost(self) -> int:
        return len(self.actions)

    def to_dict(self) -> dict:
        return {"cost": self.cost, "actions": [a.as_pair() for a in self.actions]}


@dataclass(frozen=True)
class Verification:
    ok: bool
    cost: int
    failed_step: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def _check_indices(a: Action, geometry: Geometry):
    for idx in (a.from_stack, a.to_stack):
        if not 1 <= idx <= geometry.num_stacks:
            raise StackError(f"stack index {idx} outside 1..{geometry.num_stacks}")


def is_permissible(a: Action, pi: Arrangement) -> bool:
    _check_indices(a, pi.geometry)
    return (len(pi.stacks[a.from_stack - 1]) > 0
            and len(pi.stacks[a.to_stack - 1]) < pi.geometry.depth)


def apply_action(a: Action, pi: Arrangement) -> Arrangement:
    _check_indices(a, pi.geometry)
    i, j = a.from_stack - 1, a.to_stack - 1
    src, dst = pi.stacks[i], pi.stacks[j]
    if not src:
        raise StackError(f"{a}: stack {a.from_stack} is empty")
    if len(dst) >= pi.geometry.depth:
        raise StackError(f"{a}: stack {a.to_stack} is at capacity")
    stacks = list(pi.stacks)
    stacks[i] = src[1:]
    stacks[j] = (src[0],) + dst
    return Arrangement(pi.geometry, tuple(stacks))


def stack_of(pi: Arrangement) -> dict:
    return {o: k for k, s in enumerate(pi.stacks, start=1) for o in s}


def is_goal(pi: Arrangement, inst: Instance) -> bool:
    if pi.objects != inst.goal.objects:
        raise StackError("arrangement and instance hold different object sets")
    if inst.kind is Kind.LABELED:
        return pi.stacks == inst.goal.stacks
    return stack_of(pi) == stack_of(inst.goal)


def replay(start: Arrangement, actions: Iterable[Action]) -> Arrangement:
    pi = start
    for a in actions:
        pi = apply_action(a, pi)
    return pi


def verify_solution(inst: Instance, sol: Solution) -> Verification:
    """Replay ``sol`` from the start state; never raises."""
    pi = inst.start
    try:
        actions = [a if isinstance(a, Action) else Action(*a) for a in sol.actions]
    except (StackError, TypeError) as exc:
        return Verification(False, len(sol.actions), 0, f"malformed action: {exc}")
    for step, a in enumerate(actions):
        try:
            if not is_permissible(a, pi):
                return Verification(False, len(actions), step, f"{a} not permissible")
        except StackError as exc:
            return Verification(False, len(actions), step, str(exc))
        pi = apply_action(a, pi)
    if not is_goal(pi, inst):
        return Verification(False, len(actions), None, "final state is not the goal")
    return Verification(True, len(actions))


# -- canonical encoding -------------------------------------------------------

def _digit_width(n: int) -> tuple[int, int]:
    base = n + 1
    nbytes = max(1, (base.bit_length() + 7) // 8)
    return base, nbytes


def canonical_key(pi: Arrangement, n: int | None = None) -> bytes:
    """Fixed-size key: every slot's occupant (0 if empty), stack-major.

    Each slot is a fixed-width big-endian digit, so byte order of keys
    agrees with lexicographic order of the top-first stack tuples.
    """
    n = max(pi.objects, default=0) if n is None else n
    _, width = _digit_width(n)
    d = pi.geometry.depth
    out = bytearray()
    for s in pi.stacks:
        for y in range(d):
            out += (s[y] if y < len(s) else 0).to_bytes(width, "big")
    return bytes(out)


def decode_key(key: bytes, geometry: Geometry, n: int) -> Arrangement:
    _, width = _digit_width(n)
    d = geometry.depth
    if len(key) != width * d * geometry.num_stacks:
        raise StackError("key length does not match geometry")
    stacks = []
    for k in range(geometry.num_stacks):
        s = []
        for y in range(d):
            off = (k * d + y) * width
            o = int.from_bytes(key[off:off + width], "big")
            if o:
                s.append(o)
        stacks.append(tuple(s))
    return Arrangement(geometry, tuple(stacks))


# -- serialization ------------------------------------------------------------

def _require(doc: dict, name: str):
    if name not in doc:
        raise StackError(f"missing field '{name}'")
    return doc[name]


def instance_to_dict(inst: Instance) -> dict:
    return {
        "version": FORMAT_VERSION,
        "num_stacks": inst.geometry.num_stacks,
        "depth": inst.geometry.depth,
        "n": inst.n,
        "kind": inst.kind.value,
        "start": inst.start.to_lists(),
        "goal": inst.goal.to_lists(),
    }


def instance_from_dict(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise StackError("instance document must be an object")
    version = _require(doc, "version")
    if version != FORMAT_VERSION:
        raise StackError(f"field 'version': unsupported value {version!r}")
    try:
        geometry = Geometry(int(_require(doc, "num_stacks")), int(_require(doc, "depth")))
    except (TypeError, ValueError) as exc:
        raise StackError(f"field 'num_stacks'/'depth': {exc}") from None
    try:
        kind = Kind(_require(doc, "kind"))
    except ValueError:
        raise StackError(f"field 'kind': expected 'labeled' or 'column'") from None
    arrangements = {}
    for name in ("start", "goal"):
        raw = _require(doc, name)
        if not isinstance(raw, list) or len(raw) != geometry.num_stacks:
            raise StackError(f"field '{name}': expected {geometry.num_stacks} stacks")
        try:
            arrangements[name] = Arrangement.from_lists(geometry, raw)
        except (StackError, TypeError, ValueError) as exc:
            raise StackError(f"field '{name}': {exc}") from None
    inst = Instance(geometry, arrangements["start"], arrangements["goal"], kind)
    n = _require(doc, "n")
    if n != inst.n:
        raise StackError(f"field 'n': {n} does not match {inst.n} objects")
    return inst


def solution_from_dict(doc: dict) -> Solution:
    if not isinstance(doc, dict):
        raise StackError("solution document must be an object")
    raw = _require(doc, "actions")
    try:
        actions = [Action(int(i), int(j)) for i, j in raw]
    except (TypeError, ValueError) as exc:
        raise StackError(f"field 'actions': {exc}") from None
    if "cost" in doc and doc["cost"] != len(actions):
        raise StackError(f"field 'cost': {doc['cost']} != {len(actions)} actions")
    return Solution(actions)


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst)) + "\n")


def load_instance(path) -> Instance:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StackError(f"{path}: not valid JSON ({exc})") from None
    return instance_from_dict(doc)
