"""Reduction of labeled rearrangement to pebble motion on a tree.

Each stack becomes a path of ``depth`` vertices hanging off a shared root;
vertex 0 is the root and stack ``s`` (1-based) owns vertices
``(s-1)*d + 1 .. s*d`` from depth 1 down to depth d.  Pebbles on a path stay
packed against the root end, so the object at depth y of stack s sits on the
y-th vertex of path s.  A pop-and-push becomes a walk through the root plus
the one-step shifts that keep both paths packed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Action, Geometry, Instance, Kind, Solution, StackError, verify_solution

ROOT = 0


@dataclass(frozen=True)
class PebbleTree:
    num_stacks: int
    depth: int

    @classmethod
    def for_geometry(cls, g: Geometry) -> "PebbleTree":
        return cls(g.num_stacks, g.depth)

    @property
    def num_vertices(self) -> int:
        return self.num_stacks * self.depth + 1

    def vertex(self, stack: int, depth: int) -> int:
        """Vertex of (1-based stack, 1-based depth)."""
        return (stack - 1) * self.depth + depth

    def locate(self, v: int) -> tuple[int, int]:
        """Inverse of ``vertex``; the root has no location."""
        if not 1 <= v < self.num_vertices:
            raise StackError(f"vertex {v} is not a path vertex")
        return (v - 1) // self.depth + 1, (v - 1) % self.depth + 1

    def parent(self, v: int) -> int | None:
        if v == ROOT:
            return None
        _, y = self.locate(v)
        return ROOT if y == 1 else v - 1

    def edges(self) -> list[tuple[int, int]]:
        return [(self.parent(v), v) for v in range(1, self.num_vertices)]

    def adjacent(self, u: int, v: int) -> bool:
        if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices) or u == v:
            return False
        return self.parent(u) == v or self.parent(v) == u

    def edge_list(self) -> str:
        return "\n".join(f"{u} {v}" for u, v in self.edges()) + "\n"


@dataclass(frozen=True)
class PebbleMove:
    pebble: int
    from_vertex: int
    to_vertex: int


def _configuration(tree: PebbleTree, stacks) -> dict:
    return {o: tree.vertex(k, y)
            for k, s in enumerate(stacks, start=1) for y, o in enumerate(s, start=1)}


def reduce(inst: Instance):
    """(tree, x_I, x_G) with each configuration a dict pebble -> vertex."""
    if inst.kind is not Kind.LABELED:
        raise StackError("only labeled instances reduce to pebble motion (column goals are sets)")
    tree = PebbleTree.for_geometry(inst.geometry)
    return tree, _configuration(tree, inst.start.stacks), _configuration(tree, inst.goal.stacks)


def actions_to_pebble_moves(inst: Instance, sol: Solution) -> list[PebbleMove]:
    v = verify_solution(inst, sol)
    if not v.ok:
        raise StackError(f"solution does not verify: {v.reason}")
    tree, _, _ = reduce(inst)
    stacks = [list(s) for s in inst.start.stacks]
    moves = []
    for a in sol.actions:
        i, j = a.from_stack, a.to_stack
        src, dst = stacks[i - 1], stacks[j - 1]
        o = src.pop(0)
        moves.append(PebbleMove(o, tree.vertex(i, 1), ROOT))
        for y, p in enumerate(src, start=2):
            moves.append(PebbleMove(p, tree.vertex(i, y), tree.vertex(i, y - 1)))
        for y in range(len(dst), 0, -1):
            moves.append(PebbleMove(dst[y - 1], tree.vertex(j, y), tree.vertex(j, y + 1)))
        moves.append(PebbleMove(o, ROOT, tree.vertex(j, 1)))
        dst.insert(0, o)
    return moves


def pebble_moves_to_actions(inst: Instance, moves) -> Solution:
    """One action per pebble passage through the root.

    Moves inside a path emit nothing, and a pebble that leaves the root back
    into the path it came from emits nothing either.
    """
    tree, x, _ = reduce(inst)
    at = {v: o for o, v in x.items()}
    actions = []
    entered_from = None
    for idx, m in enumerate(moves):
        if at.get(m.from_vertex) != m.pebble:
            raise StackError(f"move {idx}: pebble {m.pebble} is not on vertex {m.from_vertex}")
        if not tree.adjacent(m.from_vertex, m.to_vertex):
            raise StackError(f"move {idx}: vertices {m.from_vertex} and {m.to_vertex} are not adjacent")
        if m.to_vertex in at:
            raise StackError(f"move {idx}: vertex {m.to_vertex} is occupied")
        del at[m.from_vertex]
        at[m.to_vertex] = m.pebble
        if m.to_vertex == ROOT:
            entered_from = tree.locate(m.from_vertex)[0]
        elif m.from_vertex == ROOT:
            j = tree.locate(m.to_vertex)[0]
            if j != entered_from:
                actions.append(Action(entered_from, j))
    if ROOT in at:
        raise StackError(f"pebble {at[ROOT]} is stranded on the root")
    for s in range(1, tree.num_stacks + 1):
        filled = [tree.vertex(s, y) in at for y in range(1, tree.depth + 1)]
        if any(filled[y] and not filled[y - 1] for y in range(1, tree.depth)):
            raise StackError(f"path {s} has a gap; no arrangement matches the final configuration")
    return Solution(actions)
