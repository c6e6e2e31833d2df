import random

from hypothesis import strategies as st

from stackr.core import Arrangement, Geometry, Instance, Kind


def arrangement_from(rng: random.Random, g: Geometry, objects, buffer_empty=False) -> Arrangement:
    objs = list(objects)
    rng.shuffle(objs)
    last = g.num_stacks - 1 if buffer_empty else g.num_stacks
    stacks = [[] for _ in range(g.num_stacks)]
    for o in objs:
        open_ = [k for k in range(last) if len(stacks[k]) < g.depth]
        stacks[rng.choice(open_)].append(o)
    return Arrangement(g, tuple(tuple(s) for s in stacks))


def random_instance(seed: int, w: int, d: int, n: int, kind=Kind.LABELED, buffer_empty=False):
    rng = random.Random(seed)
    g = Geometry(w + 1, d)
    objs = range(1, n + 1)
    return Instance(g, arrangement_from(rng, g, objs, buffer_empty),
                    arrangement_from(rng, g, objs, buffer_empty), kind)


@st.composite
def instances(draw, max_w=3, max_d=3, kind=Kind.LABELED):
    w = draw(st.integers(2, max_w))
    d = draw(st.integers(1, max_d))
    n = draw(st.integers(0, w * d))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_instance(seed, w, d, n, kind)


@st.composite
def arrangements(draw, max_w=4, max_d=4):
    w = draw(st.integers(2, max_w))
    d = draw(st.integers(1, max_d))
    n = draw(st.integers(0, (w + 1) * d))
    seed = draw(st.integers(0, 2**32 - 1))
    g = Geometry(w + 1, d)
    return arrangement_from(random.Random(seed), g, range(1, n + 1))


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
