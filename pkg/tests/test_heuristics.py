import pytest
from hypothesis import given, settings

from stackr.core import Arrangement, Geometry, Instance, Kind, StackError
from stackr.heuristics import (Evaluator, HeuristicKind, cbh, combined_max, dbh, dbh1, dbhn,
                               evaluate)
from stackr.search import SearchConfig, solve

from conftest import instances, random_instance

G = Geometry(3, 2)
# the worked example: stacks open downward in the drawing, listed top-first here
EX_START = Arrangement(G, ((3,), (2, 4), (1,)))
EX_GOAL = Arrangement(G, ((2, 1), (4, 3), ()))


class TestWorkedExample:
    def test_per_object_dbh(self):
        assert [dbh(o, EX_START, EX_GOAL) for o in (1, 2, 3, 4)] == [3, 1, 3, 4]

    def test_aggregates(self):
        assert dbh1(EX_START, EX_GOAL) == 4
        assert dbhn(EX_START, EX_GOAL) == 11
        assert cbh(EX_START, EX_GOAL) == 7
        assert combined_max(EX_START, EX_GOAL) == 7

    def test_optimum_is_nine(self):
        inst = Instance(G, EX_START, EX_GOAL)
        assert solve(inst, SearchConfig("bfs")).cost == 9


class TestHandCases:
    def test_same_stack_swap(self):
        g = Geometry(3, 3)
        cur = Arrangement(g, ((1, 2), (), ()))
        goal = Arrangement(g, ((2, 1), (), ()))
        assert dbh(2, cur, goal) == 4

    def test_direct_move(self):
        g = Geometry(3, 2)
        cur = Arrangement(g, ((1,), (), ()))
        goal = Arrangement(g, ((), (1,), ()))
        assert dbh(1, cur, goal) == 1
        assert cbh(cur, goal) == 1

    def test_object_at_home_is_zero(self):
        g = Geometry(3, 2)
        cur = Arrangement(g, ((1, 2), (3,), ()))
        goal = Arrangement(g, ((3, 2), (1,), ()))
        assert dbh(2, cur, goal) == 0

    def test_home_slot_is_physical(self):
        # object 1 rests on the bottom slot in both; moving 2 away is the whole job
        g = Geometry(3, 2)
        cur = Arrangement(g, ((2, 1), (), ()))
        goal = Arrangement(g, ((1,), (2,), ()))
        assert dbh(1, cur, goal) == 0
        assert dbh1(cur, goal) == 1 and cbh(cur, goal) == 1

    def test_blocked_capacity_costs_extra(self):
        # full board: the cross-stack move needs an intermediate stop
        g = Geometry(3, 1)
        cur = Arrangement(g, ((1,), (2,), (3,)))
        goal = Arrangement(g, ((2,), (1,), (3,)))
        assert dbh(1, cur, goal) == 2
        assert cbh(cur, goal) == 4

    def test_column_cbh_ignores_depth(self):
        g = Geometry(3, 2)
        cur = Arrangement(g, ((2, 1), (), ()))
        goal = Arrangement(g, ((1, 2), (), ()))
        assert cbh(cur, goal, Kind.COLUMN) == 0
        assert cbh(cur, goal, Kind.COLUMN) <= cbh(cur, goal)


@settings(max_examples=120, deadline=None)
@given(instances(max_w=3, max_d=2))
def test_admissible_against_bfs(inst):
    opt = solve(inst, SearchConfig("bfs")).cost
    for kind in ("dbh1", "cbh", "cbh+dbh1", "zero"):
        assert evaluate(kind, inst.start, inst.goal) <= opt
    assert dbhn(inst.start, inst.goal) >= dbh1(inst.start, inst.goal)


@settings(max_examples=80, deadline=None)
@given(instances(max_w=3, max_d=2, kind=Kind.COLUMN))
def test_column_cbh_admissible(inst):
    opt = solve(inst, SearchConfig("bfs")).cost
    assert cbh(inst.start, inst.goal, Kind.COLUMN) <= opt


@given(instances(max_w=4, max_d=4))
def test_goal_states_score_zero(inst):
    for kind in HeuristicKind:
        assert evaluate(kind, inst.goal, inst.goal) == 0


@given(instances(max_w=4, max_d=4))
def test_evaluator_matches_direct_evaluation(inst):
    for kind in HeuristicKind:
        h = Evaluator(inst, kind)
        assert h(inst.start.stacks) == evaluate(kind, inst.start, inst.goal)
        back = Evaluator(inst, kind, towards=inst.start)
        assert back(inst.goal.stacks) == evaluate(kind, inst.goal, inst.start)


def test_bounds_between_aggregates():
    for seed in range(50):
        inst = random_instance(seed, 3, 3, 7)
        c, m = cbh(inst.start, inst.goal), dbh1(inst.start, inst.goal)
        assert combined_max(inst.start, inst.goal) == max(c, m)
        assert dbhn(inst.start, inst.goal) >= m


class TestKinds:
    def test_parse(self):
        assert HeuristicKind.parse("CBH+DBH1") is HeuristicKind.CBH_DBH1
        assert HeuristicKind.parse(HeuristicKind.ZERO) is HeuristicKind.ZERO
        with pytest.raises(StackError, match="unknown heuristic"):
            HeuristicKind.parse("manhattan")

    def test_admissibility_flags(self):
        assert not HeuristicKind.DBHN.admissible
        assert all(k.admissible for k in HeuristicKind if k is not HeuristicKind.DBHN)

    def test_depth_heuristics_reject_column_instances(self):
        inst = random_instance(0, 2, 2, 3, Kind.COLUMN)
        with pytest.raises(StackError, match="goal depths"):
            Evaluator(inst, "dbh1")
        assert Evaluator(inst, "cbh")(inst.start.stacks) >= 0
