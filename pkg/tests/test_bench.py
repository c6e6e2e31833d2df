import csv
import itertools
import json
import math
import statistics
from collections import Counter, deque

import numpy as np
import pytest
from scipy.stats import chisquare

from stackr.bench import (CSV_FIELDS, Setup, SolverSpec, counting_lower_bound,
                          instance_seed, instance_stream, load_config, run_matrix)
from stackr.core import Arrangement, Geometry, Instance, StackError
from stackr.generate import _random_arrangement
from stackr.plotting import plot_report
from stackr.search import SearchConfig, solve, successors


def all_arrangements(w, d, n):
    """Every placement of objects 1..n in stacks 1..w, buffer empty."""
    out = []
    for counts in itertools.product(range(d + 1), repeat=w):
        if sum(counts) != n:
            continue
        for perm in itertools.permutations(range(1, n + 1)):
            stacks, pos = [], 0
            for c in counts:
                stacks.append(tuple(perm[pos:pos + c]))
                pos += c
            out.append(tuple(stacks) + ((),))
    return out


class TestCountingBound:
    def test_values(self):
        assert counting_lower_bound(2, 1) == 1
        assert counting_lower_bound(2, 2) == 2
        assert counting_lower_bound(2, 3) == 4
        assert counting_lower_bound(3, 3) == math.ceil(math.log(math.factorial(9)) / math.log(12))

    def test_matches_exact_integer_arithmetic(self):
        for w in range(2, 8):
            for d in range(1, 8):
                k = counting_lower_bound(w, d)
                total = math.factorial(w * d)
                assert (w * (w + 1)) ** k >= total
                assert k == 0 or (w * (w + 1)) ** (k - 1) < total

    def test_below_exhaustive_worst_case(self):
        goal = ((1, 2), (3, 4), ())
        dist, queue = {goal: 0}, deque([goal])
        while queue:
            s = queue.popleft()
            for _, _, nxt in successors(s, 2):
                if nxt not in dist:
                    dist[nxt] = dist[s] + 1
                    queue.append(nxt)
        # relabeling makes every full goal equivalent to this one
        worst = max(dist[s] for s in all_arrangements(2, 2, 4))
        assert worst == 10
        assert counting_lower_bound(2, 2) <= worst

    def test_rejects_bad_geometry(self):
        with pytest.raises(StackError):
            counting_lower_bound(1, 3)


class TestGenerator:
    def test_uniform_small(self):
        support = all_arrangements(2, 2, 2)
        assert len(support) == 6
        rng = np.random.default_rng(12345)
        draws = Counter(_random_arrangement(rng, 2, 2, 2).stacks for _ in range(100_000))
        assert set(draws) == set(support)
        assert chisquare([draws[s] for s in support]).pvalue > 0.001

    def test_deterministic_and_buffer_empty(self):
        st = Setup(4, 3, 9, 5, 7)
        a = [inst for _, _, inst in instance_stream(st)]
        b = [inst for _, _, inst in instance_stream(st)]
        assert a == b
        assert all(inst.start.stacks[-1] == () and inst.goal.stacks[-1] == () for inst in a)
        assert len({instance_seed(7, i) for i in range(1000)}) == 1000

    def test_setup_validation(self):
        with pytest.raises(StackError):
            Setup(2, 2, 5)
        with pytest.raises(StackError):
            Setup(1, 2, 1)


class TestRunMatrix:
    setups = [Setup(2, 2, 3, 4, 0), Setup(3, 2, 4, 4, 0)]
    specs = [SolverSpec("astar", "cbh"), SolverSpec("bfs"), SolverSpec("poly-d")]

    def test_no_solvers(self):
        assert run_matrix(self.setups, []).cells == []

    def test_cells_and_rows(self, tmp_path):
        report = run_matrix(self.setups, self.specs)
        assert len(report.cells) == 6 and len(report.results) == 24
        for st in self.setups:
            opt = report.cell(st, self.specs[0])
            assert opt.avg_cost == report.cell(st, self.specs[1]).avg_cost
            assert report.cell(st, self.specs[2]).avg_cost >= opt.avg_cost
        report.write_csv(tmp_path / "r.csv")
        with open(tmp_path / "r.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert list(rows[0]) == CSV_FIELDS and len(rows) == 24
        assert {r["heuristic"] for r in rows} == {"cbh", "zero", "-"}

    def test_avg_cost_absent_iff_nothing_solved(self):
        report = run_matrix([Setup(3, 3, 8, 2, 1)], [SolverSpec("bfs")], timeout=0.0)
        cell = report.cells[0]
        assert cell.success_rate == 0 and cell.avg_cost is None
        assert report.table_rows()[0]["avg_cost"] == "NA"
        assert "NA" in report.table_text()
        solved = run_matrix([Setup(2, 2, 2, 3, 0)], [SolverSpec("bfs")]).cells[0]
        assert solved.success_rate == 100 and solved.avg_cost is not None

    def test_reproducible(self):
        a = run_matrix(self.setups, self.specs[:2])
        b = run_matrix(self.setups, self.specs[:2])
        key = lambda r: (r.seed, r.spec.label, r.solved, r.cost, r.expansions)
        assert [key(r) for r in a.results] == [key(r) for r in b.results]

    def test_plot_outputs(self, tmp_path):
        report = run_matrix([Setup(2, 2, n, 3, 0) for n in (1, 2, 3)], self.specs[:2])
        paths = plot_report(report, tmp_path)
        assert sorted(p.name for p in paths) == ["cost_w2_d2.png", "success_w2_d2.png"]
        assert all(p.stat().st_size > 0 for p in paths)
        dat = report.write_plot_data(tmp_path)
        assert (tmp_path / "success_w2_d2_astar_cbh.dat").read_text().splitlines()[1:] == [
            "1 100", "2 100", "3 100"]
        assert len(dat) == 2

    def test_small_reference_row(self):
        cell = run_matrix([Setup(5, 5, 2, 100, 0)], [SolverSpec("astar", "cbh")]).cells[0]
        assert cell.success_rate == 100
        assert cell.avg_cost == pytest.approx(1.74, abs=0.25)
        assert cell.avg_cost == pytest.approx(1.91)

    def test_small_reference_expectation(self):
        # exact mean optimum over all 30 x 30 start/goal pairs
        g = Geometry(6, 5)
        arrs = [Arrangement(g, s) for s in all_arrangements(5, 5, 2)]
        costs = [solve(Instance(g, a, b), SearchConfig("bfs")).cost for a in arrs for b in arrs]
        assert len(arrs) == 30
        assert statistics.fmean(costs) == pytest.approx(17 / 9)


class TestConfig:
    def test_seed_required(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"setups": [[2, 2, 2]]}))
        with pytest.raises(StackError, match="seed"):
            load_config(p)

    def test_round_trip(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"seed": 3, "instance_count": 7, "timeout_ms": 250,
                                 "setups": [[2, 2, 2]],
                                 "solvers": [{"algo": "astar", "heuristic": "dbh1", "weight": 2},
                                             {"algo": "poly-lsr"}]}))
        cfg = load_config(p)
        assert cfg["setups"] == [Setup(2, 2, 2, 7, 3)]
        assert cfg["timeout"] == 0.25
        assert [s.label for s in cfg["solvers"]] == ["astar+dbh1(2)", "poly-lsr"]

    def test_bad_solver_entry(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"seed": 0, "setups": [[2, 2, 2]], "solvers": ["astar"]}))
        with pytest.raises(StackError, match=r"solvers\[0\]"):
            load_config(p)

