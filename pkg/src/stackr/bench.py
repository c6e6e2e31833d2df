"""Experiment matrix: setups x solvers, per-instance rows and per-cell aggregates."""

from __future__ import annotations

import csv
import json
import math
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .core import StackError, verify_solution
from .generate import Setup, generate_instance, instance_seed, instance_stream
from .heuristics import HeuristicKind
from .poly import SOLVERS as POLY_SOLVERS
from .search import Algorithm, SearchConfig, SearchTimeout, Unsolvable, solve

__all__ = [
    "Setup", "generate_instance", "instance_seed", "instance_stream", "SolverSpec",
    "InstanceResult", "Cell", "BenchReport", "run_matrix", "counting_lower_bound",
    "load_config", "CSV_FIELDS",
]

CSV_FIELDS = ["setup_w", "setup_d", "setup_n", "instance_seed", "algo", "heuristic",
              "weight", "solved", "cost", "expansions", "elapsed_ms"]

# a cell is unstable when some run ended this close to the timeout
UNSTABLE_MARGIN = 0.1


@dataclass(frozen=True)
class SolverSpec:
    """A search configuration, or one of the poly solvers (heuristic "-")."""

    algo: str
    heuristic: str = "-"
    weight: float = 1.0

    def __post_init__(self):
        if self.algo in POLY_SOLVERS:
            object.__setattr__(self, "heuristic", "-")
            return
        Algorithm.parse(self.algo)
        if self.algo in ("bfs", "bibfs"):
            object.__setattr__(self, "heuristic", "zero")
        elif self.heuristic == "-":
            object.__setattr__(self, "heuristic", HeuristicKind.CBH.value)
        else:
            object.__setattr__(self, "heuristic", HeuristicKind.parse(self.heuristic).value)
        if not self.weight >= 1:
            raise StackError(f"weight must be >= 1, got {self.weight}")

    @property
    def label(self) -> str:
        if self.algo in POLY_SOLVERS:
            return self.algo
        name = self.algo if self.algo in ("bfs", "bibfs") else f"{self.algo}+{self.heuristic}"
        return name if self.weight == 1 else f"{name}({self.weight:g})"


@dataclass
class InstanceResult:
    setup: Setup
    index: int
    seed: int
    spec: SolverSpec
    solved: bool
    cost: int | None
    expansions: int
    elapsed: float

    def row(self) -> dict:
        return {
            "setup_w": self.setup.w, "setup_d": self.setup.d, "setup_n": self.setup.n,
            "instance_seed": self.seed, "algo": self.spec.algo, "heuristic": self.spec.heuristic,
            "weight": self.spec.weight, "solved": int(self.solved),
            "cost": "" if self.cost is None else self.cost,
            "expansions": self.expansions, "elapsed_ms": round(self.elapsed * 1000.0, 3),
        }


@dataclass
class Cell:
    setup: Setup
    spec: SolverSpec
    results: list = field(default_factory=list)
    timeout: float | None = None

    @property
    def solved(self) -> int:
        return sum(r.solved for r in self.results)

    @property
    def success_rate(self) -> float:
        return 100.0 * self.solved / len(self.results) if self.results else 0.0

    @property
    def avg_cost(self) -> float | None:
        costs = [r.cost for r in self.results if r.solved]
        return statistics.fmean(costs) if costs else None

    @property
    def mean_expansions(self) -> float:
        return statistics.fmean(r.expansions for r in self.results) if self.results else 0.0

    @property
    def mean_elapsed(self) -> float:
        return statistics.fmean(r.elapsed for r in self.results) if self.results else 0.0

    @property
    def unstable(self) -> bool:
        if self.timeout is None:
            return False
        band = UNSTABLE_MARGIN * self.timeout
        return any(abs(r.elapsed - self.timeout) <= band for r in self.results)


@dataclass
class BenchReport:
    cells: list = field(default_factory=list)

    @property
    def results(self) -> list:
        return [r for c in self.cells for r in c.results]

    def cell(self, setup: Setup, spec: SolverSpec) -> Cell:
        for c in self.cells:
            if c.setup == setup and c.spec == spec:
                return c
        raise KeyError((setup, spec))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
            out.writeheader()
            for r in self.results:
                out.writerow(r.row())

    def table_rows(self) -> list[dict]:
        rows = []
        for c in self.cells:
            avg = c.avg_cost
            rows.append({
                "w": c.setup.w, "d": c.setup.d, "n": c.setup.n, "solver": c.spec.label,
                "success_rate": round(c.success_rate, 2),
                "avg_cost": "NA" if avg is None else round(avg, 2),
                "mean_expansions": round(c.mean_expansions, 1),
                "mean_elapsed_ms": round(c.mean_elapsed * 1000.0, 3),
                "unstable": int(c.unstable),
            })
        return rows

    def write_table_csv(self, path) -> None:
        rows = self.table_rows()
        with open(path, "w", newline="") as fh:
            out = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else ["w", "d", "n", "solver"])
            out.writeheader()
            out.writerows(rows)

    def table_text(self) -> str:
        """Aligned text: one row per setup, success/avg-cost pair per solver."""
        specs = list(dict.fromkeys(c.spec for c in self.cells))
        setups = list(dict.fromkeys(c.setup for c in self.cells))
        head = ["w&d&n"] + [f"{s.label} %" for s in specs] + [f"{s.label} |A|" for s in specs]
        body = []
        for st in setups:
            cells = [self.cell(st, sp) for sp in specs]
            body.append([f"{st.w}&{st.d}&{st.n}"]
                        + [f"{c.success_rate:.0f}" + ("*" if c.unstable else "") for c in cells]
                        + ["NA" if c.avg_cost is None else f"{c.avg_cost:.2f}" for c in cells])
        widths = [max(len(r[i]) for r in [head] + body) for i in range(len(head))]
        lines = ["  ".join(x.rjust(wd) for x, wd in zip(r, widths)) for r in [head] + body]
        return "\n".join(lines) + "\n"

    def series(self) -> dict:
        """(w, d, solver label) -> [(n, success_rate, avg_cost)] sorted by n."""
        out: dict = {}
        for c in self.cells:
            out.setdefault((c.setup.w, c.setup.d, c.spec.label), []).append(
                (c.setup.n, c.success_rate, c.avg_cost))
        return {k: sorted(v) for k, v in out.items()}

    def write_plot_data(self, out_dir) -> list[Path]:
        out_dir = Path(out_dir)
        paths = []
        for (w, d, label), pts in self.series().items():
            p = out_dir / f"success_w{w}_d{d}_{_slug(label)}.dat"
            p.write_text(f"# {label}: n success_rate\n"
                         + "".join(f"{n} {rate:g}\n" for n, rate, _ in pts))
            paths.append(p)
        return paths


def _slug(label: str) -> str:
    return "".join(ch if ch.isalnum() else "_" for ch in label).strip("_")


def _run_one(inst, spec: SolverSpec, timeout: float | None):
    if spec.algo in POLY_SOLVERS:
        t0 = time.perf_counter()
        sol = POLY_SOLVERS[spec.algo](inst)
        return sol, 0, time.perf_counter() - t0
    cfg = SearchConfig(spec.algo, spec.heuristic, spec.weight, timeout=timeout)
    try:
        sol = solve(inst, cfg)
    except (SearchTimeout, Unsolvable) as exc:
        return None, exc.stats.expansions, exc.stats.elapsed
    return sol, sol.stats.expansions, sol.stats.elapsed


def _task(setup: Setup, index: int, seed: int, spec: SolverSpec, timeout: float | None):
    inst = generate_instance(setup, seed)
    sol, expansions, elapsed = _run_one(inst, spec, timeout)
    if sol is not None and not verify_solution(inst, sol).ok:
        raise StackError(f"{spec.label} returned an invalid solution on seed {seed}")
    return InstanceResult(setup, index, seed, spec, sol is not None,
                          None if sol is None else sol.cost, expansions, elapsed)


def run_matrix(setups: Iterable[Setup], specs: Sequence[SolverSpec], timeout: float | None = 5.0,
               progress: Callable[[InstanceResult], None] | None = None,
               workers: int = 1) -> BenchReport:
    """Run every solver on every instance of every setup.

    Instances come from each setup's seeded stream, so every solver sees the
    same instances and a rerun with the same seeds reproduces them.  With
    ``workers > 1`` solves run in a process pool; results are keyed by
    instance index, so the report does not depend on completion order.
    """
    report = BenchReport()
    specs = list(specs)
    setups = list(setups)
    if not specs:
        return report
    tasks = [(st, i, instance_seed(st.seed, i), sp, timeout)
             for st in setups for i in range(st.instance_count) for sp in specs]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_task, *t) for t in tasks]
            results = []
            for f in futures:
                results.append(f.result())
                if progress:
                    progress(results[-1])
    else:
        results = []
        for t in tasks:
            results.append(_task(*t))
            if progress:
                progress(results[-1])
    cells = {}
    for st in setups:
        for sp in specs:
            cells[(st, sp)] = Cell(st, sp, timeout=None if sp.algo in POLY_SOLVERS else timeout)
    for r in sorted(results, key=lambda r: r.index):
        cells[(r.setup, r.spec)].results.append(r)
    report.cells.extend(cells.values())
    return report


def counting_lower_bound(w: int, d: int) -> int:
    """Fewest actions that can reach all (wd)! full arrangements from one start.

    Each action picks one of w + 1 sources and one of w targets, so k actions
    reach at most (w(w+1))^k arrangements.
    """
    if w < 2 or d < 1:
        raise StackError(f"need w >= 2 and d >= 1, got w={w}, d={d}")
    ratio = math.lgamma(w * d + 1) / math.log(w * (w + 1))
    return max(0, math.ceil(ratio - 1e-9))


def load_config(path) -> dict:
    """Bench config: seed (required), timeout_ms, instance_count, setups, solvers."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StackError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise StackError("bench config must be an object")
    if "seed" not in doc:
        raise StackError("field 'seed': required for reproducible benchmarks")
    try:
        seed = int(doc["seed"])
        count = int(doc.get("instance_count", 100))
        timeout_ms = doc.get("timeout_ms", 5000)
        timeout = None if timeout_ms is None else float(timeout_ms) / 1000.0
        setups = [Setup(int(w), int(d), int(n), count, seed) for w, d, n in doc["setups"]]
    except KeyError as exc:
        raise StackError(f"field {exc}: missing") from None
    except (TypeError, ValueError) as exc:
        raise StackError(f"field 'setups'/'seed'/'instance_count': {exc}") from None
    specs = []
    for i, raw in enumerate(doc.get("solvers", [])):
        if not isinstance(raw, dict) or "algo" not in raw:
            raise StackError(f"field 'solvers[{i}]': expected an object with 'algo'")
        specs.append(SolverSpec(str(raw["algo"]), raw.get("heuristic", "-"),
                                float(raw.get("weight", 1))))
    return {"setups": setups, "solvers": specs, "timeout": timeout}
