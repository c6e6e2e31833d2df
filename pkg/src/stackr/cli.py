"""stackr command line: gen, solve, verify, bench, bounds.

Exit status: 0 success, 1 solver timeout or failure, 2 usage or input error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .core import (Kind, StackError, instance_to_dict, load_instance, save_instance,
                   solution_from_dict, verify_solution)
from .generate import Setup, generate_instance

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INVALID = 0, 1, 2, 3

SEARCH_ALGOS = ["bfs", "bibfs", "astar", "bhpa"]
POLY_ALGOS = ["poly-d", "poly-lsr", "poly-clsr"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else time.time_ns() & 0xFFFFFFFFFFFFFFFF
    setup = Setup(args.w, args.d, args.n, 1, seed)
    inst = generate_instance(setup, seed, Kind(args.kind))
    if args.out:
        save_instance(inst, args.out)
    else:
        print(json.dumps(instance_to_dict(inst)))
    print(f"seed {seed}", file=sys.stderr)
    if args.pretty:
        print(f"start\n{inst.start.render()}\ngoal\n{inst.goal.render()}", file=sys.stderr)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = load_instance(args.inp)
    if args.pretty:
        print(f"start\n{inst.start.render()}\ngoal\n{inst.goal.render()}", file=sys.stderr)
    if args.algo in POLY_ALGOS:
        from .poly import SOLVERS, PreconditionError
        t0 = time.perf_counter()
        try:
            sol = SOLVERS[args.algo](inst)
        except PreconditionError as exc:
            print(f"{args.algo} cannot solve this instance: {exc}", file=sys.stderr)
            return EXIT_FAIL
        sol.stats.elapsed = time.perf_counter() - t0
    else:
        from .search import SearchConfig, SearchTimeout, Unsolvable, solve
        timeout = None if args.timeout_ms is None or args.timeout_ms <= 0 else args.timeout_ms / 1000.0
        cfg = SearchConfig(args.algo, args.heuristic, args.weight, timeout=timeout)
        try:
            sol = solve(inst, cfg)
        except SearchTimeout as exc:
            print(f"timeout: {exc}", file=sys.stderr)
            print(json.dumps({"solved": False, "stats": exc.stats.as_dict()}), file=sys.stderr)
            return EXIT_FAIL
        except Unsolvable as exc:
            print(f"unsolvable: {exc}", file=sys.stderr)
            return EXIT_FAIL
    doc = sol.to_dict()
    doc["stats"] = sol.stats.as_dict()
    _emit(json.dumps(doc) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = load_instance(args.inp)
    try:
        doc = json.loads(Path(args.solution).read_text())
    except json.JSONDecodeError as exc:
        raise StackError(f"{args.solution}: not valid JSON ({exc})") from None
    sol = solution_from_dict(doc)
    v = verify_solution(inst, sol)
    if v.ok:
        print(f"valid: cost {v.cost}")
        return EXIT_OK
    where = "" if v.failed_step is None else f" at step {v.failed_step}"
    print(f"invalid{where}: {v.reason}")
    return EXIT_INVALID


def cmd_bench(args) -> int:
    from .bench import load_config, run_matrix
    from .plotting import plot_report

    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["setups"] = [Setup(s.w, s.d, s.n, s.instance_count, args.seed) for s in cfg["setups"]]
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    workers = int(os.environ.get("STACKR_THREADS", "1") or 1)
    done = [0]

    def tick(_):
        done[0] += 1
        if args.verbose:
            print(f"\r{done[0]} runs", end="", file=sys.stderr)

    report = run_matrix(cfg["setups"], cfg["solvers"], cfg["timeout"], tick, workers=max(1, workers))
    if args.verbose:
        print(file=sys.stderr)
    report.write_csv(out / "results.csv")
    report.write_table_csv(out / "table.csv")
    (out / "table.txt").write_text(report.table_text())
    report.write_plot_data(out)
    plot_report(report, out)
    sys.stdout.write(report.table_text())
    return EXIT_OK


def cmd_bounds(args) -> int:
    from .bench import counting_lower_bound
    print(counting_lower_bound(args.w, args.d))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stackr", description="Stack rearrangement solvers and benchmarks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a random instance")
    g.add_argument("--w", type=int, required=True, help="stacks excluding the buffer")
    g.add_argument("--d", type=int, required=True, help="stack capacity")
    g.add_argument("--n", type=int, required=True, help="number of objects")
    g.add_argument("--seed", type=int, help="default: time-derived, echoed to stderr")
    g.add_argument("--kind", choices=[k.value for k in Kind], default=Kind.LABELED.value)
    g.add_argument("--out", help="instance file (default: stdout)")
    g.add_argument("--pretty", action="store_true", help="render start and goal to stderr")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--algo", choices=SEARCH_ALGOS + POLY_ALGOS, default="astar")
    s.add_argument("--heuristic", choices=["dbh1", "dbhn", "cbh", "cbh+dbh1", "zero"], default="cbh")
    s.add_argument("--weight", type=float, default=1.0)
    s.add_argument("--timeout-ms", type=float, default=5000.0, help="0 disables the timeout")
    s.add_argument("--out", help="solution file (default: stdout)")
    s.add_argument("--pretty", action="store_true")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a solution against an instance")
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--solution", required=True)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run a benchmark config")
    b.add_argument("--config", required=True, help="JSON config with seed, setups, solvers")
    b.add_argument("--out-dir", required=True)
    b.add_argument("--seed", type=int, help="override the config seed")
    b.add_argument("-v", "--verbose", action="store_true")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("bounds", help="print the counting lower bound")
    c.add_argument("--w", type=int, required=True)
    c.add_argument("--d", type=int, required=True)
    c.set_defaults(func=cmd_bounds)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StackError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
