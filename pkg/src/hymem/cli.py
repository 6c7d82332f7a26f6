"""Command-line entry point: ``hymem simulate | verify | report | example1 | example2``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .case_studies import Example1Params, example1_preset
from .certificates import run_suite
from .errors import HymemError, SchemaError
from .io import write_arc_csv, write_domain_json
from .report import CheckReport
from .scenario import Scenario, build_scenario, load_scenario, seed_from_env
from .system import Solution, simulate

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_ZENO, EXIT_VACUOUS = 0, 1, 2, 3, 4


def exit_code(termination: str, reports: list[CheckReport] | None) -> int:
    """Exit code from the termination kind and the check verdicts alone."""
    if termination == "zeno":
        return EXIT_ZENO
    if reports is None:
        return EXIT_OK
    if any(not r.passed for r in reports):
        return EXIT_VIOLATION
    gated = [r for r in reports if r.trigger_hits is not None]
    if gated and any(r.vacuous for r in gated):
        return EXIT_VACUOUS
    return EXIT_OK


def _dump_json(obj, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(f"not serialisable: {type(o).__name__}")


def _finite(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _finite(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_finite(x) for x in v]
    return v


def write_solution(sol: Solution, out: Path, derivatives: bool = True) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_arc_csv(sol.x, out / "trajectory.csv", derivatives=derivatives)
    write_arc_csv(sol.u.arc, out / "input.csv")
    write_domain_json(sol.x, sol.delta, out / "domain.json")
    _dump_json(
        _finite(
            {
                "termination": sol.termination,
                "events": [e.to_dict() for e in sol.events],
                "jump_choices": list(sol.jump_choices),
            }
        ),
        out / "events.json",
    )


def run_checks(sc: Scenario, sol: Solution) -> list[CheckReport]:
    pre = sc.preset
    reps = run_suite(pre.certificate, sol, stride=sc.stride)
    reps += pre.extra(sol, trace=sc.trace)
    reps += sc.envelope_reports(sol)
    return reps


def verify_scenario(sc: Scenario) -> tuple[int, dict]:
    """Simulate and check one scenario, write its artifacts and return ``(exit code, report)``."""
    pre = sc.preset
    sol = simulate(pre.system, pre.initial, pre.input, pre.config)
    write_solution(sol, sc.out_dir, sc.derivatives)
    reps = None if sol.termination == "zeno" else run_checks(sc, sol)
    code = exit_code(sol.termination, reps)
    verdict = {EXIT_OK: "PASS", EXIT_VIOLATION: "FAIL", EXIT_ZENO: "ZENO", EXIT_VACUOUS: "VACUOUS"}[code]
    report = {
        "scenario": sc.name,
        "config": sc.config,
        "termination": sol.termination,
        "verdict": verdict,
        "exit_code": code,
        "certificate_notes": list(pre.certificate.notes),
        "reports": [],
    }
    for r in reps or []:
        d = r.to_dict(sc.max_violations)
        if r.trace is not None:
            d["trace"] = r.trace
        report["reports"].append(d)
    _dump_json(_finite(report), sc.out_dir / "report.json")
    return code, report


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(args) -> int:
    sc = load_scenario(args.config)
    pre = sc.preset
    sol = simulate(pre.system, pre.initial, pre.input, pre.config)
    write_solution(sol, sc.out_dir, sc.derivatives)
    print(f"{sc.name}: {sol.termination} after {len(sol.jumps())} jumps, final time {sol.x.end()[0]:.6g}; wrote {sc.out_dir}")
    return exit_code(sol.termination, None)


def cmd_verify(args) -> int:
    sc = load_scenario(args.config)
    code, report = verify_scenario(sc)
    _print_report(report)
    return code


def summary_line(r: dict) -> str:
    status = "PASS" if r["passed"] else "FAIL"
    if r.get("vacuous"):
        status = "VACUOUS"
    hits = "-" if r.get("trigger_hits") is None else str(r["trigger_hits"])
    line = f"{status} variant={r['variant']} samples={r['samples_checked']} hits={hits}"
    if not r["passed"]:
        line += f" violations={r['violation_count']}"
    return line


def _g(v) -> str:
    return f"{float(v):.6g}"


def _print_report(report: dict, limit: int = 5) -> None:
    print(f"scenario {report['scenario']}: {report['verdict']} (termination {report['termination']})")
    for r in report["reports"]:
        print("  " + summary_line(r))
        rows = sorted(r.get("violations", []), key=lambda v: -float(v["margin"]))
        for v in rows[:limit]:
            print(
                f"    margin={_g(v['margin'])} t={_g(v['t'])} j={v['j']} {v['cond']} lhs={_g(v['lhs'])} rhs={_g(v['rhs'])}"
            )
        if len(rows) > limit:
            print(f"    ... {len(rows) - limit} more")
        for n in r.get("notes", []):
            print(f"    note: {n}")


PLOT_SCRIPT = """\
# Plot the columns of plot_data.csv against hybrid time t + j.
import csv
import matplotlib.pyplot as plt

with open("plot_data.csv") as fh:
    rows = list(csv.DictReader(fh))
pos = [float(r["position"]) for r in rows]
fig, (top, bottom) = plt.subplots(2, 1, sharex=True)
top.plot(pos, [float(r["value"]) for r in rows], label="value")
top.plot(pos, [float(r["envelope"]) for r in rows], label="envelope")
top.set_yscale("log")
top.legend()
bottom.plot(pos, [float(r["margin"]) for r in rows])
bottom.set_xlabel("t + j")
bottom.set_ylabel("value - envelope")
plt.show()
"""


def write_plot_data(report: dict, out: Path) -> Path:
    """``plot_data.csv`` from the first traced check in ``report`` plus a plotting script."""
    traced = [r for r in report["reports"] if r.get("trace")]
    if not traced:
        raise SchemaError("report has no traced check to plot; run verify with checks.trace enabled")
    r = traced[0]
    path = out / "plot_data.csv"
    with open(path, "w") as fh:
        fh.write("position,t,j,value,envelope,margin\n")
        for row in r["trace"]:
            t, j, lhs, rhs = float(row["t"]), int(row["j"]), float(row["lhs"]), float(row["rhs"])
            fh.write(f"{t + j:.17g},{t:.17g},{j},{lhs:.17g},{rhs:.17g},{lhs - rhs:.17g}\n")
    (out / "plot.py").write_text(PLOT_SCRIPT)
    return path


def cmd_report(args) -> int:
    path = Path(args.report)
    try:
        report = json.loads(path.read_text())
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    _print_report(report, limit=args.limit)
    if args.plot:
        p = write_plot_data(report, path.parent)
        print(f"wrote {p} and {path.parent / 'plot.py'}")
    return EXIT_OK


def _example1_one(seed: int, out: Path, horizon: float) -> tuple[int, dict]:
    pre = example1_preset(seed=seed, horizon=horizon)
    sc = Scenario(name=f"example1-seed{seed}", preset=pre, config={"system": {"preset": "example1"}, "sim": {"seed": seed}},
                  out_dir=out / f"seed{seed}", trace=False)
    return verify_scenario(sc)


def cmd_example1(args) -> int:
    base = seed_from_env(args.seed)
    seeds = [base + i for i in range(args.arcs)]
    out = Path(args.out)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(lambda s: _example1_one(s, out, args.horizon), seeds))
    codes = [c for c, _ in results]
    agg: dict[str, CheckReport] = {}
    for _, rep in results:
        for r in rep["reports"]:
            cr = CheckReport.from_dict(r)
            if r["variant"] in agg:
                agg[r["variant"]].merge(cr)
            else:
                agg[r["variant"]] = cr
    p = Example1Params()
    print(f"example1: {len(seeds)} arcs, r={p.r}, eps={p.eps}, tau_mati={p.tau_mati}, tau_mad={p.tau_mad}")
    for r in agg.values():
        print("  " + summary_line(r.to_dict()) + f" worst_margin={r.worst_margin:.6g}")
    failing = [s for s, c in zip(seeds, codes) if c == EXIT_VIOLATION]
    if failing:
        print(f"  arcs with violations: {len(failing)} (seeds {failing[:10]}{' ...' if len(failing) > 10 else ''})")
    summary = {"arcs": seeds, "exit_codes": codes, "reports": [r.to_dict(20) for r in agg.values()]}
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(_finite(summary), out / "summary.json")
    return max(codes) if EXIT_ZENO not in codes else EXIT_ZENO


def cmd_example2(args) -> int:
    seed = seed_from_env(args.seed)
    cfg = {"system": {"preset": f"example2-case{args.case}"}, "sim": {"seed": seed}, "output": {"dir": args.out}}
    sc = build_scenario(cfg, base=Path("."))
    code, report = verify_scenario(sc)
    _print_report(report)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hymem", description="Simulate hybrid systems with memory and check stability certificates.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a scenario and write trajectory CSV and events JSON")
    p.add_argument("config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="simulate a scenario and run every wired check")
    p.add_argument("config")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="summarise a report JSON")
    p.add_argument("report")
    p.add_argument("--plot", action="store_true", help="write plot_data.csv and plot.py next to the report")
    p.add_argument("--limit", type=int, default=5, help="violations listed per check")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("example1", help="run the networked-control example over random initial arcs")
    p.add_argument("--arcs", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=float, default=0.5)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="out-example1")
    p.set_defaults(func=cmd_example1)

    p = sub.add_parser("example2", help="run one of the impulsive delay system cases")
    p.add_argument("--case", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_example2)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "out", "") is None:
        args.out = f"out-example2-case{args.case}"
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (HymemError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
