"""Command-line runner for scenario files.

Exit codes: 0 when every step passes, 1 when a step fails, 2 when a
scenario cannot be parsed or validated.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .checks import CATALOG, jsonable, list_checks, run_step
from .scenario import Scenario, ScenarioError, bundled_scenarios, resolve

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


def _apply_expectations(entry: dict, expect: dict) -> None:
    """Judge a step by expected detail values instead of its own violations."""
    entry["expect"] = jsonable(expect)
    if entry["status"] == "error" or "details" not in entry:
        return
    details = entry["details"]
    mismatches = [f"expected {k} = {json.dumps(v)}, got {json.dumps(details.get(k))}"
                  for k, v in sorted(entry["expect"].items()) if details.get(k) != v]
    entry["observed_violations"] = entry["violations"]
    entry["violations"] = mismatches
    entry["status"] = "fail" if mismatches else "pass"


def run_scenario(path, keep_going: bool = False) -> dict:
    """Load, validate and run one scenario; the report carries its ``exit_code``."""
    try:
        scn = Scenario.load(resolve(str(path)))
    except ScenarioError as exc:
        return {"scenario": str(path), "status": "error", "message": str(exc), "steps": [],
                "exit_code": EXIT_INVALID}
    steps = []
    for item in scn.pipeline:
        entry = run_step(item["step"], scn)
        if "expect" in item:
            _apply_expectations(entry, item["expect"])
        steps.append(entry)
        if entry["status"] != "pass" and not keep_going:
            break
    ran = {s["step"] for s in steps}
    skipped = [item["step"] for item in scn.pipeline if item["step"] not in ran]
    ok = all(s["status"] == "pass" for s in steps) and not skipped
    return {"scenario": scn.name, "source": scn.source, "status": "pass" if ok else "fail", "steps": steps,
            "skipped": skipped, "exit_code": EXIT_OK if ok else EXIT_FAIL}


def _run_one(args):
    return run_scenario(*args)


def run_many(paths, keep_going=False, jobs=1) -> list[dict]:
    work = [(p, keep_going) for p in paths]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_one, work))
    return [_run_one(w) for w in work]


def _fmt(v) -> str:
    return json.dumps(v, sort_keys=True, separators=(",", ":"))


def format_text(report: dict) -> str:
    lines = [f"scenario {report['scenario']}: {report['status'].upper()} (exit {report['exit_code']})"]
    if "message" in report and not report["steps"]:
        lines.append(f"  {report['message']}")
    for s in report["steps"]:
        details = " ".join(f"{k}={_fmt(v)}" for k, v in sorted(s.get("details", {}).items()) if k != "residuals")
        lines.append(f"  [{s['status']}] {s['step']}  {details}".rstrip())
        if "message" in s:
            lines.append(f"      {s['message']}")
        for v in s.get("violations", []):
            lines.append(f"      violation: {v}")
        residuals = dict(s.get("details", {}).get("residuals", {}))
        if "residual" in s:
            residuals["-".join(map(str, s["pair"]))] = s["residual"]
        for pair, rows in sorted(residuals.items()):
            lines.append(f"      residual on overlap {pair}:")
            lines.extend(f"        {_fmt(r)}" for r in rows)
    for name in report.get("skipped", []):
        lines.append(f"  [skipped] {name}")
    return "\n".join(lines)


def format_json(reports: list[dict]) -> str:
    body = reports[0] if len(reports) == 1 else {"reports": reports,
                                                 "exit_code": max(r["exit_code"] for r in reports)}
    return json.dumps(body, sort_keys=True, indent=2)


def _list_checks(fmt: str) -> str:
    if fmt == "json":
        return json.dumps(list_checks(), indent=2)
    width = max(len(n) for n in CATALOG)
    return "\n".join(f"{c['step']:<{width}}  {c['location']}: {c['verifies']}" for c in list_checks())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qbundles", description="Run bundle construction and verification scenarios.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run scenario files (paths or bundled scenario names)")
    run.add_argument("scenarios", nargs="+")
    run.add_argument("--keep-going", action="store_true", help="continue after a failing step")
    run.add_argument("--report", choices=("json", "text"), default="text")
    run.add_argument("--jobs", type=int, default=1, help="scenarios to run in parallel")
    lc = sub.add_parser("list-checks", help="list available pipeline steps")
    lc.add_argument("--format", choices=("text", "json"), default="text")
    sub.add_parser("list-scenarios", help="list bundled scenarios")
    sub.add_parser("version", help="print the version")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "version":
        print(f"qbundles {__version__}")
        return EXIT_OK
    if args.command == "list-checks":
        print(_list_checks(args.format))
        return EXIT_OK
    if args.command == "list-scenarios":
        print("\n".join(bundled_scenarios()))
        return EXIT_OK
    if args.jobs < 1:
        print("--jobs must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    reports = run_many(args.scenarios, args.keep_going, args.jobs)
    if args.report == "json":
        print(format_json(reports))
    else:
        print("\n\n".join(format_text(r) for r in reports))
    return max(r["exit_code"] for r in reports)


if __name__ == "__main__":
    sys.exit(main())
