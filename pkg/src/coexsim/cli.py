"""Command-line front end.

`coexsim run` executes a scenario (builtin or from a JSON file) and writes a
JSON summary plus, on request, the full event trace. `coexsim replay` re-runs
the pinned scenarios and diffs them against the traces shipped inside the
package. `coexsim audit` re-checks any trace file against the duty-cycle
rules. Every subcommand can also delegate to a running `coexsim serve`
instance via --server, in which case this process is a thin HTTP client.

Exit codes: 0 success, 1 a check failed (compliance violation or replay
mismatch), 2 bad input (unknown scenario, invalid file, malformed trace).
"""

from __future__ import annotations

import argparse
import json
import sys

from .builtins import get_builtin, list_builtins
from .golden import GoldenError, golden_names, replay_builtin
from .metrics import audit_compliance
from .runner import run_scenario
from .scenario import ScenarioError, load_scenario
from .trace import TraceParseError, parse_trace

OK, CHECK_FAILED, BAD_INPUT = 0, 1, 2


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load(args: argparse.Namespace):
    if args.builtin:
        return get_builtin(args.builtin)
    return load_scenario(args.scenario)


# -- run --------------------------------------------------------------------


def _summary_of(artifacts) -> dict:
    return {
        "scenario": artifacts.scenario.simulation.name,
        "seed": artifacts.seed,
        "horizon_ns": artifacts.horizon_ns,
        "trace_sha256": artifacts.trace.sha256(),
        "metrics": artifacts.metrics.to_dict(),
        "compliance": artifacts.compliance.to_dict(),
    }


def _cmd_run(args: argparse.Namespace) -> int:
    if args.replications < 1:
        return _fail("--replications must be at least 1", BAD_INPUT)
    if args.trace and args.replications != 1:
        return _fail("--trace needs --replications 1", BAD_INPUT)
    horizon = args.duration_ms * 1_000_000 if args.duration_ms else None

    if args.server:
        return _run_remote(args, horizon)

    try:
        scenario = _load(args)
    except (ScenarioError, KeyError) as exc:
        return _fail(str(exc), BAD_INPUT)

    base_seed = args.seed if args.seed is not None else scenario.simulation.seed
    summaries = []
    all_ok = True
    for rep in range(args.replications):
        artifacts = run_scenario(scenario, seed=base_seed + rep,
                                 horizon_ns=horizon)
        summaries.append(_summary_of(artifacts))
        all_ok = all_ok and artifacts.compliance.ok
        if args.trace:
            _write(args.trace, artifacts.trace.text())

    if args.replications == 1:
        out = summaries[0]
    else:
        n = args.replications
        out = {
            "replications": summaries,
            "aggregate": {
                "runs": n,
                "mean_busy_fraction": sum(s["metrics"]["busy_fraction"]
                                          for s in summaries) / n,
                "mean_jain_airtime": sum(s["metrics"]["jain_airtime"]
                                         for s in summaries) / n,
                "compliant_runs": sum(s["compliance"]["ok"] for s in summaries),
            },
        }
    _write(args.summary, json.dumps(out, indent=2) + "\n")
    if args.check_compliance and not all_ok:
        return CHECK_FAILED
    return OK


def _run_remote(args: argparse.Namespace, horizon: int | None) -> int:
    import httpx

    if args.scenario:
        try:
            scenario_body = load_scenario(args.scenario).model_dump()
        except ScenarioError as exc:
            return _fail(str(exc), BAD_INPUT)
    else:
        scenario_body = None

    summaries = []
    all_ok = True
    with httpx.Client(base_url=args.server, timeout=300.0) as client:
        for rep in range(args.replications):
            body = {
                "builtin": args.builtin or None,
                "scenario": scenario_body,
                "include_trace": bool(args.trace),
            }
            if args.seed is not None:
                body["seed"] = args.seed + rep
            elif rep:
                return _fail("--replications over --server needs --seed",
                             BAD_INPUT)
            if args.duration_ms:
                body["duration_ms"] = args.duration_ms
            resp = client.post("/runs", json=body)
            if resp.status_code != 200:
                return _fail(f"server: {resp.status_code} {resp.text}",
                             BAD_INPUT)
            payload = resp.json()
            if args.trace:
                _write(args.trace, payload.pop("trace") or "")
            else:
                payload.pop("trace", None)
            summaries.append(payload)
            all_ok = all_ok and payload["compliance"]["ok"]

    out = summaries[0] if args.replications == 1 else {"replications": summaries}
    _write(args.summary, json.dumps(out, indent=2) + "\n")
    if args.check_compliance and not all_ok:
        return CHECK_FAILED
    return OK


# -- replay -------------------------------------------------------------------


def _cmd_replay(args: argparse.Namespace) -> int:
    names = args.names or list(golden_names())
    failed = False
    for name in names:
        if args.server:
            import httpx

            resp = httpx.post(f"{args.server}/replays/{name}", timeout=300.0)
            if resp.status_code == 404:
                return _fail(resp.json().get("detail", name), BAD_INPUT)
            result = resp.json()
        else:
            try:
                result = replay_builtin(name).to_dict()
            except (GoldenError, KeyError) as exc:
                return _fail(str(exc), BAD_INPUT)
        if result["ok"]:
            print(f"replay {name}: ok ({result['actual_sha256'][:12]})")
        else:
            failed = True
            print(f"replay {name}: MISMATCH at line {result['divergence_line']}")
            print(f"  expected: {result['expected_line']}")
            print(f"  actual:   {result['actual_line']}")
    return CHECK_FAILED if failed else OK


# -- audit ---------------------------------------------------------------------


def _cmd_audit(args: argparse.Namespace) -> int:
    if args.trace_file == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.trace_file) as fh:
                text = fh.read()
        except OSError as exc:
            return _fail(str(exc), BAD_INPUT)

    if args.server:
        import httpx

        resp = httpx.post(f"{args.server}/audits", json={"trace": text},
                          timeout=300.0)
        if resp.status_code != 200:
            return _fail(f"server: {resp.status_code} {resp.text}", BAD_INPUT)
        payload = resp.json()
        report = payload["report"]
    else:
        try:
            records = parse_trace(text)
        except TraceParseError as exc:
            return _fail(str(exc), BAD_INPUT)
        report = audit_compliance(records).to_dict()

    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(f"bursts: {len(report['bursts'])}  "
              f"cca checks: {report['cca_count']}")
        for violation in report["violations"]:
            print(f"violation: {violation}")
        print("audit: ok" if report["ok"] else "audit: FAILED")
    return OK if report["ok"] else CHECK_FAILED


# -- serve ----------------------------------------------------------------------


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return OK


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coexsim",
        description="Deterministic Wi-Fi / LTE-u coexistence simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="path to a scenario JSON file")
    src.add_argument("--builtin", choices=list_builtins(),
                     help="name of a shipped scenario")
    run.add_argument("--seed", type=int, default=None,
                     help="override the scenario seed")
    run.add_argument("--duration-ms", type=int, default=None,
                     help="override the horizon, in milliseconds")
    run.add_argument("--trace", default=None,
                     help="write the event trace here ('-' for stdout)")
    run.add_argument("--summary", default="-",
                     help="write the JSON summary here (default stdout)")
    run.add_argument("--check-compliance", action="store_true",
                     help="exit 1 if the duty-cycle audit finds violations")
    run.add_argument("--replications", type=int, default=1,
                     help="run N times with seeds seed..seed+N-1")
    run.add_argument("--server", default=None,
                     help="delegate to a coexsim service at this base URL")
    run.set_defaults(func=_cmd_run)

    replay = sub.add_parser("replay",
                            help="re-run pinned scenarios against stored traces")
    replay.add_argument("names", nargs="*",
                        help=f"scenario names (default: {' '.join(golden_names())})")
    replay.add_argument("--server", default=None)
    replay.set_defaults(func=_cmd_replay)

    audit = sub.add_parser("audit", help="check a trace file for compliance")
    audit.add_argument("trace_file", help="trace path ('-' for stdin)")
    audit.add_argument("--json", action="store_true",
                       help="print the full report as JSON")
    audit.add_argument("--server", default=None)
    audit.set_defaults(func=_cmd_audit)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
