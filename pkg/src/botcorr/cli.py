"""Command line: a thin client over the analysis service.

Every subcommand builds the same request payload the HTTP API accepts and
either dispatches it in-process (default) or posts it to a running service
(--server URL). File handling and table rendering live here; all analysis
happens behind the service API.

Exit codes: 0 clean, 1 I/O or data error, 2 usage error, 3 detection
signaled by analyze.
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.error
import urllib.request
from pathlib import Path

from .reporting import dumps_records, render_table
from .simulator import Scenario

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_DETECTED = 3

SCENARIO_CHOICES = tuple(s.value for s in Scenario)


class CliError(Exception):
    """Fatal I/O or data problem; message goes to stderr, exit code 1."""


def _post_json(server: str, path: str, payload: dict) -> dict:
    url = server.rstrip("/") + path
    data = json.dumps(payload).encode("utf-8")
    request = urllib.request.Request(
        url, data=data, headers={"Content-Type": "application/json"}, method="POST"
    )
    try:
        with urllib.request.urlopen(request) as response:
            return json.load(response)
    except urllib.error.HTTPError as exc:
        body = exc.read().decode("utf-8", "replace")
        raise CliError(f"server returned {exc.code} for {path}: {body}") from exc
    except urllib.error.URLError as exc:
        raise CliError(f"cannot reach server {server}: {exc.reason}") from exc


def _call(args: argparse.Namespace, path: str, payload: dict) -> dict:
    if args.server:
        return _post_json(args.server, path, payload)
    from .service import api
    from .trace import TraceError
    from .windows import MissingBytesError

    try:
        return api.dispatch(path, payload)
    except (TraceError, MissingBytesError) as exc:
        raise CliError(str(exc)) from exc
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc


def _write_bytes(path: str, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def cmd_simulate(args: argparse.Namespace) -> int:
    payload = {
        "scenario": args.scenario,
        "seed": args.seed,
        "duration_ms": args.duration_ms,
    }
    response = _call(args, "/simulate", payload)
    _write_bytes(args.out, response["trace"].encode("utf-8"))
    header = json.dumps(response["header"], separators=(",", ":"))
    print(f"wrote {args.out}: {response['event_count']} events, header {header}")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    payload = {
        "trace": _read_text(args.trace),
        "options": {
            "window_ms": args.window,
            "threshold": args.threshold,
            "idle_policy": args.idle_policy,
            "method": args.method,
            "correlation_set": args.set,
            "keyboard_signal": args.keyboard_signal,
            "dump_series": args.dump_series,
        },
    }
    response = _call(args, "/analyze", payload)
    records = response["verdicts"]
    print(render_table(records), end="")
    if args.report:
        _write_bytes(args.report, dumps_records(records).encode("utf-8"))
    return EXIT_DETECTED if response["detected"] else EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    payload = {
        "reports": [_read_text(path) for path in args.reports],
        "labels": [Path(path).stem for path in args.reports],
    }
    response = _call(args, "/report", payload)
    for warning in response["warnings"]:
        print(f"warning: {warning}", file=sys.stderr)
    rows = response["rows"]
    print(render_table(rows, labels=[row["run"] for row in rows]), end="")
    if args.out:
        _write_bytes(args.out, dumps_records(rows).encode("utf-8"))
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="botcorr",
        description="Detect keylogging-bot behavior in API-call traces.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--server",
        metavar="URL",
        default=None,
        help="send this command to a running botcorr service instead of "
        "executing in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser(
        "simulate", parents=[common], help="generate a synthetic scenario trace"
    )
    p_sim.add_argument("--scenario", required=True, choices=SCENARIO_CHOICES)
    p_sim.add_argument("--seed", required=True, type=int)
    p_sim.add_argument("--duration-ms", type=int, default=900_000)
    p_sim.add_argument("--out", required=True, help="trace file to write")
    p_sim.set_defaults(handler=cmd_simulate)

    p_ana = sub.add_parser(
        "analyze", parents=[common], help="classify every process in a trace"
    )
    p_ana.add_argument("--trace", required=True, help="trace file to analyze")
    p_ana.add_argument("--window", type=int, default=10_000, metavar="MS")
    p_ana.add_argument("--threshold", type=float, default=0.5)
    p_ana.add_argument(
        "--idle-policy", choices=("both-zero", "either-zero"), default="both-zero"
    )
    p_ana.add_argument(
        "--method", choices=("rank-pearson", "classic-d2"), default="rank-pearson"
    )
    p_ana.add_argument("--set", choices=("s1", "s2"), default="s2")
    p_ana.add_argument(
        "--keyboard-signal",
        default="call:GetAsyncKeyState",
        metavar="SELECTOR",
        help="keyboard-side signal: call:<Name>, category:<Category>, or "
        "any-of:<Name,...>",
    )
    p_ana.add_argument("--report", metavar="PATH", help="write verdict records here")
    p_ana.add_argument(
        "--dump-series",
        action="store_true",
        help="embed the per-window series in each verdict record",
    )
    p_ana.set_defaults(handler=cmd_analyze)

    p_rep = sub.add_parser(
        "report", parents=[common], help="merge analysis reports into one table"
    )
    p_rep.add_argument("reports", nargs="+", help="report files to merge")
    p_rep.add_argument("--out", metavar="PATH", help="write merged records here")
    p_rep.set_defaults(handler=cmd_report)

    p_srv = sub.add_parser("serve", help="run the HTTP service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.set_defaults(handler=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "analyze" and args.dump_series and not args.report:
        parser.error("--dump-series requires --report")
    try:
        return args.handler(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
