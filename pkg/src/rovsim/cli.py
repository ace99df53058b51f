"""Command-line entry point.

    rov sim run --scenario <file|builtin> [--seed N] [--out log.csv] [--metrics]
    rov sim serve [--tcp-port N] [--ws-port N] [--scenario <file|builtin>] [--realtime]
    rov proto decode <hexfile>

Exit codes: 0 success, 2 scenario/input error, 3 simulation divergence.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import server as server_mod
from . import telemetry
from .dynamics import SimulationDivergedError
from .harness import run_scenario, write_csv
from .scenario import BUILTIN_SCENARIOS, ScenarioError, get_scenario

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_DIVERGED = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rov", description=__doc__.splitlines()[0])
    top = parser.add_subparsers(dest="group", required=True)

    sim = top.add_parser("sim", help="run or serve simulation sessions")
    sim_sub = sim.add_subparsers(dest="sim_command", required=True)

    run = sim_sub.add_parser("run", help="run a scenario to completion")
    run.add_argument(
        "--scenario",
        required=True,
        help=f"scenario JSON file or one of: {', '.join(sorted(BUILTIN_SCENARIOS))}",
    )
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--out", default=None, help="write the per-tick CSV log here")
    run.add_argument("--metrics", action="store_true", help="print the run summary as JSON")

    serve = sim_sub.add_parser("serve", help="serve a live piloting session")
    serve.add_argument("--tcp-port", type=int, default=server_mod.DEFAULT_TCP_PORT)
    serve.add_argument("--ws-port", type=int, default=server_mod.DEFAULT_WS_PORT)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--scenario", default=None, help="optional scenario for params/script")
    serve.add_argument(
        "--realtime",
        action="store_true",
        default=True,
        help="lock ticks to the wall clock (always on in serve mode)",
    )

    proto = top.add_parser("proto", help="wire protocol debugging aids")
    proto_sub = proto.add_subparsers(dest="proto_command", required=True)
    decode = proto_sub.add_parser("decode", help="decode frames from a hex dump file")
    decode.add_argument("hexfile", help="file containing hex bytes (whitespace ignored)")
    return parser


def _cmd_run(args) -> int:
    try:
        scenario = get_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    try:
        log = run_scenario(scenario, seed=args.seed)
    except SimulationDivergedError as exc:
        print(f"simulation diverged at tick {exc.tick_index}: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    final = log.summary["final_state"]
    print(
        f"{log.scenario_name}: {log.summary['ticks']} ticks, seed {log.seed}, "
        f"final depth {final['depth']:.3f} m, yaw {final['yaw']:.3f} rad"
    )
    if args.out:
        write_csv(log, args.out)
        print(f"log written to {args.out}")
    if args.metrics:
        print(json.dumps(log.summary, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_serve(args) -> int:
    scenario = None
    if args.scenario is not None:
        try:
            scenario = get_scenario(args.scenario)
        except ScenarioError as exc:
            print(f"scenario error: {exc}", file=sys.stderr)
            return EXIT_SCENARIO
    print(f"serving raw protocol on {args.host}:{args.tcp_port}, "
          f"dashboard bridge on ws://{args.host}:{args.ws_port}/ws (Ctrl-C to stop)")
    server_mod.serve(
        scenario,
        host=args.host,
        tcp_port=args.tcp_port,
        ws_port=args.ws_port,
        realtime=True,
    )
    return EXIT_OK


def _cmd_decode(args) -> int:
    try:
        text = open(args.hexfile, "r", encoding="utf-8").read()
        data = bytes.fromhex("".join(text.split()))
    except (OSError, ValueError) as exc:
        print(f"cannot read hex dump: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    messages, remainder, errors = telemetry.decode_stream(data)
    for msg in messages:
        if isinstance(msg, telemetry.TelemetryFrame):
            print(json.dumps(telemetry.telemetry_to_json(msg)))
        elif isinstance(msg, telemetry.EventMessage):
            print(json.dumps({"type": "event", "seq": msg.seq, "text": msg.text}))
        else:
            print(json.dumps(telemetry.command_to_json(msg)))
    for err in errors:
        print(f"error at offset {err.offset}: {err.reason}", file=sys.stderr)
    if remainder:
        print(f"{len(remainder)} trailing bytes form an incomplete frame", file=sys.stderr)
    print(f"decoded {len(messages)} message(s), {len(errors)} error(s)", file=sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.group == "sim" and args.sim_command == "run":
        return _cmd_run(args)
    if args.group == "sim" and args.sim_command == "serve":
        return _cmd_serve(args)
    return _cmd_decode(args)


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
