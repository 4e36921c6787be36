"""Command line entry points.

    voicebot scenario PATH [--trace out.jsonl] [--tick-ms 10]
    voicebot replay TRACE
    voicebot serve --schema demo/schema.json [--world demo/world_forward.json]
                   [--port 5301] [--ops-port 5302] [--console-dir frontend/dist]
    voicebot robot --world demo/world_forward.json [--host 127.0.0.1]
                   [--port 5301] [--serial 7] [--wav speech.wav]

Set VOICEBOT_LOG=debug|info|warning|error for verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from voicebot.scenario import ConfigError, replay_trace, run_scenario
from voicebot.server.trace import MalformedTrace


def _setup_logging() -> None:
    level = os.environ.get("VOICEBOT_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")


def _cmd_scenario(args) -> int:
    try:
        report = run_scenario(args.path, trace_path=args.trace,
                              tick_ms=args.tick_ms)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for failure in report.failures:
        print(f"check failed: {failure}")
    print("PASS" if report.passed else "FAIL")
    return 0 if report.passed else 1


def _cmd_replay(args) -> int:
    try:
        sys.stdout.write(replay_trace(args.path))
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MalformedTrace as exc:
        print(f"malformed trace: {exc}", file=sys.stderr)
        return 2
    return 0


def _cmd_serve(args) -> int:
    from voicebot.net import serve_forever

    try:
        serve_forever(schema_path=args.schema, world_path=args.world,
                      port=args.port, ops_port=args.ops_port,
                      tick_ms=args.tick_ms, trace_path=args.trace,
                      console_dir=args.console_dir, http_port=args.http_port)
    except KeyboardInterrupt:
        pass
    return 0


def _cmd_robot(args) -> int:
    from voicebot.net import run_robot

    try:
        run_robot(world_path=args.world, host=args.host, port=args.port,
                  serial=args.serial, wav_path=args.wav, tick_ms=args.tick_ms,
                  ops_url=args.ops_url)
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voicebot",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenario", help="run a scripted scenario on the virtual clock")
    p.add_argument("path")
    p.add_argument("--trace", default=None, help="write a JSON-lines trace here")
    p.add_argument("--tick-ms", type=int, default=None)
    p.set_defaults(func=_cmd_scenario)

    p = sub.add_parser("replay", help="render a trace as a readable timeline")
    p.add_argument("path")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("serve", help="run the live server (TCP + ops WebSocket)")
    p.add_argument("--schema", required=True)
    p.add_argument("--world", default=None,
                   help="also host the emulated robot + sim in-process")
    p.add_argument("--port", type=int, default=5301)
    p.add_argument("--ops-port", type=int, default=5302)
    p.add_argument("--tick-ms", type=int, default=10)
    p.add_argument("--trace", default=None)
    p.add_argument("--console-dir", default=None,
                   help="serve this directory of console assets over HTTP")
    p.add_argument("--http-port", type=int, default=5303)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("robot", help="attach an emulated robot + sim to a server over TCP")
    p.add_argument("--world", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=5301)
    p.add_argument("--serial", type=int, default=7)
    p.add_argument("--wav", default=None, help="play this WAV into the robot's mic")
    p.add_argument("--tick-ms", type=int, default=10)
    p.add_argument("--ops-url", default=None,
                   help="publish pose/pin telemetry to the server's ops endpoint")
    p.set_defaults(func=_cmd_robot)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
