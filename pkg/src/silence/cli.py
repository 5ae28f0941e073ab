"""Operator command line.

Exit codes: 0 success, 2 usage error (bad flag or argument), 3
configuration error (unknown mode, missing or invalid scenario), 4
transport error (bind/connect failure).
"""

from __future__ import annotations

import argparse
import signal
import sys
import time

from .channel import ChannelParams
from .errors import ConfigError, SilenceError, TransportError
from .framing import FrameKind
from .link_engine import LinkConfig, LinkEngine, run_per_scan, write_scan_csv
from .phy_modes import data_rate, mode_table
from .scenario import load_scenario, scenario_channel

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_TRANSPORT = 4

EPILOG = """exit codes:
  0  success
  2  usage error (unknown flag or malformed argument)
  3  configuration error (bad mode, scenario not found or invalid)
  4  transport error (UDP bind/connect or file access failed)

scenario files are looked up as a path, in $SILENCE_SCENARIO_DIR, then in
./scenarios/.
"""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="silence",
        description="IEEE 802.15.7 PHY-I visible light link over a simulated "
                    "LED/photodiode channel",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modes", help="print the PHY-I operating mode table")
    p.add_argument("--csv", action="store_true", help="emit CSV instead of text")

    def node_args(p, role):
        p.add_argument("--scenario", required=True, help="scenario file or name")
        if role != "rx":
            p.add_argument("--mode", type=int, default=None,
                           help="PHY mode id 0..8 (overrides the scenario)")
        p.add_argument("--sps", type=int, default=None,
                       help="samples per chip (overrides the scenario)")
        p.add_argument("--medium", default="inproc",
                       help="inproc | udp:HOST:PORT[,HOST:PORT...] | file:PATH")
        p.add_argument("--serve", default=None, metavar="HOST:PORT",
                       help="also run the control service here")
        p.add_argument("--stats-log", default=None, metavar="CSV",
                       help="append 1 Hz stats rows to this CSV file")

    p = sub.add_parser("tx", help="run a transmit node")
    node_args(p, "tx")
    p = sub.add_parser("rx", help="run a receive node")
    node_args(p, "rx")
    p.add_argument("--print-chat", action="store_true",
                   help="print received chat lines to stdout")

    p = sub.add_parser("chat", help="interactive chat against a running node")
    p.add_argument("--connect", required=True, metavar="HOST:PORT",
                   help="control service address of the node")

    p = sub.add_parser("stream", help="run a transmit node streaming a file")
    node_args(p, "stream")
    p.add_argument("--in", dest="infile", required=True, help="byte source file")
    p.add_argument("--rate", type=float, required=True,
                   help="target payload bit rate (bit/s); 0 = saturate")

    p = sub.add_parser("perscan",
                       help="sweep distances and measure PER/goodput")
    p.add_argument("--scenario", required=True)
    p.add_argument("--mode", type=int, required=True)
    p.add_argument("--distances", required=True,
                   help="comma-separated metres, e.g. 1,2,4,8")
    p.add_argument("--frames", type=int, default=1000,
                   help="frames per distance point (>= 1000 recommended)")
    p.add_argument("--payload", type=int, default=64, help="payload bytes")
    p.add_argument("--sps", type=int, default=None)
    p.add_argument("--out", default=None, metavar="CSV", help="CSV output path")

    p = sub.add_parser("serve", help="run a node plus the control service")
    p.add_argument("--bind", required=True, metavar="HOST:PORT")
    p.add_argument("--scenario", default=None)
    p.add_argument("--role", default="both", choices=("both", "tx", "rx"))
    p.add_argument("--mode", type=int, default=None)
    p.add_argument("--sps", type=int, default=None)
    p.add_argument("--medium", default="inproc")
    p.add_argument("--static", default=None, metavar="DIR",
                   help="directory of console assets to serve at /")
    p.add_argument("--stats-log", default=None, metavar="CSV")
    return parser


def _print_modes(csv_out: bool):
    rows = [(m.id, m.modulation, m.optical_clock_hz, m.rll,
             f"{m.rs[0]},{m.rs[1]}" if m.rs else "-",
             str(m.cc_rate) if m.cc_rate else "-", data_rate(m))
            for m in mode_table()]
    if csv_out:
        print("id,modulation,clock_hz,rll,rs,cc,rate_bps")
        for r in rows:
            print(f"{r[0]},{r[1]},{r[2]},{r[3]},\"{r[4]}\",{r[5]},{r[6]:.0f}")
        return
    print(f"{'id':>2}  {'mod':<5} {'clock':>9}  {'rll':<10} {'rs':<6} "
          f"{'cc':<4} {'rate_bps':>10}")
    for r in rows:
        print(f"{r[0]:>2}  {r[1]:<5} {r[2]:>9}  {r[3]:<10} {r[4]:<6} "
              f"{r[5]:<4} {r[6]:>10.0f}")


def _config_from_args(args, role: str) -> LinkConfig:
    values = load_scenario(args.scenario) if args.scenario else {}
    channel = scenario_channel(values) if values else ChannelParams()
    mode_id = values.get("mode_id", 0)
    sps = values.get("sps", 8)
    if getattr(args, "mode", None) is not None:
        mode_id = args.mode
    if getattr(args, "sps", None) is not None:
        sps = args.sps
    return LinkConfig(mode_id=mode_id, sps=sps, channel=channel,
                      medium=args.medium, role=role)


def _split_hostport(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise ConfigError(f"expected HOST:PORT, got {text!r}")
    return host, int(port)


def _run_node(engine: LinkEngine, serve: str | None, static_dir=None,
              on_started=None):
    stop = {"flag": False}

    def handler(_sig, _frm):
        stop["flag"] = True

    signal.signal(signal.SIGINT, handler)
    signal.signal(signal.SIGTERM, handler)
    engine.start()
    if on_started:
        on_started()
    try:
        if serve:
            from .control import run_service
            host, port = _split_hostport(serve)
            run_service(engine, host, port, static_dir)
        else:
            while not stop["flag"]:
                time.sleep(0.2)
    finally:
        engine.stop()
    return EXIT_OK


def _cmd_tx(args) -> int:
    cfg = _config_from_args(args, "tx" if args.medium != "inproc" else "both")
    engine = LinkEngine(cfg, stats_log=args.stats_log)
    return _run_node(engine, args.serve)


def _cmd_rx(args) -> int:
    cfg = _config_from_args(args, "rx" if args.medium != "inproc" else "both")
    engine = LinkEngine(cfg, stats_log=args.stats_log)
    if args.print_chat:
        def show(frame):
            if frame.kind == FrameKind.CHAT:
                print(f"[{frame.seq}] {frame.payload.decode(errors='replace')}",
                      flush=True)
        engine.add_rx_listener(show)
    return _run_node(engine, args.serve)


def _cmd_stream(args) -> int:
    cfg = _config_from_args(args, "tx" if args.medium != "inproc" else "both")
    engine = LinkEngine(cfg, stats_log=args.stats_log)

    def feeder():
        import threading

        def run():
            from .errors import BackpressureError
            from .framing import MAX_PAYLOAD
            tick = MAX_PAYLOAD * 8 / args.rate if args.rate > 0 else 0.0
            with open(args.infile, "rb") as fh:
                while True:
                    chunk = fh.read(MAX_PAYLOAD)
                    if not chunk:
                        break
                    while True:
                        try:
                            engine.tx_submit(FrameKind.STREAM, chunk)
                            break
                        except BackpressureError:
                            time.sleep(0.01)
                    if tick:
                        time.sleep(tick)
        threading.Thread(target=run, daemon=True).start()

    return _run_node(engine, args.serve, on_started=feeder)


def _cmd_chat(args) -> int:
    import asyncio
    import json

    import websockets

    host, port = _split_hostport(args.connect)
    uri = f"ws://{host}:{port}/ws"

    async def run():
        try:
            async with websockets.connect(uri) as sock:
                print(f"connected to {uri}; type to send, Ctrl-D to quit")

                async def reader():
                    async for raw in sock:
                        msg = json.loads(raw)
                        if msg.get("type") == "chat":
                            arrow = "<-" if msg.get("direction") == "rx" else "->"
                            print(f"{arrow} [{msg.get('seq')}] {msg.get('text')}",
                                  flush=True)

                async def writer():
                    loop = asyncio.get_running_loop()
                    while True:
                        line = await loop.run_in_executor(None, sys.stdin.readline)
                        if not line:
                            return
                        line = line.strip()
                        if line:
                            await sock.send(json.dumps(
                                {"type": "chat", "text": line}))

                done, pending = await asyncio.wait(
                    [asyncio.create_task(reader()),
                     asyncio.create_task(writer())],
                    return_when=asyncio.FIRST_COMPLETED)
                for t in pending:
                    t.cancel()
        except OSError as exc:
            raise TransportError(f"cannot reach {uri}: {exc}") from exc

    asyncio.run(run())
    return EXIT_OK


def _cmd_perscan(args) -> int:
    values = load_scenario(args.scenario)
    channel = scenario_channel(values)
    sps = args.sps if args.sps is not None else values.get("sps", 2)
    try:
        distances = [float(d) for d in args.distances.split(",") if d]
    except ValueError:
        raise ConfigError(f"bad distance list {args.distances!r}") from None
    rows = run_per_scan(channel, args.mode, distances, args.frames,
                        payload_len=args.payload, sps=sps)
    print("distance_m,frames,ok,hdr_fail,crc_fail,lost,per,goodput_bps")
    for r in rows:
        print(f"{r['distance_m']},{r['frames']},{r['ok']},{r['hdr_fail']},"
              f"{r['crc_fail']},{r['lost']},{r['per']:.6g},"
              f"{r['goodput_bps']:.1f}")
    if args.out:
        write_scan_csv(args.out, rows)
    return EXIT_OK


def _cmd_serve(args) -> int:
    cfg = _config_from_args(args, args.role)
    engine = LinkEngine(cfg, stats_log=args.stats_log)
    return _run_node(engine, args.bind, static_dir=args.static)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "modes":
            _print_modes(args.csv)
            return EXIT_OK
        if args.command == "tx":
            return _cmd_tx(args)
        if args.command == "rx":
            return _cmd_rx(args)
        if args.command == "chat":
            return _cmd_chat(args)
        if args.command == "stream":
            return _cmd_stream(args)
        if args.command == "perscan":
            return _cmd_perscan(args)
        if args.command == "serve":
            return _cmd_serve(args)
        parser.error(f"unknown command {args.command!r}")
    except TransportError as exc:
        print(f"silence: transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except (ConfigError, SilenceError) as exc:
        print(f"silence: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
