"""HTTP/WebSocket control service: the backend the live console talks to.

Endpoints (JSON everywhere, schema in API.md):

  GET   /config   current LinkConfig
  PATCH /config   apply a config patch atomically; 400 + reason on a bad one
  GET   /modes    the nine-row PHY mode table
  GET   /stats    one LinkStats snapshot
  WS    /ws       server pushes {"type": "stats"} every 500 ms and
                  {"type": "chat"} for every received chat frame; clients
                  send {"type": "chat", "text": ...} to transmit

The service owns no state beyond its subscriber list; everything lives in
the engine.
"""

from __future__ import annotations

import asyncio
import json
import time
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .errors import BackpressureError, ConfigError, SilenceError, SizeError
from .framing import FrameKind, MacFrame
from .link_engine import LinkEngine
from .phy_modes import data_rate, mode_table

STATS_PUSH_INTERVAL_S = 0.5


def mode_rows() -> list[dict]:
    rows = []
    for m in mode_table():
        rows.append({
            "id": m.id, "modulation": m.modulation,
            "clock_hz": m.optical_clock_hz, "rll": m.rll,
            "rs": list(m.rs) if m.rs else None,
            "cc": str(m.cc_rate) if m.cc_rate else None,
            "rate_bps": data_rate(m),
        })
    return rows


class _ChatFanout:
    """Bridges engine RX callbacks into every websocket's asyncio queue."""

    def __init__(self):
        self._queues: set[asyncio.Queue] = set()
        self._loop: asyncio.AbstractEventLoop | None = None

    def attach(self, loop: asyncio.AbstractEventLoop):
        self._loop = loop

    def register(self) -> asyncio.Queue:
        q: asyncio.Queue = asyncio.Queue()
        self._queues.add(q)
        return q

    def unregister(self, q: asyncio.Queue):
        self._queues.discard(q)

    def on_frame(self, frame: MacFrame):
        if self._loop is None or frame.kind != FrameKind.CHAT:
            return
        msg = {
            "type": "chat", "direction": "rx", "seq": frame.seq,
            "text": frame.payload.decode("utf-8", errors="replace"),
            "time": time.time(),
        }
        def _fan():
            for q in list(self._queues):
                q.put_nowait(msg)
        self._loop.call_soon_threadsafe(_fan)


def create_app(engine: LinkEngine, static_dir: str | None = None) -> FastAPI:
    fanout = _ChatFanout()
    engine.add_rx_listener(fanout.on_frame)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        fanout.attach(asyncio.get_running_loop())
        yield

    app = FastAPI(title="silence control service", lifespan=lifespan)

    @app.get("/config")
    def get_config():
        return engine.config.as_dict()

    @app.patch("/config")
    async def patch_config(patch: dict):
        try:
            applied = engine.reconfigure(patch)
        except (ConfigError, SilenceError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        return applied.as_dict()

    @app.get("/modes")
    def get_modes():
        return mode_rows()

    @app.get("/stats")
    def get_stats():
        snap = engine.stats_snapshot().as_dict()
        snap["time"] = time.time()
        return snap

    @app.websocket("/ws")
    async def ws_endpoint(sock: WebSocket):
        await sock.accept()
        chat_q = fanout.register()

        async def pump_stats():
            while True:
                snap = engine.stats_snapshot().as_dict()
                snap["time"] = time.time()
                await sock.send_text(json.dumps({"type": "stats", **snap}))
                await asyncio.sleep(STATS_PUSH_INTERVAL_S)

        async def pump_chat():
            while True:
                msg = await chat_q.get()
                await sock.send_text(json.dumps(msg))

        async def pump_client():
            while True:
                raw = await sock.receive_text()
                try:
                    msg = json.loads(raw)
                except ValueError:
                    await sock.send_text(json.dumps(
                        {"type": "error", "error": "not JSON"}))
                    continue
                if msg.get("type") == "chat":
                    text = str(msg.get("text", ""))
                    if not text:
                        continue
                    try:
                        seq = engine.tx_submit(FrameKind.CHAT, text.encode())
                        await sock.send_text(json.dumps({
                            "type": "chat", "direction": "tx", "seq": seq,
                            "text": text, "time": time.time()}))
                    except (BackpressureError, ConfigError, SizeError) as exc:
                        await sock.send_text(json.dumps(
                            {"type": "error", "error": str(exc)}))

        tasks = [asyncio.create_task(t())
                 for t in (pump_stats, pump_chat, pump_client)]
        try:
            await asyncio.wait(tasks, return_when=asyncio.FIRST_EXCEPTION)
        except WebSocketDisconnect:
            pass
        finally:
            fanout.unregister(chat_q)
            for t in tasks:
                t.cancel()

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="console")
    return app


def run_service(engine: LinkEngine, host: str, port: int,
                static_dir: str | None = None):
    import uvicorn

    from .errors import TransportError

    app = create_app(engine, static_dir)
    config = uvicorn.Config(app, host=host, port=port, log_level="warning")
    server = uvicorn.Server(config)
    try:
        server.run()
    except (OSError, SystemExit) as exc:
        raise TransportError(f"cannot serve on {host}:{port}: {exc}") from exc
