"""Live tether service: binary protocol over TCP plus a WebSocket JSON bridge.

One asyncio loop drives the 50 Hz session against the wall clock and fans
the downlink out to every connected client. Raw TCP clients speak the
framed binary protocol in both directions; WebSocket clients on /ws get
the JSON mirror (telemetry out, commands in, and an echo of every command
the vehicle actually applied). Frames are written best-effort: a slow
client's frames are dropped once its socket buffer backs up, never queued
without bound. Malformed input closes only the offending connection.
"""

from __future__ import annotations

import asyncio
import json
import logging
import threading

from websockets.asyncio.server import broadcast, serve as ws_serve

from . import telemetry
from .scenario import Scenario
from .session import CONTROL_DT, SimSession
from .telemetry import FrameDecoder, TelemetryFrame

DEFAULT_TCP_PORT = 7700
DEFAULT_WS_PORT = 7780
WS_PATH = "/ws"

_WRITE_BUFFER_LIMIT = 1 << 16  # bytes of unsent frames before we drop for a client

log = logging.getLogger(__name__)


class TetherServer:
    """Serves one simulation session until shutdown is requested."""

    def __init__(
        self,
        scenario: Scenario | None = None,
        *,
        host: str = "127.0.0.1",
        tcp_port: int = DEFAULT_TCP_PORT,
        ws_port: int = DEFAULT_WS_PORT,
        realtime: bool = True,
    ):
        if scenario is not None:
            self.session = SimSession(
                params=scenario.params,
                noise=scenario.noise,
                field=scenario.turbidity_field,
                seed=scenario.seed,
                link=scenario.link,
                initial_state=scenario.initial,
                alpha=scenario.alpha,
            )
            self._script = list(scenario.script)
        else:
            self.session = SimSession()
            self._script = []
        self.host = host
        self.tcp_port = tcp_port  # updated to the bound port once serving
        self.ws_port = ws_port
        self.realtime = realtime
        self.ticks_run = 0

        self._commands: asyncio.Queue[telemetry.CommandMessage] = asyncio.Queue()
        self._raw_writers: set[asyncio.StreamWriter] = set()
        self._ws_connections: set = set()
        self._stop = asyncio.Event()
        self._loop: asyncio.AbstractEventLoop | None = None
        self._ready = asyncio.Event()
        self.started = threading.Event()  # set once both listeners are bound

    # -- lifecycle ---------------------------------------------------------

    async def serve_forever(self) -> None:
        """Bind both listeners and run the session loop until shutdown."""
        self._loop = asyncio.get_running_loop()
        tcp_server = await asyncio.start_server(self._handle_tcp, self.host, self.tcp_port)
        self.tcp_port = tcp_server.sockets[0].getsockname()[1]
        async with tcp_server:
            async with ws_serve(self._handle_ws, self.host, self.ws_port) as ws_server:
                self.ws_port = ws_server.sockets[0].getsockname()[1]
                self._ready.set()
                self.started.set()
                log.info("serving tcp=%d ws=%d", self.tcp_port, self.ws_port)
                try:
                    await self._run_loop()
                finally:
                    for writer in list(self._raw_writers):
                        writer.close()

    async def wait_ready(self) -> None:
        await self._ready.wait()

    def request_shutdown(self) -> None:
        """Stop the loop; safe to call from another thread."""
        if self._loop is None:
            return
        self._loop.call_soon_threadsafe(self._stop.set)

    # -- session loop ------------------------------------------------------

    async def _run_loop(self) -> None:
        loop = asyncio.get_running_loop()
        start = loop.time()
        next_cmd = 0
        while not self._stop.is_set():
            if self.realtime:
                target = start + self.session.tick_index * CONTROL_DT
                delay = target - loop.time()
                if delay > 0:
                    try:
                        await asyncio.wait_for(self._stop.wait(), timeout=delay)
                        break
                    except asyncio.TimeoutError:
                        pass
            else:
                await asyncio.sleep(0)

            now = self.session.time
            while next_cmd < len(self._script) and self._script[next_cmd][0] <= now + 1e-9:
                self.session.submit_command(self._script[next_cmd][1], now=self._script[next_cmd][0])
                next_cmd += 1
            while not self._commands.empty():
                self.session.submit_command(self._commands.get_nowait(), now=now)

            result = self.session.tick()
            self.ticks_run += 1

            for chunk in result.downlink_chunks:
                self._broadcast_raw(chunk)
            if self._ws_connections:
                for frame in result.surface_frames:
                    broadcast(self._ws_connections, json.dumps(telemetry.telemetry_to_json(frame)))
                for cmd in result.applied_commands:
                    broadcast(self._ws_connections, json.dumps(telemetry.command_to_json(cmd)))

    def _broadcast_raw(self, chunk: bytes) -> None:
        for writer in list(self._raw_writers):
            transport = writer.transport
            if transport.is_closing():
                self._raw_writers.discard(writer)
                continue
            if transport.get_write_buffer_size() > _WRITE_BUFFER_LIMIT:
                continue  # drop the frame for this laggard, never buffer unboundedly
            writer.write(chunk)

    # -- raw protocol clients ------------------------------------------------

    async def _handle_tcp(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        peer = writer.get_extra_info("peername")
        decoder = FrameDecoder()
        self._raw_writers.add(writer)
        try:
            while True:
                data = await reader.read(4096)
                if not data:
                    break
                messages, errors = decoder.feed(data)
                if errors or any(isinstance(m, TelemetryFrame) for m in messages):
                    log.warning("closing raw client %s: malformed input", peer)
                    break
                for msg in messages:
                    if isinstance(msg, telemetry.EventMessage):
                        continue
                    self._commands.put_nowait(msg)
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            self._raw_writers.discard(writer)
            writer.close()

    # -- websocket bridge ------------------------------------------------------

    async def _handle_ws(self, connection) -> None:
        path = connection.request.path.split("?", 1)[0]
        if path != WS_PATH:
            await connection.close(code=1008, reason=f"connect to {WS_PATH}")
            return
        self._ws_connections.add(connection)
        try:
            async for raw in connection:
                try:
                    obj = json.loads(raw)
                    if not isinstance(obj, dict) or obj.get("type") != "command":
                        raise ValueError("expected a command object")
                    msg = telemetry.command_from_json(obj)
                except (ValueError, TypeError) as exc:
                    log.warning("closing ws client: %s", exc)
                    await connection.close(code=1008, reason="malformed command")
                    break
                self._commands.put_nowait(msg)
        except Exception:  # connection-level failures must not kill the server
            pass
        finally:
            self._ws_connections.discard(connection)


def serve(
    scenario: Scenario | None = None,
    *,
    host: str = "127.0.0.1",
    tcp_port: int = DEFAULT_TCP_PORT,
    ws_port: int = DEFAULT_WS_PORT,
    realtime: bool = True,
) -> None:
    """Blocking entry point: serve until interrupted."""
    server = TetherServer(
        scenario, host=host, tcp_port=tcp_port, ws_port=ws_port, realtime=realtime
    )
    try:
        asyncio.run(server.serve_forever())
    except KeyboardInterrupt:
        pass
