"""Live service tests: raw TCP protocol, WS JSON bridge, command echo."""

import asyncio
import json
import socket
import threading
import time

import pytest
from websockets.sync.client import connect as ws_connect_sync

from rovsim import telemetry as tm
from rovsim.server import TetherServer
from rovsim.scenario import get_scenario


class ServerFixture:
    """Runs a TetherServer on ephemeral ports in a background thread."""

    def __init__(self, scenario=None):
        self.server = TetherServer(scenario, tcp_port=0, ws_port=0)
        self._thread = threading.Thread(target=self._run, daemon=True)

    def _run(self):
        asyncio.run(self.server.serve_forever())

    def __enter__(self):
        self._thread.start()
        assert self.server.started.wait(timeout=5.0), "server did not start"
        return self

    def __exit__(self, *exc):
        self.server.request_shutdown()
        self._thread.join(timeout=5.0)


def read_frames(sock, decoder, want, timeout=5.0):
    """Collect `want` telemetry frames from a raw socket."""
    frames = []
    deadline = time.monotonic() + timeout
    sock.settimeout(0.5)
    while len(frames) < want and time.monotonic() < deadline:
        try:
            data = sock.recv(4096)
        except socket.timeout:
            continue
        if not data:
            break
        messages, _ = decoder.feed(data)
        frames.extend(m for m in messages if isinstance(m, tm.TelemetryFrame))
    assert len(frames) >= want, f"only {len(frames)} frames within {timeout}s"
    return frames


def test_raw_protocol_streams_frames_and_accepts_commands():
    with ServerFixture() as fx:
        with socket.create_connection(("127.0.0.1", fx.server.tcp_port), timeout=5) as sock:
            decoder = tm.FrameDecoder()
            frames = read_frames(sock, decoder, 3)
            assert frames[1].seq == frames[0].seq + 1
            assert frames[0].yaw_kp_milli == 800  # default gains echoed

            sock.sendall(tm.encode_frame(tm.SetGains(seq=1, axis=0, kp_milli=1500, ki_milli=200)))
            deadline = time.monotonic() + 5.0
            changed = None
            while time.monotonic() < deadline:
                latest = read_frames(sock, decoder, 1)
                if latest[-1].yaw_kp_milli == 1500:
                    changed = latest[-1]
                    break
            assert changed is not None, "gain change never echoed"


def test_echo_latency_within_two_ticks():
    with ServerFixture() as fx:
        with socket.create_connection(("127.0.0.1", fx.server.tcp_port), timeout=5) as sock:
            decoder = tm.FrameDecoder()
            before = read_frames(sock, decoder, 1)[-1]
            sock.sendall(tm.encode_frame(tm.SetGains(seq=2, axis=1, kp_milli=777, ki_milli=88)))
            send_seq = before.seq
            frames = read_frames(sock, decoder, 8)
            echo = next(f for f in frames if f.depth_kp_milli == 777)
            # command lands between ticks; allow the frame in flight plus two
            assert echo.seq - send_seq <= 3


def test_malformed_raw_input_closes_only_that_connection():
    with ServerFixture() as fx:
        bad = socket.create_connection(("127.0.0.1", fx.server.tcp_port), timeout=5)
        good = socket.create_connection(("127.0.0.1", fx.server.tcp_port), timeout=5)
        try:
            bad.sendall(b"\xaa\x55\x05\x02garbage-that-fails-crc")
            # the bad socket should be closed by the server shortly
            bad.settimeout(2.0)
            deadline = time.monotonic() + 5.0
            closed = False
            while time.monotonic() < deadline:
                try:
                    if bad.recv(4096) == b"":
                        closed = True
                        break
                except socket.timeout:
                    break  # keep draining until server closes; retry below
                except ConnectionError:
                    closed = True
                    break
            if not closed:
                # server stops sending to it after close; sending again errors
                try:
                    for _ in range(20):
                        bad.sendall(b"x" * 512)
                        time.sleep(0.05)
                except (BrokenPipeError, ConnectionResetError):
                    closed = True
            assert closed, "malformed client was not disconnected"
            read_frames(good, tm.FrameDecoder(), 2)  # the good client still streams
        finally:
            bad.close()
            good.close()


def test_ws_bridge_telemetry_commands_and_mirror():
    with ServerFixture() as fx:
        uri = f"ws://127.0.0.1:{fx.server.ws_port}/ws"
        with ws_connect_sync(uri, open_timeout=5) as ws:
            doc = json.loads(ws.recv(timeout=5))
            assert doc["type"] == "telemetry"
            assert doc["mode"] == "manual"
            assert doc["yaw_gains"] == {"kp": 0.8, "ki": 0.1}

            ws.send(json.dumps({
                "type": "command", "kind": "set_setpoints", "seq": 9,
                "yaw_ref": 0.5236, "depth_ref": 1.0, "surge_duty": 0.0,
            }))
            mirror = None
            deadline = time.monotonic() + 5.0
            while time.monotonic() < deadline:
                doc = json.loads(ws.recv(timeout=5))
                if doc["type"] == "command":
                    mirror = doc
                    break
            assert mirror is not None, "command mirror never arrived"
            assert mirror["kind"] == "set_setpoints"
            assert mirror["seq"] == 9
            assert mirror["yaw_ref"] == pytest.approx(0.52)  # applied, quantized
            assert mirror["depth_ref"] == pytest.approx(1.0)


def test_ws_rejects_wrong_path_and_bad_json():
    with ServerFixture() as fx:
        with ws_connect_sync(f"ws://127.0.0.1:{fx.server.ws_port}/nope", open_timeout=5) as ws:
            with pytest.raises(Exception):
                while True:
                    ws.recv(timeout=2)
        # malformed JSON closes only that connection
        with ws_connect_sync(f"ws://127.0.0.1:{fx.server.ws_port}/ws", open_timeout=5) as ws:
            ws.send("{broken json")
            with pytest.raises(Exception):
                while True:
                    ws.recv(timeout=2)
        # a fresh connection still works
        with ws_connect_sync(f"ws://127.0.0.1:{fx.server.ws_port}/ws", open_timeout=5) as ws:
            doc = json.loads(ws.recv(timeout=5))
            assert doc["type"] == "telemetry"


def test_session_advances_with_no_clients():
    with ServerFixture() as fx:
        time.sleep(0.5)
        assert fx.server.ticks_run >= 10


def test_serve_scenario_script_executes():
    with ServerFixture(get_scenario("yaw_step_30deg")) as fx:
        with ws_connect_sync(f"ws://127.0.0.1:{fx.server.ws_port}/ws", open_timeout=5) as ws:
            saw_closed_loop = False
            deadline = time.monotonic() + 5.0
            while time.monotonic() < deadline and not saw_closed_loop:
                doc = json.loads(ws.recv(timeout=5))
                if doc["type"] == "telemetry" and doc["mode"] == "closed_loop":
                    saw_closed_loop = True
            assert saw_closed_loop
