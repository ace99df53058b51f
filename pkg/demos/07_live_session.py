#!/usr/bin/env python3
"""Drive a live serve session the way the ground station does.

Starts the tether service in-process, watches telemetry over the
WebSocket bridge, sends a depth setpoint, and waits for the echo that
confirms the vehicle applied it. This is the loop the browser dashboard
automates.
"""

import asyncio
import json
import threading

from websockets.sync.client import connect

from rovsim.server import TetherServer


def main():
    server = TetherServer(tcp_port=0, ws_port=0)
    thread = threading.Thread(
        target=lambda: asyncio.run(server.serve_forever()), daemon=True
    )
    thread.start()
    server.started.wait(timeout=5.0)

    uri = f"ws://127.0.0.1:{server.ws_port}/ws"
    print(f"connected to {uri}")
    with connect(uri, open_timeout=5) as ws:
        doc = json.loads(ws.recv(timeout=5))
        print(f"first frame: seq {doc['seq']}, mode {doc['mode']}, depth {doc['depth_est']:.2f} m")

        print("sending: closed_loop + depth setpoint 1.0 m")
        ws.send(json.dumps({"type": "command", "kind": "set_mode", "mode": "closed_loop", "seq": 1}))
        ws.send(json.dumps({
            "type": "command", "kind": "set_setpoints", "seq": 2,
            "yaw_ref": 0.0, "depth_ref": 1.0, "surge_duty": 0.0,
        }))

        confirmed = False
        frames = 0
        while frames < 150:  # ~3 s of telemetry
            doc = json.loads(ws.recv(timeout=5))
            if doc["type"] == "command" and doc["seq"] == 2:
                print(f"echo confirms setpoint applied: depth_ref {doc['depth_ref']} m")
                confirmed = True
            if doc["type"] == "telemetry":
                frames += 1
                if frames % 50 == 0:
                    print(f"t={doc['t']:.1f}s depth_est={doc['depth_est']:.3f} m "
                          f"vertical duty {doc['duties']['vertical']:+.2f}")
        print("command confirmed" if confirmed else "no confirmation (unexpected)")

    server.request_shutdown()
    thread.join(timeout=5)


if __name__ == "__main__":
    main()
