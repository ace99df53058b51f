#!/usr/bin/env python3
"""Anatomy of the tether framing: envelope, CRC, corruption, resync.

Walks through encoding a command, corrupting it, and watching the
stream decoder reject the damage and resynchronize on the next frame.
"""

from rovsim import telemetry as tm


def dump(label, data):
    print(f"{label:24s} {data.hex(' ')}")


def main():
    ping = tm.Ping(seq=0)
    frame = tm.encode_frame(ping)
    dump("ping frame", frame)
    print("  sync AA 55 | length 05 | type 02 (command) | seq u32 | kind 04 | crc16 LE")

    setpoints = tm.command_from_json(
        {"kind": "set_setpoints", "yaw_ref": 0.5236, "depth_ref": 1.0, "surge_duty": 0.25}, seq=1
    )
    dump("set_setpoints frame", tm.encode_frame(setpoints))
    print(f"  yaw_ref quantized to {setpoints.yaw_ref_crad} centirad, depth to {setpoints.depth_ref_mm} mm")

    # flip one payload bit: the CRC catches it and the decoder resyncs
    corrupted = bytearray(tm.encode_frame(setpoints))
    corrupted[6] ^= 0x04
    stream = bytes(corrupted) + frame
    dump("corrupted + ping", stream)
    messages, remainder, errors = tm.decode_stream(stream)
    print(f"  decoded: {messages}")
    print(f"  errors:  {[f'@{e.offset}: {e.reason}' for e in errors]}")
    print(f"  remainder: {remainder!r}")

    # split delivery: a stateful decoder holds the partial tail
    decoder = tm.FrameDecoder()
    first, second = frame[:6], frame[6:]
    print("\nchunked delivery:")
    print(f"  feed({first.hex(' ')}) -> {decoder.feed(first)[0]}")
    print(f"  feed({second.hex(' ')}) -> {decoder.feed(second)[0]}")


if __name__ == "__main__":
    main()
