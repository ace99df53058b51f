"""Tether wire protocol: framed binary messages plus their JSON mirror.

Envelope (byte order on the wire):

    0xAA 0x55 | length u8 | msg_type u8 | payload | crc16 u16 LE

length counts payload bytes only (max 64). The CRC is CRC-16/CCITT-FALSE
computed over msg_type, then length, then the payload. All multi-byte
payload integers are little-endian.

msg_type 0x01 telemetry, 0x02 command, 0x03 log/event text.

Physical quantities travel as fixed point (round to nearest, ties away
from zero): centiradians for angles, millimetres for depth, per-mille for
duties, NTU*10 for turbidity, gains * 1000. Message dataclasses store the
raw fixed-point integers so encode/decode is an exact identity; the
*_to_json helpers expose SI floats for the dashboard bridge.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

SYNC = b"\xaa\x55"
MSG_TELEMETRY = 0x01
MSG_COMMAND = 0x02
MSG_EVENT = 0x03
MAX_PAYLOAD = 64

# Fixed-point scales (SI units -> wire integers).
SCALE_ANGLE = 100.0  # rad -> centirad
SCALE_DEPTH = 1000.0  # m -> mm
SCALE_DUTY = 1000.0  # duty -> per-mille
SCALE_TURBIDITY = 10.0  # NTU -> deci-NTU
SCALE_GAIN = 1000.0

FLAG_SENSOR_FAULT = 0x01
FLAG_SATURATED = 0x02


class EncodingError(ValueError):
    """A message field fell outside its encodable range."""


@dataclass(frozen=True)
class DecodeError:
    """One rejected stretch of input: byte offset plus reason."""

    offset: int
    reason: str


def crc16_ccitt_false(data: bytes) -> int:
    """CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection."""
    crc = 0xFFFF
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = ((crc << 1) ^ 0x1021) & 0xFFFF
            else:
                crc = (crc << 1) & 0xFFFF
    return crc


def to_fixed(value: float, scale: float) -> int:
    """Quantize an SI value: round to nearest, ties away from zero."""
    if not math.isfinite(value):
        raise EncodingError(f"cannot encode non-finite value {value}")
    scaled = value * scale
    if scaled >= 0:
        return int(math.floor(scaled + 0.5))
    return int(math.ceil(scaled - 0.5))


def from_fixed(raw: int, scale: float) -> float:
    return raw / scale


def _check(name: str, value: int, lo: int, hi: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise EncodingError(f"{name} must be an integer, got {value!r}")
    if not lo <= value <= hi:
        raise EncodingError(f"{name}={value} outside encodable range [{lo}, {hi}]")
    return value


_U8 = (0, 0xFF)
_U16 = (0, 0xFFFF)
_U32 = (0, 0xFFFFFFFF)
_I16 = (-0x8000, 0x7FFF)
_I32 = (-0x80000000, 0x7FFFFFFF)


# --------------------------------------------------------------------------
# Message types


_TELEMETRY_STRUCT = struct.Struct("<IIiiHhhhBiiiiB")


@dataclass(frozen=True)
class TelemetryFrame:
    """One vehicle->surface status report (fixed-point fields)."""

    seq: int
    t_ms: int
    yaw_est_crad: int
    depth_est_mm: int
    turbidity_dntu: int
    left_pm: int
    right_pm: int
    vertical_pm: int
    mode: int
    yaw_kp_milli: int
    yaw_ki_milli: int
    depth_kp_milli: int
    depth_ki_milli: int
    flags: int

    @classmethod
    def from_si(
        cls,
        seq: int,
        t: float,
        yaw_est: float,
        depth_est: float,
        turbidity: float,
        duties: tuple[float, float, float],
        mode: int,
        yaw_gains: tuple[float, float],
        depth_gains: tuple[float, float],
        sensor_fault: bool = False,
        saturated: bool = False,
    ) -> "TelemetryFrame":
        turb = min(_U16[1], max(0, to_fixed(turbidity, SCALE_TURBIDITY)))  # clamped, not an error
        flags = (FLAG_SENSOR_FAULT if sensor_fault else 0) | (FLAG_SATURATED if saturated else 0)
        return cls(
            seq=seq,
            t_ms=to_fixed(t, 1000.0),
            yaw_est_crad=to_fixed(yaw_est, SCALE_ANGLE),
            depth_est_mm=to_fixed(depth_est, SCALE_DEPTH),
            turbidity_dntu=turb,
            left_pm=to_fixed(duties[0], SCALE_DUTY),
            right_pm=to_fixed(duties[1], SCALE_DUTY),
            vertical_pm=to_fixed(duties[2], SCALE_DUTY),
            mode=int(mode),
            yaw_kp_milli=to_fixed(yaw_gains[0], SCALE_GAIN),
            yaw_ki_milli=to_fixed(yaw_gains[1], SCALE_GAIN),
            depth_kp_milli=to_fixed(depth_gains[0], SCALE_GAIN),
            depth_ki_milli=to_fixed(depth_gains[1], SCALE_GAIN),
            flags=flags,
        )


@dataclass(frozen=True)
class SetMode:
    seq: int
    mode: int  # Mode value: 0 manual, 1 closed_loop

    kind = 0x00
    kind_name = "set_mode"


@dataclass(frozen=True)
class SetSetpoints:
    seq: int
    yaw_ref_crad: int
    depth_ref_mm: int
    surge_pm: int

    kind = 0x01
    kind_name = "set_setpoints"


@dataclass(frozen=True)
class SetGains:
    seq: int
    axis: int  # 0 yaw PI, 1 depth PI, 2 heading-filter alpha (kp slot, x1000)
    kp_milli: int
    ki_milli: int

    kind = 0x02
    kind_name = "set_gains"


@dataclass(frozen=True)
class ManualDuties:
    seq: int
    left_pm: int
    right_pm: int
    vertical_pm: int

    kind = 0x03
    kind_name = "manual_duties"


@dataclass(frozen=True)
class Ping:
    seq: int

    kind = 0x04
    kind_name = "ping"


CommandMessage = SetMode | SetSetpoints | SetGains | ManualDuties | Ping

_COMMAND_KINDS = {cls.kind: cls for cls in (SetMode, SetSetpoints, SetGains, ManualDuties, Ping)}
_COMMAND_NAMES = {cls.kind_name: cls for cls in _COMMAND_KINDS.values()}


@dataclass(frozen=True)
class EventMessage:
    """Free-text log/event line from the vehicle."""

    seq: int
    text: str


Message = TelemetryFrame | SetMode | SetSetpoints | SetGains | ManualDuties | Ping | EventMessage


# --------------------------------------------------------------------------
# Payload encode/decode


def _encode_payload(msg: Message) -> tuple[int, bytes]:
    if isinstance(msg, TelemetryFrame):
        payload = _TELEMETRY_STRUCT.pack(
            _check("seq", msg.seq, *_U32),
            _check("t_ms", msg.t_ms, *_U32),
            _check("yaw_est_crad", msg.yaw_est_crad, *_I32),
            _check("depth_est_mm", msg.depth_est_mm, *_I32),
            _check("turbidity_dntu", msg.turbidity_dntu, *_U16),
            _check("left_pm", msg.left_pm, *_I16),
            _check("right_pm", msg.right_pm, *_I16),
            _check("vertical_pm", msg.vertical_pm, *_I16),
            _check("mode", msg.mode, *_U8),
            _check("yaw_kp_milli", msg.yaw_kp_milli, *_I32),
            _check("yaw_ki_milli", msg.yaw_ki_milli, *_I32),
            _check("depth_kp_milli", msg.depth_kp_milli, *_I32),
            _check("depth_ki_milli", msg.depth_ki_milli, *_I32),
            _check("flags", msg.flags, *_U8),
        )
        return MSG_TELEMETRY, payload
    if isinstance(msg, SetMode):
        payload = struct.pack(
            "<IBB", _check("seq", msg.seq, *_U32), msg.kind, _check("mode", msg.mode, *_U8)
        )
        return MSG_COMMAND, payload
    if isinstance(msg, SetSetpoints):
        payload = struct.pack(
            "<IBiih",
            _check("seq", msg.seq, *_U32),
            msg.kind,
            _check("yaw_ref_crad", msg.yaw_ref_crad, *_I32),
            _check("depth_ref_mm", msg.depth_ref_mm, *_I32),
            _check("surge_pm", msg.surge_pm, *_I16),
        )
        return MSG_COMMAND, payload
    if isinstance(msg, SetGains):
        payload = struct.pack(
            "<IBBii",
            _check("seq", msg.seq, *_U32),
            msg.kind,
            _check("axis", msg.axis, 0, 2),
            _check("kp_milli", msg.kp_milli, *_I32),
            _check("ki_milli", msg.ki_milli, *_I32),
        )
        return MSG_COMMAND, payload
    if isinstance(msg, ManualDuties):
        payload = struct.pack(
            "<IBhhh",
            _check("seq", msg.seq, *_U32),
            msg.kind,
            _check("left_pm", msg.left_pm, *_I16),
            _check("right_pm", msg.right_pm, *_I16),
            _check("vertical_pm", msg.vertical_pm, *_I16),
        )
        return MSG_COMMAND, payload
    if isinstance(msg, Ping):
        payload = struct.pack("<IB", _check("seq", msg.seq, *_U32), msg.kind)
        return MSG_COMMAND, payload
    if isinstance(msg, EventMessage):
        text = msg.text.encode("utf-8")
        if len(text) > MAX_PAYLOAD - 4:
            raise EncodingError(f"text too long to encode ({len(text)} bytes)")
        payload = struct.pack("<I", _check("seq", msg.seq, *_U32)) + text
        return MSG_EVENT, payload
    raise EncodingError(f"cannot encode message of type {type(msg).__name__}")


def encode_frame(msg: Message) -> bytes:
    """Serialize one message into its wire envelope."""
    msg_type, payload = _encode_payload(msg)
    if len(payload) > MAX_PAYLOAD:
        raise EncodingError(f"payload exceeds {MAX_PAYLOAD} bytes ({len(payload)})")
    crc = crc16_ccitt_false(bytes([msg_type, len(payload)]) + payload)
    return SYNC + bytes([len(payload), msg_type]) + payload + crc.to_bytes(2, "little")


def _parse_command(payload: bytes) -> CommandMessage:
    if len(payload) < 5:
        raise ValueError(f"command payload too short ({len(payload)} bytes)")
    seq = int.from_bytes(payload[0:4], "little")
    kind = payload[4]
    cls = _COMMAND_KINDS.get(kind)
    if cls is None:
        raise ValueError(f"unknown command kind 0x{kind:02x}")
    body = payload[5:]
    if cls is SetMode:
        (mode,) = struct.unpack("<B", body)
        return SetMode(seq=seq, mode=mode)
    if cls is SetSetpoints:
        yaw, depth, surge = struct.unpack("<iih", body)
        return SetSetpoints(seq=seq, yaw_ref_crad=yaw, depth_ref_mm=depth, surge_pm=surge)
    if cls is SetGains:
        axis, kp, ki = struct.unpack("<Bii", body)
        if axis > 2:
            raise ValueError(f"bad gain axis {axis}")
        return SetGains(seq=seq, axis=axis, kp_milli=kp, ki_milli=ki)
    if cls is ManualDuties:
        left, right, vert = struct.unpack("<hhh", body)
        return ManualDuties(seq=seq, left_pm=left, right_pm=right, vertical_pm=vert)
    if body:
        raise ValueError(f"trailing bytes in ping payload ({len(body)})")
    return Ping(seq=seq)


def _parse_payload(msg_type: int, payload: bytes) -> Message:
    if msg_type == MSG_TELEMETRY:
        fields = _TELEMETRY_STRUCT.unpack(payload)
        return TelemetryFrame(*fields)
    if msg_type == MSG_COMMAND:
        return _parse_command(payload)
    if msg_type == MSG_EVENT:
        if len(payload) < 4:
            raise ValueError("event payload too short")
        return EventMessage(seq=int.from_bytes(payload[0:4], "little"), text=payload[4:].decode("utf-8"))
    raise ValueError(f"unknown msg_type 0x{msg_type:02x}")


def decode_stream(buffer: bytes) -> tuple[list[Message], bytes, list[DecodeError]]:
    """Extract all complete frames from a byte buffer.

    Resynchronizes on the 0xAA 0x55 sync; a frame failing its CRC is
    reported and scanning resumes one byte past that sync so overlapping
    true frames are still found. A partial trailing frame comes back as
    the remainder for the caller to prepend to the next read.
    """
    messages: list[Message] = []
    errors: list[DecodeError] = []
    i = 0
    n = len(buffer)
    resyncing = False  # suppress garbage reports while recovering from a bad frame
    while True:
        start = buffer.find(SYNC, i)
        if start < 0:
            # No sync ahead; an unconsumed trailing 0xAA could begin one.
            tail = n - 1 if n - 1 >= i and buffer[n - 1] == SYNC[0] else n
            return messages, bytes(buffer[tail:]), errors
        if start > i and not resyncing:
            errors.append(DecodeError(offset=i, reason=f"skipped {start - i} garbage bytes"))
        if start + 4 > n:
            return messages, bytes(buffer[start:]), errors
        length = buffer[start + 2]
        msg_type = buffer[start + 3]
        if length > MAX_PAYLOAD:
            errors.append(DecodeError(offset=start, reason=f"length {length} exceeds max payload"))
            i = start + 1
            resyncing = True
            continue
        end = start + 4 + length + 2
        if end > n:
            return messages, bytes(buffer[start:]), errors
        payload = bytes(buffer[start + 4 : start + 4 + length])
        received_crc = int.from_bytes(buffer[end - 2 : end], "little")
        expected_crc = crc16_ccitt_false(bytes([msg_type, length]) + payload)
        if received_crc != expected_crc:
            errors.append(DecodeError(offset=start, reason="crc mismatch"))
            i = start + 1
            resyncing = True
            continue
        try:
            messages.append(_parse_payload(msg_type, payload))
        except (ValueError, struct.error, UnicodeDecodeError) as exc:
            errors.append(DecodeError(offset=start, reason=str(exc)))
        i = end
        resyncing = False
    # unreachable


class FrameDecoder:
    """Stateful wrapper around decode_stream for chunked input."""

    def __init__(self) -> None:
        self._buffer = b""

    def feed(self, data: bytes) -> tuple[list[Message], list[DecodeError]]:
        messages, remainder, errors = decode_stream(self._buffer + data)
        self._buffer = remainder
        return messages, errors


# --------------------------------------------------------------------------
# JSON mirror (dashboard bridge)

_MODE_NAMES = {0: "manual", 1: "closed_loop"}
_MODE_VALUES = {name: value for value, name in _MODE_NAMES.items()}
_GAIN_AXIS_NAMES = {0: "yaw", 1: "depth", 2: "alpha"}
_GAIN_AXIS_VALUES = {name: value for value, name in _GAIN_AXIS_NAMES.items()}


def telemetry_to_json(frame: TelemetryFrame) -> dict:
    """SI-float JSON view of a telemetry frame; names match the domain type."""
    return {
        "type": "telemetry",
        "seq": frame.seq,
        "t": frame.t_ms / 1000.0,
        "yaw_est": from_fixed(frame.yaw_est_crad, SCALE_ANGLE),
        "depth_est": from_fixed(frame.depth_est_mm, SCALE_DEPTH),
        "turbidity": from_fixed(frame.turbidity_dntu, SCALE_TURBIDITY),
        "duties": {
            "left": from_fixed(frame.left_pm, SCALE_DUTY),
            "right": from_fixed(frame.right_pm, SCALE_DUTY),
            "vertical": from_fixed(frame.vertical_pm, SCALE_DUTY),
        },
        "mode": _MODE_NAMES.get(frame.mode, str(frame.mode)),
        "yaw_gains": {
            "kp": from_fixed(frame.yaw_kp_milli, SCALE_GAIN),
            "ki": from_fixed(frame.yaw_ki_milli, SCALE_GAIN),
        },
        "depth_gains": {
            "kp": from_fixed(frame.depth_kp_milli, SCALE_GAIN),
            "ki": from_fixed(frame.depth_ki_milli, SCALE_GAIN),
        },
        "flags": {
            "sensor_fault": bool(frame.flags & FLAG_SENSOR_FAULT),
            "saturated": bool(frame.flags & FLAG_SATURATED),
        },
    }


def command_to_json(msg: CommandMessage) -> dict:
    """SI-float JSON view of a command (used for the WS command mirror)."""
    out: dict = {"type": "command", "seq": msg.seq, "kind": msg.kind_name}
    if isinstance(msg, SetMode):
        out["mode"] = _MODE_NAMES.get(msg.mode, str(msg.mode))
    elif isinstance(msg, SetSetpoints):
        out["yaw_ref"] = from_fixed(msg.yaw_ref_crad, SCALE_ANGLE)
        out["depth_ref"] = from_fixed(msg.depth_ref_mm, SCALE_DEPTH)
        out["surge_duty"] = from_fixed(msg.surge_pm, SCALE_DUTY)
    elif isinstance(msg, SetGains):
        out["axis"] = _GAIN_AXIS_NAMES[msg.axis]
        out["kp"] = from_fixed(msg.kp_milli, SCALE_GAIN)
        out["ki"] = from_fixed(msg.ki_milli, SCALE_GAIN)
    elif isinstance(msg, ManualDuties):
        out["duties"] = {
            "left": from_fixed(msg.left_pm, SCALE_DUTY),
            "right": from_fixed(msg.right_pm, SCALE_DUTY),
            "vertical": from_fixed(msg.vertical_pm, SCALE_DUTY),
        }
    return out


def command_from_json(obj: dict, seq: int | None = None) -> CommandMessage:
    """Parse the dashboard/scenario JSON command schema into a wire message.

    SI floats quantize to the wire fixed point here. seq may be supplied
    by the caller (scenario loader) or carried in the object.
    """
    if not isinstance(obj, dict):
        raise ValueError(f"command must be an object, got {type(obj).__name__}")
    kind = obj.get("kind")
    if kind not in _COMMAND_NAMES:
        raise ValueError(f"unknown command kind {kind!r}")
    if seq is None:
        seq = int(obj.get("seq", 0))
    if kind == "set_mode":
        mode = obj.get("mode")
        if mode not in _MODE_VALUES:
            raise ValueError(f"unknown mode {mode!r}")
        return SetMode(seq=seq, mode=_MODE_VALUES[mode])
    if kind == "set_setpoints":
        return SetSetpoints(
            seq=seq,
            yaw_ref_crad=to_fixed(float(obj.get("yaw_ref", 0.0)), SCALE_ANGLE),
            depth_ref_mm=to_fixed(float(obj.get("depth_ref", 0.0)), SCALE_DEPTH),
            surge_pm=to_fixed(float(obj.get("surge_duty", 0.0)), SCALE_DUTY),
        )
    if kind == "set_gains":
        axis = obj.get("axis")
        if axis not in _GAIN_AXIS_VALUES:
            raise ValueError(f"gain axis must be 'yaw', 'depth' or 'alpha', got {axis!r}")
        return SetGains(
            seq=seq,
            axis=_GAIN_AXIS_VALUES[axis],
            kp_milli=to_fixed(float(obj["kp"]), SCALE_GAIN),
            ki_milli=to_fixed(float(obj.get("ki", 0.0)), SCALE_GAIN),
        )
    if kind == "manual_duties":
        duties = obj.get("duties", {})
        return ManualDuties(
            seq=seq,
            left_pm=to_fixed(float(duties.get("left", 0.0)), SCALE_DUTY),
            right_pm=to_fixed(float(duties.get("right", 0.0)), SCALE_DUTY),
            vertical_pm=to_fixed(float(duties.get("vertical", 0.0)), SCALE_DUTY),
        )
    return Ping(seq=seq)
