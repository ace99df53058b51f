"""The hardware-in-the-loop session: one vehicle, one control loop, one tether.

Each 50 Hz control tick runs the onboard pipeline exactly as the embedded
code would: apply any commands the uplink delivered, sample sensors,
update the estimators, run the controllers, emit a telemetry frame, then
integrate the plant through four 5 ms substeps. The session is the single
writer of all state; servers and harnesses talk to it with messages only.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import telemetry
from .control import DEPTH_GAINS, YAW_GAINS, ControlSetpoints, Mode, PIGains, PIState, control_step
from .dynamics import (
    SimulationDivergedError,
    ThrusterDuties,
    VehicleParams,
    VehicleState,
    step,
)
from .estimation import DepthAverager, FilterState, filter_update
from .link import LinkConfig, TetherLink
from .sensors import NoiseConfig, SensorFrame, SensorSuite, depth_from_pressure, voltage_to_ntu
from .telemetry import CommandMessage, FrameDecoder, TelemetryFrame, encode_frame

CONTROL_DT = 0.02  # 50 Hz control/sensor tick
SUBSTEPS = 4
SUBSTEP_DT = CONTROL_DT / SUBSTEPS  # 0.005 s plant substep


@dataclass
class TickResult:
    """Everything one control tick produced."""

    state_before: VehicleState
    state_after: VehicleState
    sensor_frame: SensorFrame
    yaw_est: float
    depth_est: float
    duties: ThrusterDuties
    frame: TelemetryFrame
    applied_commands: list[CommandMessage]
    command_errors: list[telemetry.DecodeError]
    downlink_chunks: list[bytes]
    surface_frames: list[TelemetryFrame]


class SimSession:
    """Owns vehicle truth, sensor stream, estimators, controllers, tether."""

    def __init__(
        self,
        params: VehicleParams | None = None,
        noise: NoiseConfig | None = None,
        field=None,
        seed: int = 0,
        link: LinkConfig | None = None,
        initial_state: VehicleState | None = None,
        alpha: float | None = None,
    ):
        from .sensors import ConstantField

        self.params = params if params is not None else VehicleParams()
        noise = noise if noise is not None else NoiseConfig()
        field = field if field is not None else ConstantField()
        link = link if link is not None else LinkConfig()

        seed_root = np.random.SeedSequence(seed)
        seed_sensors, seed_up, seed_down = seed_root.spawn(3)
        self.sensors = SensorSuite(
            noise,
            field,
            water_density=self.params.water_density,
            gravity=self.params.gravity,
            rng=np.random.default_rng(seed_sensors),
        )
        self.uplink = TetherLink(link, rng=np.random.default_rng(seed_up))
        self.downlink = TetherLink(link, rng=np.random.default_rng(seed_down))
        self._vehicle_decoder = FrameDecoder()
        self._surface_decoder = FrameDecoder()

        self.state = initial_state if initial_state is not None else VehicleState()
        self._filter_alpha = alpha if alpha is not None else FilterState().alpha
        self.filter: FilterState | None = None  # initialized from the first heading fix
        self.depth_avg = DepthAverager()
        self.setpoints = ControlSetpoints()
        self.yaw_gains = YAW_GAINS
        self.depth_gains = DEPTH_GAINS
        self.yaw_pi = PIState()
        self.depth_pi = PIState()

        self.tick_index = 0
        self.seq = 0
        self.ping_count = 0
        self.rejected_commands = 0

    @property
    def time(self) -> float:
        """Start of the current tick in seconds since run start."""
        return self.tick_index * CONTROL_DT

    # -- command path ------------------------------------------------------

    def submit_command(self, msg: CommandMessage, now: float | None = None) -> None:
        """Queue a command through the uplink tether (encode + impair)."""
        self.submit_command_bytes(encode_frame(msg), now=now)

    def submit_command_bytes(self, data: bytes, now: float | None = None) -> None:
        self.uplink.send(data, now=self.time if now is None else now)

    def _apply_command(self, msg: CommandMessage) -> bool:
        """Mutate session config from one vehicle-received command.

        Returns False (and counts) when the payload is semantically invalid,
        e.g. negative gains; the session never crashes on operator input.
        """
        try:
            if isinstance(msg, telemetry.SetMode):
                mode = Mode(msg.mode)
                if mode != self.setpoints.mode and mode == Mode.CLOSED_LOOP:
                    # fresh integrators on engage; stale windup would kick the motors
                    self.yaw_pi = PIState()
                    self.depth_pi = PIState()
                self.setpoints = replace(self.setpoints, mode=mode)
            elif isinstance(msg, telemetry.SetSetpoints):
                depth_ref = min(
                    self.params.max_depth,
                    max(0.0, telemetry.from_fixed(msg.depth_ref_mm, telemetry.SCALE_DEPTH)),
                )
                self.setpoints = replace(
                    self.setpoints,
                    yaw_ref=telemetry.from_fixed(msg.yaw_ref_crad, telemetry.SCALE_ANGLE),
                    depth_ref=depth_ref,
                    surge_duty=telemetry.from_fixed(msg.surge_pm, telemetry.SCALE_DUTY),
                )
            elif isinstance(msg, telemetry.SetGains):
                if msg.axis == 2:
                    # heading-filter alpha rides the gain-tuning path (kp slot)
                    alpha = telemetry.from_fixed(msg.kp_milli, telemetry.SCALE_GAIN)
                    if not 0.0 <= alpha <= 1.0:
                        raise ValueError(f"alpha {alpha} outside [0, 1]")
                    self._filter_alpha = alpha
                    if self.filter is not None:
                        self.filter = replace(self.filter, alpha=alpha)
                else:
                    gains = PIGains(
                        kp=telemetry.from_fixed(msg.kp_milli, telemetry.SCALE_GAIN),
                        ki=telemetry.from_fixed(msg.ki_milli, telemetry.SCALE_GAIN),
                    )
                    if msg.axis == 0:
                        self.yaw_gains = gains
                    else:
                        self.depth_gains = gains
            elif isinstance(msg, telemetry.ManualDuties):
                # operator override: taking the stick always engages manual
                # mode, so a single zero-duty command is a full stop
                self.setpoints = replace(
                    self.setpoints,
                    mode=Mode.MANUAL,
                    manual_duties=ThrusterDuties(
                        left=telemetry.from_fixed(msg.left_pm, telemetry.SCALE_DUTY),
                        right=telemetry.from_fixed(msg.right_pm, telemetry.SCALE_DUTY),
                        vertical=telemetry.from_fixed(msg.vertical_pm, telemetry.SCALE_DUTY),
                    ),
                )
            elif isinstance(msg, telemetry.Ping):
                self.ping_count += 1
            else:
                return False
        except ValueError:
            self.rejected_commands += 1
            return False
        return True

    # -- main loop ---------------------------------------------------------

    def tick(self) -> TickResult:
        """Run one 50 Hz control tick and four plant substeps."""
        now = self.time

        applied: list[CommandMessage] = []
        command_errors: list[telemetry.DecodeError] = []
        for chunk in self.uplink.poll(now):
            messages, errors = self._vehicle_decoder.feed(chunk)
            command_errors.extend(errors)
            for msg in messages:
                if isinstance(msg, TelemetryFrame):
                    continue  # vehicle never acts on its own frame type
                if self._apply_command(msg):
                    applied.append(msg)

        state_before = self.state
        sensor_frame = self.sensors.sample(state_before)

        if self.filter is None:
            self.filter = FilterState(yaw_est=sensor_frame.mag_yaw, alpha=self._filter_alpha)
        else:
            self.filter = filter_update(
                self.filter, sensor_frame.gyro_z, sensor_frame.mag_yaw, CONTROL_DT
            )
        yaw_est = self.filter.yaw_est
        depth_est = self.depth_avg.update(
            depth_from_pressure(sensor_frame.pressure, self.params.water_density, self.params.gravity)
        )

        duties, self.yaw_pi, self.depth_pi = control_step(
            self.setpoints,
            yaw_est,
            depth_est,
            self.yaw_gains,
            self.yaw_pi,
            self.depth_gains,
            self.depth_pi,
            CONTROL_DT,
        )

        saturated = any(abs(d) >= 1.0 for d in (duties.left, duties.right, duties.vertical))
        turbidity_ntu = max(0.0, voltage_to_ntu(sensor_frame.turbidity_voltage))
        frame = TelemetryFrame.from_si(
            seq=self.seq,
            t=now,
            yaw_est=yaw_est,
            depth_est=depth_est,
            turbidity=turbidity_ntu,
            duties=(duties.left, duties.right, duties.vertical),
            mode=int(self.setpoints.mode),
            yaw_gains=(self.yaw_gains.kp, self.yaw_gains.ki),
            depth_gains=(self.depth_gains.kp, self.depth_gains.ki),
            saturated=saturated,
        )

        state = state_before
        try:
            for _ in range(SUBSTEPS):
                state = step(state, duties, self.params, SUBSTEP_DT)
        except SimulationDivergedError as exc:
            raise SimulationDivergedError(str(exc), tick_index=self.tick_index) from None
        self.state = state

        # Downlink: encoded frame through the tether, decoded surface-side.
        encoded = encode_frame(frame)
        self.downlink.send(encoded, now=now)
        downlink_chunks = self.downlink.poll(now)
        surface_frames: list[TelemetryFrame] = []
        for chunk in downlink_chunks:
            messages, _ = self._surface_decoder.feed(chunk)
            surface_frames.extend(m for m in messages if isinstance(m, TelemetryFrame))

        self.seq += 1
        self.tick_index += 1
        return TickResult(
            state_before=state_before,
            state_after=state,
            sensor_frame=sensor_frame,
            yaw_est=yaw_est,
            depth_est=depth_est,
            duties=duties,
            frame=frame,
            applied_commands=applied,
            command_errors=command_errors,
            downlink_chunks=downlink_chunks,
            surface_frames=surface_frames,
        )
