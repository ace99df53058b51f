/** Ground-station session state: one WebSocket, history, command tracking.
 *
 * Pure state machine driven by socket events and an injected clock so the
 * logic is testable without a browser. Display rules enforced here:
 * gains/mode/setpoints shown to the pilot come only from vehicle echoes,
 * never from local optimistic state; commands awaiting their echo are
 * explicit "pending" markers that go stale after a timeout.
 */

import { TimeSeriesRing } from "./ring.js";
import {
  CommandEchoDoc,
  DEG_TO_RAD,
  Duties,
  parseServerMessage,
  TelemetryDoc,
} from "./types.js";

export type ConnectionState = "connected" | "reconnecting" | "disconnected";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: ((err: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export type CommandStatus = "pending" | "confirmed" | "stale";

export interface PendingCommand {
  seq: number;
  kind: string;
  sentAt: number;
  status: CommandStatus;
}

export interface SessionOptions {
  url: string;
  socketFactory: SocketFactory;
  now?: () => number; // milliseconds
  staleMs?: number; // echo timeout, default 1000
  throttleMs?: number; // min spacing of slider commands, default 50 (20 Hz)
  reconnectDelayMs?: number;
  onTelemetry?: (doc: TelemetryDoc, receivedAt: number) => void;
  onStateChange?: () => void;
}

const MANUAL_STREAM_KINDS = new Set(["manual_duties"]);

export class DashboardSession {
  connection: ConnectionState = "disconnected";
  latest: TelemetryDoc | null = null;
  /** Last applied values echoed by the vehicle (authoritative display). */
  echoedSetpoints: { yaw_ref?: number; depth_ref?: number; surge_duty?: number } = {};
  pending: PendingCommand[] = [];
  framesReceived = 0;
  decodeErrors = 0;

  readonly history = {
    yaw: new TimeSeriesRing(),
    depth: new TimeSeriesRing(),
    turbidity: new TimeSeriesRing(),
    dutyLeft: new TimeSeriesRing(),
    dutyRight: new TimeSeriesRing(),
    dutyVertical: new TimeSeriesRing(),
  };

  private socket: SocketLike | null = null;
  private nextSeq = 0;
  private readonly now: () => number;
  private readonly staleMs: number;
  private readonly throttleMs: number;
  private lastStreamSend = -Infinity;
  private queuedStream: { kind: string; payload: Record<string, unknown> } | null = null;
  wantsReconnect = false; // surfaced to the UI as the reconnect prompt

  constructor(private readonly opts: SessionOptions) {
    this.now = opts.now ?? (() => Date.now());
    this.staleMs = opts.staleMs ?? 1000;
    this.throttleMs = opts.throttleMs ?? 50;
  }

  // -- connection lifecycle -------------------------------------------------

  connect(): void {
    this.socket = this.opts.socketFactory(this.opts.url);
    if (this.connection !== "connected") this.connection = "reconnecting";
    this.socket.onopen = () => {
      this.connection = "connected";
      this.wantsReconnect = false;
      // new session: sequence numbering restarts, stale confirmations die
      this.nextSeq = 0;
      this.pending = [];
      this.changed();
    };
    this.socket.onmessage = (event) => this.handleMessage(String(event.data));
    this.socket.onclose = () => this.handleClose();
    this.socket.onerror = () => {
      /* close always follows */
    };
    this.changed();
  }

  disconnect(): void {
    const socket = this.socket;
    this.socket = null;
    this.connection = "disconnected";
    socket?.close();
    this.changed();
  }

  private handleClose(): void {
    if (this.socket === null) return; // deliberate disconnect
    this.socket = null;
    this.connection = "reconnecting";
    this.wantsReconnect = true;
    this.changed();
  }

  // -- inbound ---------------------------------------------------------------

  private handleMessage(text: string): void {
    const receivedAt = this.now();
    let msg;
    try {
      msg = parseServerMessage(text);
    } catch {
      this.decodeErrors++;
      return;
    }
    if (msg.type === "telemetry") {
      this.latest = msg;
      this.framesReceived++;
      this.history.yaw.push(msg.t, msg.yaw_est);
      this.history.depth.push(msg.t, msg.depth_est);
      this.history.turbidity.push(msg.t, msg.turbidity);
      this.history.dutyLeft.push(msg.t, msg.duties.left);
      this.history.dutyRight.push(msg.t, msg.duties.right);
      this.history.dutyVertical.push(msg.t, msg.duties.vertical);
      this.opts.onTelemetry?.(msg, receivedAt);
    } else {
      this.handleEcho(msg);
    }
    this.expirePending();
    this.changed();
  }

  private handleEcho(echo: CommandEchoDoc): void {
    for (const cmd of this.pending) {
      if (cmd.seq === echo.seq && cmd.kind === echo.kind && cmd.status === "pending") {
        cmd.status = "confirmed";
      }
    }
    if (echo.kind === "set_setpoints") {
      this.echoedSetpoints = {
        yaw_ref: echo.yaw_ref as number,
        depth_ref: echo.depth_ref as number,
        surge_duty: echo.surge_duty as number,
      };
    }
  }

  private expirePending(): void {
    const cutoff = this.now() - this.staleMs;
    for (const cmd of this.pending) {
      if (cmd.status === "pending" && cmd.sentAt < cutoff) cmd.status = "stale";
    }
    // keep the list bounded; finished entries older than 10 s fall off
    const historic = this.now() - 10_000;
    this.pending = this.pending.filter(
      (cmd) => cmd.status === "pending" || cmd.sentAt >= historic,
    );
  }

  // -- outbound ---------------------------------------------------------------

  private sendCommand(kind: string, payload: Record<string, unknown>): PendingCommand {
    if (this.connection !== "connected" || this.socket === null) {
      this.wantsReconnect = true;
      this.changed();
      throw new Error("not connected; command not queued");
    }
    const seq = this.nextSeq++;
    const entry: PendingCommand = { seq, kind, sentAt: this.now(), status: "pending" };
    this.pending.push(entry);
    this.socket.send(JSON.stringify({ type: "command", kind, seq, ...payload }));
    this.changed();
    return entry;
  }

  /** Slider-stream path: coalesced and rate-limited to <= 20 Hz. */
  private sendStream(kind: string, payload: Record<string, unknown>): void {
    const elapsed = this.now() - this.lastStreamSend;
    if (elapsed >= this.throttleMs) {
      this.lastStreamSend = this.now();
      this.queuedStream = null;
      this.sendCommand(kind, payload);
    } else {
      this.queuedStream = { kind, payload };
    }
  }

  /** Flush a coalesced slider command once the throttle window opens. */
  pump(): void {
    this.expirePending();
    if (this.queuedStream && this.now() - this.lastStreamSend >= this.throttleMs) {
      const { kind, payload } = this.queuedStream;
      this.queuedStream = null;
      this.lastStreamSend = this.now();
      this.sendCommand(kind, payload);
    }
    this.changed();
  }

  setMode(mode: "manual" | "closed_loop"): PendingCommand {
    return this.sendCommand("set_mode", { mode });
  }

  /** Setpoint entry; yaw arrives from the UI in degrees. */
  setSetpoints(yawDeg: number, depthM: number, surgeDuty: number): PendingCommand {
    return this.sendCommand("set_setpoints", {
      yaw_ref: yawDeg * DEG_TO_RAD,
      depth_ref: depthM,
      surge_duty: surgeDuty,
    });
  }

  setGains(axis: "yaw" | "depth" | "alpha", kp: number, ki: number): PendingCommand {
    return this.sendCommand("set_gains", { axis, kp, ki });
  }

  manualDuties(duties: Duties): void {
    this.sendStream("manual_duties", { duties });
  }

  /** Emergency stop: exactly one zero-duty manual command, immediately. */
  allStop(): PendingCommand {
    this.queuedStream = null; // a trailing slider command must not revive thrust
    this.lastStreamSend = this.now();
    return this.sendCommand("manual_duties", { duties: { left: 0, right: 0, vertical: 0 } });
  }

  ping(): PendingCommand {
    return this.sendCommand("ping", {});
  }

  /** Gains shown to the pilot: only ever the vehicle's telemetry echo. */
  get displayedGains(): { yaw: { kp: number; ki: number }; depth: { kp: number; ki: number } } | null {
    if (this.latest === null) return null;
    return { yaw: this.latest.yaw_gains, depth: this.latest.depth_gains };
  }

  private changed(): void {
    this.opts.onStateChange?.();
  }
}

export { MANUAL_STREAM_KINDS };
