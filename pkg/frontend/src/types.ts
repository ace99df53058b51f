/** Wire types for the WebSocket JSON bridge (SI floats throughout). */

export interface Duties {
  left: number;
  right: number;
  vertical: number;
}

export interface Gains {
  kp: number;
  ki: number;
}

export interface TelemetryDoc {
  type: "telemetry";
  seq: number;
  t: number;
  yaw_est: number;
  depth_est: number;
  turbidity: number;
  duties: Duties;
  mode: "manual" | "closed_loop";
  yaw_gains: Gains;
  depth_gains: Gains;
  flags: { sensor_fault: boolean; saturated: boolean };
}

/** Echo of a command the vehicle actually applied (post-quantization). */
export interface CommandEchoDoc {
  type: "command";
  seq: number;
  kind: string;
  [field: string]: unknown;
}

export type ServerMessage = TelemetryDoc | CommandEchoDoc;

function isFiniteNumber(x: unknown): x is number {
  return typeof x === "number" && Number.isFinite(x);
}

function isDuties(x: unknown): x is Duties {
  if (typeof x !== "object" || x === null) return false;
  const d = x as Record<string, unknown>;
  return isFiniteNumber(d.left) && isFiniteNumber(d.right) && isFiniteNumber(d.vertical);
}

function isGains(x: unknown): x is Gains {
  if (typeof x !== "object" || x === null) return false;
  const g = x as Record<string, unknown>;
  return isFiniteNumber(g.kp) && isFiniteNumber(g.ki);
}

/** Parse one server message; throws on anything malformed. */
export function parseServerMessage(text: string): ServerMessage {
  const doc: unknown = JSON.parse(text);
  if (typeof doc !== "object" || doc === null) throw new Error("message is not an object");
  const msg = doc as Record<string, unknown>;
  if (msg.type === "telemetry") {
    if (
      !isFiniteNumber(msg.seq) ||
      !isFiniteNumber(msg.t) ||
      !isFiniteNumber(msg.yaw_est) ||
      !isFiniteNumber(msg.depth_est) ||
      !isFiniteNumber(msg.turbidity) ||
      !isDuties(msg.duties) ||
      (msg.mode !== "manual" && msg.mode !== "closed_loop") ||
      !isGains(msg.yaw_gains) ||
      !isGains(msg.depth_gains)
    ) {
      throw new Error("malformed telemetry");
    }
    return msg as unknown as TelemetryDoc;
  }
  if (msg.type === "command") {
    if (!isFiniteNumber(msg.seq) || typeof msg.kind !== "string") {
      throw new Error("malformed command echo");
    }
    return msg as unknown as CommandEchoDoc;
  }
  throw new Error(`unknown message type ${String(msg.type)}`);
}

export const DEG_TO_RAD = Math.PI / 180.0;
export const RAD_TO_DEG = 180.0 / Math.PI;
