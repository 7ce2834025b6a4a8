/** Wire protocol types and (de)serialization for the streaming WebSocket.
 *
 * Mirrors the server's JSON message schema exactly: one complete JSON
 * object per message, discriminated by `type`.
 */

export interface GridInfo {
  m: number;
  n: number;
  dx: number;
  dy: number;
}

export type Channel = "red" | "green" | "blue" | "none";

export interface ParticleInfo {
  index: number;
  mass: number;
  spring_k: number;
  display_channel: Channel;
}

export interface ReadyMsg {
  type: "ready";
  grid: GridInfo;
  particles: ParticleInfo[];
  steps_per_frame: number;
  dt: number;
}

export interface StatsPayload {
  frame: number;
  pre_norm: number;
  total_energy: number;
  kinetic: number[];
  expected_pos: [number, number][];
  cm: [number, number];
}

export interface FrameMsg {
  type: "frame";
  seq: number;
  t: number;
  stats: StatsPayload;
  /** One flat array per particle, row-major: ay outer, ax inner. */
  marginals: number[][];
}

export interface MeasurementMsg {
  type: "measurement";
  cell: { ax: number; ay: number };
  probs: number[];
  detected: number | null;
}

export interface ErrorMsg {
  type: "error";
  code: string;
  message: string;
}

export type ServerMessage = ReadyMsg | FrameMsg | MeasurementMsg | ErrorMsg;

export type ClientMessage =
  | { type: "init"; config?: Record<string, unknown> }
  | { type: "click"; ax: number; ay: number }
  | { type: "pause" }
  | { type: "resume" }
  | { type: "reset" }
  | { type: "set_speed"; steps_per_frame: number };

const SERVER_TYPES = new Set(["ready", "frame", "measurement", "error"]);

/** Parse one server message; anything malformed or unknown yields null. */
export function parseServerMessage(text: string): ServerMessage | null {
  let value: unknown;
  try {
    value = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof value !== "object" || value === null) return null;
  const type = (value as { type?: unknown }).type;
  if (typeof type !== "string" || !SERVER_TYPES.has(type)) return null;
  return value as ServerMessage;
}

export function serializeClientMessage(msg: ClientMessage): string {
  return JSON.stringify(msg);
}
