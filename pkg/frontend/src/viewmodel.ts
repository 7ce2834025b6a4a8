/** Pure client state: what the UI knows, reduced from server messages.
 *
 * Only the newest frame is kept (stale seq discarded), every measurement
 * is queued for exactly one rendering, and pause/speed state is reflected
 * only once the server's stream confirms it.
 */

import {
  ErrorMsg,
  FrameMsg,
  MeasurementMsg,
  ReadyMsg,
  ServerMessage,
} from "./protocol.js";

export type Connection = "connecting" | "open" | "closed";

export interface PendingMeasurement {
  msg: MeasurementMsg;
  id: number;
}

export interface ViewState {
  connection: Connection;
  ready: ReadyMsg | null;
  frame: FrameMsg | null;
  /** Measurements not yet shown; drained by takeMeasurements. */
  pendingMeasurements: PendingMeasurement[];
  nextMeasurementId: number;
  lastError: ErrorMsg | null;
  /** Confirmed by the stream: true once frames stop after a pause request. */
  paused: boolean;
  pausePending: boolean;
  stepsPerFrame: number | null;
  droppedFrames: number;
  staleFrames: number;
}

export function initialState(): ViewState {
  return {
    connection: "connecting",
    ready: null,
    frame: null,
    pendingMeasurements: [],
    nextMeasurementId: 1,
    lastError: null,
    paused: false,
    pausePending: false,
    stepsPerFrame: null,
    droppedFrames: 0,
    staleFrames: 0,
  };
}

export function applyConnection(state: ViewState, connection: Connection): ViewState {
  return { ...state, connection };
}

/** Record a control intent; confirmation comes from the frame stream. */
export function applyControlIntent(
  state: ViewState,
  intent: "pause" | "resume" | "reset" | "set_speed",
): ViewState {
  if (intent === "pause") return { ...state, pausePending: true };
  if (intent === "resume") return { ...state, paused: false, pausePending: false };
  return state;
}

/** A pause is considered confirmed when no frame has arrived for a while. */
export function confirmPause(state: ViewState): ViewState {
  if (!state.pausePending) return state;
  return { ...state, paused: true, pausePending: false };
}

export function applyServer(state: ViewState, msg: ServerMessage): ViewState {
  switch (msg.type) {
    case "ready":
      return {
        ...state,
        ready: msg,
        frame: null,
        stepsPerFrame: msg.steps_per_frame,
        paused: false,
        pausePending: false,
      };
    case "frame": {
      if (state.frame && msg.seq <= state.frame.seq) {
        return { ...state, staleFrames: state.staleFrames + 1 };
      }
      const dropped =
        state.frame === null ? 0 : Math.max(0, msg.seq - state.frame.seq - 1);
      return {
        ...state,
        frame: msg,
        droppedFrames: state.droppedFrames + dropped,
        // A flowing stream means the session is running.
        paused: state.pausePending ? state.paused : false,
      };
    }
    case "measurement":
      return {
        ...state,
        pendingMeasurements: [
          ...state.pendingMeasurements,
          { msg, id: state.nextMeasurementId },
        ],
        nextMeasurementId: state.nextMeasurementId + 1,
      };
    case "error":
      return { ...state, lastError: msg };
  }
}

/** Drain measurements for display; each is returned exactly once. */
export function takeMeasurements(state: ViewState): [PendingMeasurement[], ViewState] {
  if (state.pendingMeasurements.length === 0) return [[], state];
  return [state.pendingMeasurements, { ...state, pendingMeasurements: [] }];
}

export function measurementText(msg: MeasurementMsg): string {
  if (msg.detected === null) return "no detection";
  return `detected particle ${msg.detected}`;
}
