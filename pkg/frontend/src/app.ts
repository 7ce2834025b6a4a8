/** DOM application: canvas grid, stats panel, controls, measurement toasts.
 *
 * All I/O is injectable (socket factory, canvas painter, timer) so the
 * whole click-to-measurement path can be driven headless in tests.
 */

import {
  ClientMessage,
  FrameMsg,
  MeasurementMsg,
  parseServerMessage,
  serializeClientMessage,
} from "./protocol.js";
import { channelsFor, cssColor, shadeCells, DEFAULT_GAMMA } from "./render.js";
import {
  ViewState,
  applyConnection,
  applyControlIntent,
  applyServer,
  confirmPause,
  initialState,
  measurementText,
  takeMeasurements,
} from "./viewmodel.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  // Handler parameter types stay loose so a browser WebSocket satisfies
  // the interface directly.
  onopen: ((ev: any) => void) | null;
  onclose: ((ev: any) => void) | null;
  onmessage: ((ev: any) => void) | null;
}

export type Painter = (
  canvas: HTMLCanvasElement,
  rgba: Uint8ClampedArray,
  m: number,
  n: number,
) => void;

export interface AppDeps {
  createSocket: (url: string) => SocketLike;
  painter?: Painter;
  /** Milliseconds of frame silence after which a pause counts as confirmed. */
  pauseConfirmMs?: number;
}

function canvasPainter(canvas: HTMLCanvasElement, rgba: Uint8ClampedArray, m: number, n: number): void {
  canvas.width = m;
  canvas.height = n;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const pixels = new Uint8ClampedArray(rgba.length);
  pixels.set(rgba);
  ctx.putImageData(new ImageData(pixels, m, n), 0, 0);
}

export class App {
  readonly canvas: HTMLCanvasElement;
  readonly statusEl: HTMLElement;
  readonly outcomeEl: HTMLElement;
  readonly statsEl: HTMLElement;
  readonly errorEl: HTMLElement;
  readonly overlay: HTMLElement;
  state: ViewState = initialState();
  /** Seq of the frame currently painted; repaint only on newer. */
  paintedSeq = -1;

  private socket: SocketLike | null = null;
  private readonly painter: Painter;
  private readonly pauseConfirmMs: number;
  private pauseTimer: ReturnType<typeof setTimeout> | null = null;
  private speedInput: HTMLInputElement;

  constructor(private readonly root: HTMLElement, private readonly deps: AppDeps) {
    this.painter = deps.painter ?? canvasPainter;
    this.pauseConfirmMs = deps.pauseConfirmMs ?? 400;
    this.root.innerHTML = `
      <div class="layout">
        <div class="board">
          <div class="gridwrap">
            <canvas id="grid"></canvas>
            <div id="overlay"></div>
          </div>
          <div id="outcome" class="outcome"></div>
          <div class="controls">
            <button id="pause">pause</button>
            <button id="resume">resume</button>
            <button id="reset">reset</button>
            <label>steps/frame
              <input id="speed" type="number" min="1" value="20" size="4">
            </label>
            <button id="apply-speed">apply</button>
          </div>
          <div id="status" class="status">connecting&hellip;</div>
          <div id="error" class="error"></div>
        </div>
        <pre id="stats" class="stats"></pre>
      </div>`;
    this.canvas = this.root.querySelector("#grid") as HTMLCanvasElement;
    this.overlay = this.root.querySelector("#overlay") as HTMLElement;
    this.statusEl = this.root.querySelector("#status") as HTMLElement;
    this.outcomeEl = this.root.querySelector("#outcome") as HTMLElement;
    this.statsEl = this.root.querySelector("#stats") as HTMLElement;
    this.errorEl = this.root.querySelector("#error") as HTMLElement;
    this.speedInput = this.root.querySelector("#speed") as HTMLInputElement;

    this.canvas.addEventListener("click", (ev) => this.onCanvasClick(ev as MouseEvent));
    this.button("#pause").addEventListener("click", () => this.control("pause"));
    this.button("#resume").addEventListener("click", () => this.control("resume"));
    this.button("#reset").addEventListener("click", () => this.control("reset"));
    this.button("#apply-speed").addEventListener("click", () => this.applySpeed());
  }

  private button(selector: string): HTMLButtonElement {
    return this.root.querySelector(selector) as HTMLButtonElement;
  }

  connect(url: string): void {
    const socket = this.deps.createSocket(url);
    this.socket = socket;
    this.state = applyConnection(this.state, "connecting");
    socket.onopen = () => {
      this.state = applyConnection(this.state, "open");
      this.send({ type: "init" });
      this.renderStatus();
    };
    socket.onclose = () => {
      this.state = applyConnection(this.state, "closed");
      this.renderStatus();
    };
    socket.onmessage = (ev) => this.onMessage(ev.data);
    this.renderStatus();
  }

  private send(msg: ClientMessage): boolean {
    if (!this.socket || this.state.connection !== "open") return false;
    this.socket.send(serializeClientMessage(msg));
    return true;
  }

  onMessage(text: string): void {
    const msg = parseServerMessage(text);
    if (!msg) return;
    this.state = applyServer(this.state, msg);
    if (msg.type === "frame") this.armPauseConfirm();
    this.render();
  }

  /** Pause shows as confirmed once the frame stream actually stops. */
  private armPauseConfirm(): void {
    if (this.pauseTimer !== null) clearTimeout(this.pauseTimer);
    this.pauseTimer = setTimeout(() => {
      this.state = confirmPause(this.state);
      this.renderStatus();
    }, this.pauseConfirmMs);
  }

  // ----------------------------------------------------------- actions

  onCanvasClick(ev: MouseEvent): void {
    if (this.state.connection !== "open" || !this.state.ready) {
      this.renderStatus();
      return;
    }
    const grid = this.state.ready.grid;
    const rect = this.canvas.getBoundingClientRect();
    if (rect.width <= 0 || rect.height <= 0) return;
    const ax = Math.floor(((ev.clientX - rect.left) / rect.width) * grid.m);
    const ay = Math.floor(((ev.clientY - rect.top) / rect.height) * grid.n);
    this.clickCell(ax, ay);
  }

  clickCell(ax: number, ay: number): void {
    if (!this.state.ready) return;
    const grid = this.state.ready.grid;
    if (ax < 0 || ax >= grid.m || ay < 0 || ay >= grid.n) return;
    this.send({ type: "click", ax, ay });
  }

  control(action: "pause" | "resume" | "reset"): void {
    if (!this.send({ type: action })) return;
    this.state = applyControlIntent(this.state, action);
    if (action === "pause") this.armPauseConfirm();
    this.renderStatus();
  }

  applySpeed(): void {
    const value = Math.max(1, Math.floor(Number(this.speedInput.value) || 1));
    if (this.send({ type: "set_speed", steps_per_frame: value })) {
      this.state = { ...this.state, stepsPerFrame: value };
      this.renderStatus();
    }
  }

  // ---------------------------------------------------------- rendering

  render(): void {
    this.renderFrame();
    this.renderMeasurements();
    this.renderStats();
    this.renderStatus();
  }

  private renderFrame(): void {
    const { ready, frame } = this.state;
    if (!ready || !frame || frame.seq <= this.paintedSeq) return;
    const channels = channelsFor(ready.particles);
    const cells = ready.grid.m * ready.grid.n;
    const rgba = shadeCells(frame.marginals, channels, cells, DEFAULT_GAMMA);
    this.painter(this.canvas, rgba, ready.grid.m, ready.grid.n);
    this.paintedSeq = frame.seq;
  }

  private renderMeasurements(): void {
    const [pending, next] = takeMeasurements(this.state);
    this.state = next;
    for (const { msg } of pending) {
      this.showOutcome(msg);
    }
  }

  private showOutcome(msg: MeasurementMsg): void {
    const ready = this.state.ready;
    const channel =
      msg.detected !== null && ready
        ? channelsFor(ready.particles)[msg.detected]
        : null;
    const probs = msg.probs.map((p) => p.toFixed(3)).join(", ");
    this.outcomeEl.textContent =
      `${measurementText(msg)} at (${msg.cell.ax}, ${msg.cell.ay}) — p = [${probs}]`;
    this.outcomeEl.style.color = msg.detected === null ? "#999999" : cssColor(channel);
    if (msg.detected !== null && ready) {
      this.flashCell(msg.cell.ax, msg.cell.ay, cssColor(channel));
    }
  }

  /** Short-lived colored box over the measured cell. */
  flashCell(ax: number, ay: number, color: string): void {
    const ready = this.state.ready;
    if (!ready) return;
    const flash = this.overlay.ownerDocument.createElement("div");
    flash.className = "flash";
    flash.style.left = `${(ax / ready.grid.m) * 100}%`;
    flash.style.top = `${(ay / ready.grid.n) * 100}%`;
    flash.style.width = `${100 / ready.grid.m}%`;
    flash.style.height = `${100 / ready.grid.n}%`;
    flash.style.outline = `3px solid ${color}`;
    this.overlay.appendChild(flash);
    setTimeout(() => flash.remove(), 800);
  }

  private renderStats(): void {
    const { ready, frame } = this.state;
    if (!ready || !frame) {
      this.statsEl.textContent = "";
      return;
    }
    const s = frame.stats;
    const lines = [
      `frame ${s.frame}   t = ${frame.t.toFixed(4)}`,
      `seq ${frame.seq}   dropped ${this.state.droppedFrames}`,
      `total energy   ${s.total_energy.toFixed(6)}`,
      `norm drift     ${(s.pre_norm - 1).toExponential(2)}`,
      `steps/frame    ${this.state.stepsPerFrame ?? ready.steps_per_frame} (dt ${ready.dt.toExponential(3)})`,
      ``,
    ];
    s.kinetic.forEach((kin, k) => {
      const [ex, ey] = s.expected_pos[k];
      lines.push(
        `particle ${k}: kinetic ${kin.toFixed(5)}  <q> = (${ex.toFixed(2)}, ${ey.toFixed(2)})`,
      );
    });
    lines.push(``, `force center  (${s.cm[0].toFixed(2)}, ${s.cm[1].toFixed(2)})`);
    this.statsEl.textContent = lines.join("\n");
  }

  private renderStatus(): void {
    const bits: string[] = [this.state.connection];
    if (this.state.pausePending) bits.push("pausing…");
    else if (this.state.paused) bits.push("paused");
    else if (this.state.frame) bits.push("running");
    this.statusEl.textContent = bits.join(" · ");
    this.errorEl.textContent = this.state.lastError
      ? `${this.state.lastError.code}: ${this.state.lastError.message}`
      : "";
  }
}
