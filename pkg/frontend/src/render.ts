/** Cell shading: identical rule to the server's image export.
 *
 * Each displayed particle owns one primary channel; the channel value is
 * round(255 * (P / maxP)^gamma) with per-particle max normalization, so a
 * spread-out particle stays visible next to a sharply peaked one.
 */

import { Channel } from "./protocol.js";

export const CHANNEL_INDEX: Record<Exclude<Channel, "none">, number> = {
  red: 0,
  green: 1,
  blue: 2,
};

export const DEFAULT_GAMMA = 0.5;

/**
 * Mixes marginals into RGBA bytes, one pixel per cell, row-major
 * (ay outer, ax inner) — the same order the frames arrive in.
 */
export function shadeCells(
  marginals: number[][],
  channels: (Channel | null)[],
  cells: number,
  gamma: number = DEFAULT_GAMMA,
): Uint8ClampedArray {
  const rgba = new Uint8ClampedArray(cells * 4);
  for (let i = 0; i < cells; i++) {
    rgba[i * 4 + 3] = 255;
  }
  marginals.forEach((values, which) => {
    const channel = channels[which];
    if (channel === null || channel === "none" || channel === undefined) return;
    const offset = CHANNEL_INDEX[channel];
    let peak = 0;
    for (const v of values) {
      if (v > peak) peak = v;
    }
    if (peak <= 0) return;
    for (let i = 0; i < cells && i < values.length; i++) {
      rgba[i * 4 + offset] = Math.round(255 * Math.pow(values[i] / peak, gamma));
    }
  });
  return rgba;
}

/** Channel assignment from the ready metadata; defaults to RGB order. */
export function channelsFor(particles: { display_channel: Channel }[]): (Channel | null)[] {
  const channels = particles.map((p) => (p.display_channel === "none" ? null : p.display_channel));
  if (channels.every((c) => c === null)) {
    const order: Channel[] = ["red", "green", "blue"];
    return particles.map((_, i) => (i < 3 ? order[i] : null));
  }
  return channels;
}

export function cssColor(channel: Channel | null): string {
  switch (channel) {
    case "red":
      return "#ff5050";
    case "green":
      return "#50ff50";
    case "blue":
      return "#5080ff";
    default:
      return "#cccccc";
  }
}
