// Pointer-to-fingertip mapping: the pointer's vertical position drives the
// fingertip depth along the cube's top-face normal (straight down).

import type { SceneInfo } from "./protocol";

export interface DepthMapping {
  /** meters above (+) the top face covered by the top of the strip */
  hoverRange: number;
  /** meters below the top face covered by the bottom of the strip */
  depthRange: number;
}

export const DEFAULT_MAPPING: DepthMapping = { hoverRange: 0.05, depthRange: 0.05 };

/**
 * Map a pointer fraction (0 = strip top, 1 = strip bottom) to a fingertip
 * position: above the face for small fractions, penetrating below for large
 * ones. Depth is clamped to the mapping range.
 */
export function pointerToFinger(
  fraction: number,
  scene: SceneInfo,
  mapping: DepthMapping = DEFAULT_MAPPING,
): { pos: [number, number, number]; depthM: number } {
  const f = Math.min(Math.max(fraction, 0), 1);
  const span = mapping.hoverRange + mapping.depthRange;
  const depth = f * span - mapping.hoverRange; // negative = hovering above
  const [cx, topY, cz] = [
    scene.contact_point[0],
    scene.cube_top_y_m,
    scene.contact_point[2],
  ];
  return { pos: [cx, topY - depth, cz], depthM: depth };
}

/** Pointer fraction that puts the fingertip exactly at a given depth (m). */
export function depthToFraction(
  depthM: number,
  mapping: DepthMapping = DEFAULT_MAPPING,
): number {
  const span = mapping.hoverRange + mapping.depthRange;
  return (depthM + mapping.hoverRange) / span;
}

/**
 * Release animation: two segments, mirroring the approach in reverse. The
 * fingertip first lifts straight out of the object to a point above the top
 * face, then travels to the resting position, so it never drags through the
 * cube sideways. Returns the position at a normalized time s in [0, 1].
 */
export function returnToRestPos(
  from: [number, number, number],
  scene: SceneInfo,
  s: number,
): [number, number, number] {
  const t = Math.min(Math.max(s, 0), 1);
  const lift: [number, number, number] = [
    from[0],
    Math.max(from[1], scene.cube_top_y_m + 0.02),
    from[2],
  ];
  if (t < 0.4) return lerp3(from, lift, smoothstep(t / 0.4));
  return lerp3(lift, scene.rest_pos, smoothstep((t - 0.4) / 0.6));
}

function smoothstep(t: number): number {
  const x = Math.min(Math.max(t, 0), 1);
  return x * x * (3 - 2 * x);
}

function lerp3(
  a: [number, number, number],
  b: [number, number, number],
  s: number,
): [number, number, number] {
  const t = Math.min(Math.max(s, 0), 1);
  return [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t, a[2] + (b[2] - a[2]) * t];
}
