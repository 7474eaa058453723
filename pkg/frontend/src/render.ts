// Canvas renderer: 2.5D side view of the task scene. Purely presentational —
// all numbers (outline scale/border, stimulus, gauges) arrive via ViewState.

import type { SceneInfo } from "./protocol";
import type { ViewState } from "./view";
import { pulseSketch } from "./view";

export interface Viewport {
  width: number;
  height: number;
  metersPerPixel: number;
  originX: number; // world x rendered at this pixel column
  originY: number; // world y rendered at this pixel row (screen y grows down)
}

export function fitViewport(scene: SceneInfo, width: number, height: number): Viewport {
  const spanM = 1.1; // meters of world width shown
  return {
    width,
    height,
    metersPerPixel: spanM / width,
    originX: scene.contact_point[0] - 0.35,
    originY: scene.table_height_m + 0.45,
  };
}

function toPx(v: Viewport, x: number, y: number): [number, number] {
  return [(x - v.originX) / v.metersPerPixel, (v.originY - y) / v.metersPerPixel];
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  view: ViewState,
  v: Viewport,
): void {
  const scene = view.scene;
  const snap = view.snapshot;
  ctx.clearRect(0, 0, v.width, v.height);
  ctx.fillStyle = "#10141c";
  ctx.fillRect(0, 0, v.width, v.height);
  if (!scene) return;

  // table
  const [, tableY] = toPx(v, 0, scene.table_height_m);
  ctx.strokeStyle = "#5a5247";
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.moveTo(0, tableY);
  ctx.lineTo(v.width, tableY);
  ctx.stroke();

  // resting area marker
  const [rx, ry] = toPx(v, scene.rest_pos[0], scene.table_height_m);
  const restW = 0.12 / v.metersPerPixel;
  ctx.strokeStyle = "rgba(120, 180, 255, 0.5)";
  ctx.lineWidth = 1.5;
  ctx.strokeRect(rx - restW / 2, ry - restW, restW, restW);

  // cube, with the outline silhouette behind it
  const edgePx = scene.cube_edge_m / v.metersPerPixel;
  const [cubeX, cubeTopY] = toPx(v, scene.contact_point[0], scene.cube_top_y_m);
  const wireframe = snap?.condition?.shading === "wireframe";

  if (snap && snap.outline.scale > 1.0) {
    const scaled = edgePx * snap.outline.scale;
    ctx.strokeStyle = "#ffd54d";
    ctx.lineWidth = snap.outline.border_px;
    ctx.strokeRect(
      cubeX - scaled / 2,
      cubeTopY - (scaled - edgePx) / 2,
      scaled,
      scaled,
    );
  }

  if (wireframe) {
    ctx.strokeStyle = "#9ecbff";
    ctx.lineWidth = 1.5;
    ctx.strokeRect(cubeX - edgePx / 2, cubeTopY, edgePx, edgePx);
    ctx.beginPath();
    ctx.moveTo(cubeX - edgePx / 2, cubeTopY);
    ctx.lineTo(cubeX + edgePx / 2, cubeTopY + edgePx);
    ctx.moveTo(cubeX + edgePx / 2, cubeTopY);
    ctx.lineTo(cubeX - edgePx / 2, cubeTopY + edgePx);
    ctx.stroke();
  } else {
    ctx.fillStyle = "#3d6ea5";
    ctx.fillRect(cubeX - edgePx / 2, cubeTopY, edgePx, edgePx);
  }

  if (!snap) return;

  // avatar fingertip (constrained) and real fingertip (tracked)
  const [ax, ay] = toPx(v, snap.avatar_pos[0], snap.avatar_pos[1]);
  const [fx, fy] = toPx(v, snap.real_pos[0], snap.real_pos[1]);
  drawHand(ctx, ax, ay, "#e8eef7", false);
  if (snap.in_contact) {
    drawHand(ctx, fx, fy, "rgba(255, 120, 120, 0.8)", true);
    ctx.strokeStyle = "rgba(255, 120, 120, 0.6)";
    ctx.setLineDash([3, 3]);
    ctx.beginPath();
    ctx.moveTo(ax, ay);
    ctx.lineTo(fx, fy);
    ctx.stroke();
    ctx.setLineDash([]);
  }
}

/** Closed fist with the index finger extended, drawn as a simple glyph. */
function drawHand(
  ctx: CanvasRenderingContext2D,
  x: number,
  y: number,
  color: string,
  ghost: boolean,
): void {
  ctx.save();
  ctx.strokeStyle = color;
  ctx.fillStyle = color;
  ctx.lineWidth = 2;
  // fingertip
  ctx.beginPath();
  ctx.arc(x, y, ghost ? 3 : 4, 0, Math.PI * 2);
  ctx.fill();
  // extended index finger up to the fist
  ctx.beginPath();
  ctx.moveTo(x, y);
  ctx.lineTo(x + 6, y - 18);
  ctx.stroke();
  // fist
  ctx.beginPath();
  ctx.arc(x + 12, y - 24, 9, 0, Math.PI * 2);
  ghost ? ctx.stroke() : ctx.fill();
  ctx.restore();
}

export function drawPulsePanel(
  ctx: CanvasRenderingContext2D,
  view: ViewState,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#0b0f15";
  ctx.fillRect(0, 0, width, height);
  const points = pulseSketch(view);
  ctx.strokeStyle = "#69f0ae";
  ctx.lineWidth = 2;
  ctx.beginPath();
  points.forEach(([t, a], i) => {
    const x = t * (width - 8) + 4;
    const y = (1 - a) * (height - 8) + 4;
    i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
  });
  ctx.stroke();
}
