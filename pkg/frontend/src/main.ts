// Operator console wiring: connect to the session service on this host,
// render the scene and panels, forward pointer input and calibration answers.

import { beep, probeCue } from "./audio";
import { SessionClient } from "./client";
import { DEFAULT_MAPPING, pointerToFinger, returnToRestPos } from "./input";
import type { SubjectResponse } from "./protocol";
import { drawPulsePanel, drawScene, fitViewport } from "./render";
import { blackboardText, gauges } from "./view";

const $ = (id: string) => document.getElementById(id)!;

const sceneCanvas = $("scene") as HTMLCanvasElement;
const pulseCanvas = $("pulse") as HTMLCanvasElement;
const sceneCtx = sceneCanvas.getContext("2d")!;
const pulseCtx = pulseCanvas.getContext("2d")!;

const wsUrl = `ws://${location.host}/ws`;
const client = new SessionClient(wsUrl, (url) => new WebSocket(url) as never, {
  onMessage: (msg) => {
    if (msg.type === "event" && msg.name === "beep") beep();
    if (msg.type === "calibration_probe") probeCue();
  },
});
client.connect();

$("start").addEventListener("click", () => client.start());
$("pause").addEventListener("click", () => client.pause());
$("abort").addEventListener("click", () => client.abort());
for (const response of ["felt", "not_felt", "discomfort"] as SubjectResponse[]) {
  $(`btn-${response}`).addEventListener("click", () => {
    const probe = client.view.probe;
    if (probe) client.respond(probe.id, response);
  });
}

// --- pointer steering --------------------------------------------------------

let pointerDown = false;
let lastFinger: [number, number, number] | null = null;
let returnAnim: number | null = null;

function fractionFromEvent(ev: PointerEvent): number {
  const rect = sceneCanvas.getBoundingClientRect();
  return (ev.clientY - rect.top) / rect.height;
}

sceneCanvas.addEventListener("pointerdown", (ev) => {
  pointerDown = true;
  sceneCanvas.setPointerCapture(ev.pointerId);
  steer(ev);
});
sceneCanvas.addEventListener("pointermove", (ev) => {
  if (pointerDown) steer(ev);
});
sceneCanvas.addEventListener("pointerup", () => {
  pointerDown = false;
  animateReturn();
});

function steer(ev: PointerEvent): void {
  const scene = client.view.scene;
  if (!scene) return;
  if (returnAnim !== null) {
    cancelAnimationFrame(returnAnim);
    returnAnim = null;
  }
  const { pos, depthM } = pointerToFinger(fractionFromEvent(ev), scene, DEFAULT_MAPPING);
  lastFinger = pos;
  client.sendFinger(pos);
  ($("depth-readout") as HTMLElement).textContent = `${depthM >= 0 ? "+" : ""}${depthM.toFixed(3)} m`;
}

function animateReturn(): void {
  const scene = client.view.scene;
  if (!scene || !lastFinger) return;
  const from = lastFinger;
  const t0 = performance.now();
  const durationMs = 600;
  const step = (now: number) => {
    const s = Math.min((now - t0) / durationMs, 1);
    const pos = returnToRestPos(from, scene, s);
    client.sendFinger(pos);
    if (s < 1) {
      returnAnim = requestAnimationFrame(step);
    } else {
      returnAnim = null;
      lastFinger = null;
    }
  };
  returnAnim = requestAnimationFrame(step);
}

// --- render loop ---------------------------------------------------------------

function render(): void {
  const view = client.view;
  if (view.scene) {
    const viewport = fitViewport(view.scene, sceneCanvas.width, sceneCanvas.height);
    drawScene(sceneCtx, view, viewport);
  }
  drawPulsePanel(pulseCtx, view, pulseCanvas.width, pulseCanvas.height);

  $("blackboard").textContent = blackboardText(view);
  $("connection").textContent = view.connection;
  $("connection").className = `pill ${view.connection}`;

  const g = gauges(view);
  if (g) {
    ($("d-value") as HTMLElement).textContent = `${(g.dMeters * 100).toFixed(2)} cm`;
    ($("dhat-fill") as HTMLElement).style.width = `${(g.dHat * 100).toFixed(1)}%`;
    ($("dhat-value") as HTMLElement).textContent = g.dHat.toFixed(3);
    ($("stim-value") as HTMLElement).textContent = g.stimulusActive
      ? `${g.intensityMa.toFixed(1)} mA · ${g.pulseWidthUs.toFixed(0)} µs · ${g.frequencyHz.toFixed(0)} Hz`
      : "off";
    ($("outline-value") as HTMLElement).textContent =
      `×${g.outlineScale.toFixed(3)} · ${g.outlineBorderPx.toFixed(2)} px`;
    ($("phase-value") as HTMLElement).textContent =
      g.holdRemainingS !== null ? `${g.phase} (${g.holdRemainingS.toFixed(1)} s)` : g.phase;
  }

  const probe = view.probe;
  $("probe-panel").classList.toggle("active", probe !== null);
  if (probe) {
    ($("probe-label") as HTMLElement).textContent =
      `probe #${probe.id} — ${probe.phase.replace("_", " ")}`;
  }
  const transcript = view.transcript
    .slice(-12)
    .map((e) => `#${e.probeId}  ${e.intensityMa.toFixed(1)} mA  ${e.response ?? "…"}`)
    .join("\n");
  $("transcript").textContent = transcript;
  if (view.calibrationResult) {
    const r = view.calibrationResult;
    $("result").textContent =
      `detection ${r.detection_threshold_ma.toFixed(2)} mA · ` +
      `discomfort ${r.discomfort_threshold_ma.toFixed(2)} mA · ` +
      `working ${r.working_intensity_ma.toFixed(2)} mA`;
  }
  requestAnimationFrame(render);
}

requestAnimationFrame(render);
