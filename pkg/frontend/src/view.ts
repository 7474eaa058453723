// Pure view model: every displayed number comes straight from server messages.
// The console never re-derives stimulus or outline values from depth — the
// outline drawn on screen is exactly the snapshot's outline, byte for byte.

import type {
  CalibrationResultInfo,
  SceneInfo,
  ServerMsg,
  SnapshotMsg,
  SubjectResponse,
} from "./protocol";

export interface TranscriptEntry {
  probeId: number;
  intensityMa: number;
  response: SubjectResponse | null; // null until answered
}

export interface ViewState {
  connection: "connecting" | "connected" | "reconnecting" | "refused";
  banner: string | null;
  sessionId: string | null;
  scene: SceneInfo | null;
  tickRateHz: number;
  mode: string | null;
  snapshot: SnapshotMsg | null;
  lastSeq: number;
  staleDropped: number;
  probe: { id: number; intensityMa: number; phase: string } | null;
  answered: Record<number, SubjectResponse>;
  transcript: TranscriptEntry[];
  calibrationResult: CalibrationResultInfo | null;
  beep: { which: string; seq: number } | null;
  lastError: string | null;
  done: boolean;
}

export function initialView(): ViewState {
  return {
    connection: "connecting",
    banner: null,
    sessionId: null,
    scene: null,
    tickRateHz: 90,
    mode: null,
    snapshot: null,
    lastSeq: 0,
    staleDropped: 0,
    probe: null,
    answered: {},
    transcript: [],
    calibrationResult: null,
    beep: null,
    lastError: null,
    done: false,
  };
}

export function applyMessage(view: ViewState, msg: ServerMsg): ViewState {
  if ("seq" in msg && typeof msg.seq === "number") {
    if (msg.seq <= view.lastSeq) {
      view.staleDropped += 1;
      return view; // out-of-order or duplicate: ignore entirely
    }
    view.lastSeq = msg.seq;
  }
  switch (msg.type) {
    case "hello":
      view.sessionId = msg.session;
      view.scene = msg.scene;
      view.tickRateHz = msg.tick_rate_hz;
      view.mode = msg.mode;
      break;
    case "snapshot":
      view.snapshot = msg;
      break;
    case "calibration_probe":
      view.probe = { id: msg.probe_id, intensityMa: msg.intensity_ma, phase: msg.phase };
      view.transcript.push({
        probeId: msg.probe_id,
        intensityMa: msg.intensity_ma,
        response: null,
      });
      break;
    case "event":
      if (msg.name === "beep" || msg.name === "contact_started") {
        view.beep = { which: String(msg.which ?? msg.name), seq: msg.seq };
      } else if (msg.name === "calibration_done") {
        view.calibrationResult = msg.result as CalibrationResultInfo;
        view.probe = null;
      } else if (msg.name === "session_done" || msg.name === "session_aborted") {
        view.done = true;
      }
      break;
    case "error":
      view.lastError = msg.detail ? `${msg.reason}: ${msg.detail}` : msg.reason;
      if (msg.reason === "version_mismatch" || msg.reason === "busy") {
        view.connection = "refused";
        view.banner = view.lastError;
      }
      break;
    case "ack":
      break;
  }
  return view;
}

/** Record a local answer; returns false when the probe was already answered. */
export function recordResponse(
  view: ViewState,
  probeId: number,
  response: SubjectResponse,
): boolean {
  if (view.probe === null || view.probe.id !== probeId) return false;
  if (probeId in view.answered) return false; // double click suppressed
  view.answered[probeId] = response;
  const entry = view.transcript.find((e) => e.probeId === probeId);
  if (entry) entry.response = response;
  return true;
}

// --- derived display values (still pure pass-through of snapshot numbers) ---

export interface Gauges {
  dMeters: number;
  dHat: number;
  outlineScale: number;
  outlineBorderPx: number;
  stimulusActive: boolean;
  intensityMa: number;
  pulseWidthUs: number;
  frequencyHz: number;
  phase: string;
  holdRemainingS: number | null;
  inContact: boolean;
}

export function gauges(view: ViewState): Gauges | null {
  const s = view.snapshot;
  if (!s) return null;
  return {
    dMeters: s.d,
    dHat: s.d_hat,
    outlineScale: s.outline.scale,
    outlineBorderPx: s.outline.border_px,
    stimulusActive: s.stimulus.active,
    intensityMa: s.stimulus.intensity_ma,
    pulseWidthUs: s.stimulus.pulse_width_us,
    frequencyHz: s.stimulus.frequency_hz,
    phase: s.phase,
    holdRemainingS: s.timers.hold_remaining_s,
    inContact: s.in_contact,
  };
}

export function blackboardText(view: ViewState): string {
  if (view.connection === "refused") return view.banner ?? "connection refused";
  if (view.connection !== "connected") return "connecting to session service…";
  const s = view.snapshot;
  if (!s) return "waiting for the first snapshot…";
  if (view.done) return "session finished — thank you";
  switch (s.phase) {
    case "idle":
      return "press start to begin";
    case "calibrating":
      return view.probe
        ? `probe ${view.probe.id}: did you feel the stimulus?`
        : "calibration in progress…";
    case "trial_wait":
      return "beep! touch the top of the cube with your index finger";
    case "trial_hold":
      return s.timers.hold_remaining_s !== null
        ? `hold steady contact — ${s.timers.hold_remaining_s.toFixed(1)} s left`
        : "hold steady contact";
    case "trial_return":
      return "return your hand to the resting area";
    case "free":
      return "free drive: move the pointer over the cube; depth follows the vertical axis";
    default:
      return s.phase;
  }
}

/**
 * Waveform sketch of the commanded stimulus: one period of the biphasic
 * square wave as normalized [t01, amp01] points for a polyline. Drawn purely
 * from snapshot parameters.
 */
export function pulseSketch(view: ViewState): Array<[number, number]> {
  const s = view.snapshot;
  if (!s || !s.stimulus.active || s.stimulus.frequency_hz <= 0) {
    return [
      [0, 0.5],
      [1, 0.5],
    ];
  }
  const period_us = 1e6 / s.stimulus.frequency_hz;
  const w = Math.min(s.stimulus.pulse_width_us / period_us, 0.45);
  // cathodic phase down, anodic phase up, then flat
  return [
    [0, 0.5],
    [0, 1],
    [w, 1],
    [w, 0],
    [2 * w, 0],
    [2 * w, 0.5],
    [1, 0.5],
  ];
}
