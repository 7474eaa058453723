// Session protocol message shapes (newline-delimited JSON / one per WS frame).
// Version "1": the server greets with hello and expects a matching hello back.

export const PROTOCOL_VERSION = "1";

export interface SceneInfo {
  cube_edge_m: number;
  cube_center: [number, number, number];
  cube_top_y_m: number;
  contact_point: [number, number, number];
  rest_pos: [number, number, number];
  table_height_m: number;
  d_max_m: number;
}

export interface HelloMsg {
  type: "hello";
  seq: number;
  session: string;
  version: string;
  mode: "session" | "calibration" | "free";
  tick_rate_hz: number;
  scene: SceneInfo;
}

export interface StimulusInfo {
  active: boolean;
  intensity_ma: number;
  pulse_width_us: number;
  frequency_hz: number;
}

export interface OutlineInfo {
  scale: number;
  border_px: number;
}

export interface SnapshotMsg {
  type: "snapshot";
  seq: number;
  session: string;
  t: number;
  phase: string;
  paused: boolean;
  status: string;
  trial: { part: number; block: number; repetition: number; attempt: number } | null;
  condition: { feedback: string; shading: string } | null;
  real_pos: [number, number, number];
  avatar_pos: [number, number, number];
  in_contact: boolean;
  d: number;
  d_hat: number;
  stimulus: StimulusInfo;
  outline: OutlineInfo;
  timers: { hold_elapsed_s: number | null; hold_remaining_s: number | null };
  calibration: { probe_id: number; awaiting_response: boolean } | null;
}

export interface CalibrationProbeMsg {
  type: "calibration_probe";
  seq: number;
  probe_id: number;
  intensity_ma: number;
  phase: string;
}

export interface CalibrationResultInfo {
  detection_threshold_ma: number;
  discomfort_threshold_ma: number;
  working_intensity_ma: number;
}

export interface EventMsg {
  type: "event";
  seq: number;
  name: string;
  t: number;
  [extra: string]: unknown;
}

export interface AckMsg {
  type: "ack";
  seq: number;
  ack: number;
}

export interface ErrorMsg {
  type: "error";
  seq?: number;
  reason: string;
  detail?: string;
}

export type ServerMsg =
  | HelloMsg
  | SnapshotMsg
  | CalibrationProbeMsg
  | EventMsg
  | AckMsg
  | ErrorMsg;

export type SubjectResponse = "felt" | "not_felt" | "discomfort";

export type ClientMsg =
  | { type: "hello"; version: string; seq?: number }
  | { type: "finger_input"; pos: [number, number, number]; seq?: number }
  | { type: "calibration_response"; probe_id: number; response: SubjectResponse; seq?: number }
  | { type: "control"; action: "start" | "pause" | "abort"; seq?: number };

export function parseServerMsg(line: string): ServerMsg | null {
  let doc: unknown;
  try {
    doc = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null || !("type" in doc)) return null;
  return doc as ServerMsg;
}

export function serialize(msg: ClientMsg): string {
  return JSON.stringify(msg);
}
