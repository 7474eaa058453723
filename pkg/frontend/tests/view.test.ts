// Golden-snapshot tests for the view model: displayed values must equal the
// server's snapshot values exactly, with no client-side re-mapping.

import { describe, expect, it } from "vitest";

import type { ServerMsg, SnapshotMsg } from "../src/protocol";
import {
  applyMessage,
  blackboardText,
  gauges,
  initialView,
  pulseSketch,
  recordResponse,
} from "../src/view";

function snapshot(overrides: Partial<SnapshotMsg> = {}): SnapshotMsg {
  return {
    type: "snapshot",
    seq: 10,
    session: "s",
    t: 1.0,
    phase: "free",
    paused: false,
    status: "running",
    trial: null,
    condition: null,
    real_pos: [-0.25, 0.88, 0.35],
    avatar_pos: [-0.25, 0.9, 0.35],
    in_contact: true,
    d: 0.02,
    d_hat: 0.6667,
    stimulus: { active: true, intensity_ma: 2.1, pulse_width_us: 400, frequency_hz: 106 },
    outline: { scale: 1.1334, border_px: 3.6668 },
    timers: { hold_elapsed_s: null, hold_remaining_s: null },
    calibration: null,
    ...overrides,
  };
}

const hello: ServerMsg = {
  type: "hello",
  seq: 1,
  session: "s",
  version: "1",
  mode: "free",
  tick_rate_hz: 90,
  scene: {
    cube_edge_m: 0.15,
    cube_center: [-0.25, 0.825, 0.35],
    cube_top_y_m: 0.9,
    contact_point: [-0.25, 0.9, 0.35],
    rest_pos: [0.25, 0.85, 0.35],
    table_height_m: 0.75,
    d_max_m: 0.03,
  },
};

describe("outline and gauge fidelity", () => {
  it("passes snapshot outline values through unchanged", () => {
    const view = initialView();
    applyMessage(view, hello);
    const snap = snapshot({ outline: { scale: 1.0734, border_px: 2.468 } });
    applyMessage(view, snap);
    const g = gauges(view)!;
    expect(g.outlineScale).toBe(1.0734);
    expect(g.outlineBorderPx).toBe(2.468);
    expect(g.dMeters).toBe(snap.d);
    expect(g.dHat).toBe(snap.d_hat);
    expect(g.intensityMa).toBe(snap.stimulus.intensity_ma);
    expect(g.pulseWidthUs).toBe(snap.stimulus.pulse_width_us);
    expect(g.frequencyHz).toBe(snap.stimulus.frequency_hz);
  });

  it("full-depth snapshot shows d_hat 1 and outline ×1.2 / 5 px", () => {
    const view = initialView();
    applyMessage(view, hello);
    applyMessage(
      view,
      snapshot({
        d: 0.03,
        d_hat: 1.0,
        outline: { scale: 1.2, border_px: 5.0 },
        stimulus: { active: true, intensity_ma: 2.1, pulse_width_us: 500, frequency_hz: 200 },
      }),
    );
    const g = gauges(view)!;
    expect(g.dHat).toBe(1.0);
    expect(g.outlineScale).toBe(1.2);
    expect(g.outlineBorderPx).toBe(5.0);
    expect(g.pulseWidthUs).toBe(500);
    expect(g.frequencyHz).toBe(200);
  });

  it("matches a golden view state for a scripted message sequence", () => {
    const view = initialView();
    const script: ServerMsg[] = [
      hello,
      { type: "event", seq: 2, name: "calibration_boundary", t: 0, calibration: "initial" },
      { type: "calibration_probe", seq: 3, probe_id: 1, intensity_ma: 0.1, phase: "ascend_detect" },
      snapshot({ seq: 4, phase: "calibrating", d: 0, d_hat: 0, in_contact: false }),
      {
        type: "event",
        seq: 5,
        name: "calibration_done",
        t: 9,
        calibration: "initial",
        result: {
          detection_threshold_ma: 1.2,
          discomfort_threshold_ma: 3.0,
          working_intensity_ma: 2.1,
        },
      },
    ];
    script.forEach((m) => applyMessage(view, m));
    expect({
      lastSeq: view.lastSeq,
      probe: view.probe,
      transcript: view.transcript,
      result: view.calibrationResult,
      scene: view.scene?.cube_top_y_m,
    }).toEqual({
      lastSeq: 5,
      probe: null, // cleared once the calibration finished
      transcript: [{ probeId: 1, intensityMa: 0.1, response: null }],
      result: {
        detection_threshold_ma: 1.2,
        discomfort_threshold_ma: 3.0,
        working_intensity_ma: 2.1,
      },
      scene: 0.9,
    });
  });
});

describe("message ordering", () => {
  it("discards stale and duplicate sequence numbers", () => {
    const view = initialView();
    applyMessage(view, hello);
    applyMessage(view, snapshot({ seq: 10, d: 0.02 }));
    applyMessage(view, snapshot({ seq: 9, d: 0.99 })); // stale
    applyMessage(view, snapshot({ seq: 10, d: 0.77 })); // duplicate
    expect(view.snapshot!.d).toBe(0.02);
    expect(view.staleDropped).toBe(2);
    applyMessage(view, snapshot({ seq: 11, d: 0.01 }));
    expect(view.snapshot!.d).toBe(0.01);
  });
});

describe("calibration panel", () => {
  it("accepts exactly one response per probe id", () => {
    const view = initialView();
    applyMessage(view, {
      type: "calibration_probe",
      seq: 2,
      probe_id: 7,
      intensity_ma: 0.7,
      phase: "ascend_detect",
    });
    expect(recordResponse(view, 7, "felt")).toBe(true);
    expect(recordResponse(view, 7, "discomfort")).toBe(false); // double click
    expect(recordResponse(view, 8, "felt")).toBe(false); // not the current probe
    expect(view.transcript).toEqual([{ probeId: 7, intensityMa: 0.7, response: "felt" }]);
  });
});

describe("blackboard and cues", () => {
  it("narrates the trial phases", () => {
    const view = initialView();
    applyMessage(view, hello);
    view.connection = "connected";
    applyMessage(view, snapshot({ seq: 11, phase: "trial_wait" }));
    expect(blackboardText(view)).toMatch(/touch the top/);
    applyMessage(
      view,
      snapshot({ seq: 12, phase: "trial_hold", timers: { hold_elapsed_s: 1, hold_remaining_s: 2.0 } }),
    );
    expect(blackboardText(view)).toMatch(/2\.0 s left/);
    applyMessage(view, snapshot({ seq: 13, phase: "trial_return" }));
    expect(blackboardText(view)).toMatch(/resting area/);
  });

  it("records beeps and refusal banners", () => {
    const view = initialView();
    applyMessage(view, { type: "event", seq: 2, name: "beep", t: 0, which: "trial_start" });
    expect(view.beep).toEqual({ which: "trial_start", seq: 2 });
    applyMessage(view, { type: "error", reason: "version_mismatch", detail: "server speaks 1" });
    expect(view.connection).toBe("refused");
    expect(blackboardText(view)).toMatch(/version_mismatch/);
  });
});

describe("pulse sketch", () => {
  it("draws a flat line when the stimulus is off", () => {
    const view = initialView();
    applyMessage(
      view,
      snapshot({
        stimulus: { active: false, intensity_ma: 0, pulse_width_us: 0, frequency_hz: 0 },
      }),
    );
    expect(pulseSketch(view)).toEqual([
      [0, 0.5],
      [1, 0.5],
    ]);
  });

  it("draws the biphasic shape from snapshot parameters only", () => {
    const view = initialView();
    applyMessage(view, snapshot()); // 400 µs at 106 Hz
    const points = pulseSketch(view);
    const w = 400 / (1e6 / 106);
    expect(points[2][0]).toBeCloseTo(w, 12);
    expect(points[1][1]).toBe(1); // cathodic excursion drawn first
    expect(points[3][1]).toBe(0);
  });
});
