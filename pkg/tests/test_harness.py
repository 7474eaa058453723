"""Trial and session harness tests, with brute-force metric oracles."""

import numpy as np
import pytest

from electrotactile.contact import InterpenetrationSample
from electrotactile.harness import (
    HarnessConfig,
    SceneSpec,
    SessionConfig,
    TrialWindow,
    run_session,
    run_trial,
)
from electrotactile.modulation import ModulationConfig
from electrotactile.schedule import Condition, Feedback, PlanEntry, Shading, build_plan
from electrotactile.stimulator import SetStimulus, Start, StimulatorSim
from electrotactile.subject import SubjectModel, SyntheticSubject


def entry(feedback=Feedback.NONE, part=1, block=0, rep=0):
    return PlanEntry(part, block, rep, Condition(feedback, Shading.OPAQUE))


def quiet_subject(**kwargs):
    defaults = dict(motor_tremor_sd_m=0.0, response_noise_sd_ma=0.0)
    defaults.update(kwargs)
    return SyntheticSubject(SubjectModel(**defaults))


# --- window metrics ------------------------------------------------------------


def feed_series(depths, dt=1.0 / 90.0):
    window = TrialWindow(hold_s=len(depths) * dt, grace_s=0.1, dt=dt)
    for k, d in enumerate(depths):
        window.feed(InterpenetrationSample(t=k * dt, d=d, d_hat=min(d / 0.03, 1.0)), True)
    return window


def test_metrics_hand_computed_series():
    window = feed_series([0.01, 0.02, 0.03])
    assert window.avg_d == pytest.approx(0.02)
    assert window.max_d == pytest.approx(0.03)
    # population standard deviation of [0.01, 0.02, 0.03]
    assert window.std_d == pytest.approx(0.008164965809277261, rel=1e-9)


def test_incremental_metrics_match_brute_force():
    rng = np.random.default_rng(11)
    depths = rng.uniform(0.0, 0.03, size=500).tolist()
    window = feed_series(depths)
    arr = np.array([s.d for s in window.samples])
    assert window.avg_d == pytest.approx(float(arr.mean()), rel=1e-12)
    assert window.std_d == pytest.approx(float(arr.std(ddof=0)), rel=1e-12)
    assert window.max_d == pytest.approx(float(arr.max()), rel=1e-12)


def test_window_pauses_during_grace_and_resumes():
    dt = 1.0 / 90.0
    window = TrialWindow(hold_s=10 * dt, grace_s=0.1, dt=dt)
    sample = InterpenetrationSample(0.0, 0.01, 0.33)
    for _ in range(5):
        assert window.feed(sample, True) == "continue"
    for _ in range(3):  # 33 ms loss, inside the 100 ms grace
        assert window.feed(sample, False) == "continue"
    results = [window.feed(sample, True) for _ in range(5)]
    assert results[-1] == "done"
    assert window.n_samples == 10


def test_window_invalidates_after_grace_exceeded():
    dt = 1.0 / 90.0
    window = TrialWindow(hold_s=1.0, grace_s=0.1, dt=dt)
    sample = InterpenetrationSample(0.0, 0.01, 0.33)
    window.feed(sample, True)
    outcomes = [window.feed(sample, False) for _ in range(10)]
    assert outcomes[-1] == "invalid"
    assert "invalid" not in outcomes[:-1]


# --- single trials ---------------------------------------------------------------


def test_constant_depth_trial_metrics():
    record = run_trial(
        entry(Feedback.NONE),
        SceneSpec(),
        quiet_subject(),
        ModulationConfig(),
        HarnessConfig(),
    )
    assert record.valid
    assert record.avg_d == pytest.approx(0.02, abs=1e-12)
    assert record.std_d == pytest.approx(0.0, abs=1e-12)
    assert record.max_d == pytest.approx(0.02, abs=1e-12)


def test_window_sample_count_270_at_90hz():
    record = run_trial(
        entry(Feedback.NONE), SceneSpec(), quiet_subject(), ModulationConfig(), HarnessConfig()
    )
    assert abs(record.n_samples - 270) <= 1
    assert record.t_contact_start is not None
    assert record.t_end_beep is not None
    held = record.t_end_beep - record.t_contact_start
    assert held == pytest.approx(3.0, abs=2 / 90)


def test_trial_incremental_equals_post_hoc():
    record = run_trial(
        entry(Feedback.ELECTROTACTILE),
        SceneSpec(),
        quiet_subject(motor_tremor_sd_m=0.002),
        ModulationConfig(),
        HarnessConfig(),
    )
    arr = np.array([s.d for s in record.samples])
    assert record.avg_d == pytest.approx(float(arr.mean()), rel=1e-12)
    assert record.std_d == pytest.approx(float(arr.std(ddof=0)), rel=1e-12)
    assert record.max_d == pytest.approx(float(arr.max()), rel=1e-12)


def test_no_stimulation_under_none_and_visual():
    for feedback in (Feedback.NONE, Feedback.VISUAL):
        device = StimulatorSim()
        record = run_trial(
            entry(feedback),
            SceneSpec(),
            quiet_subject(motor_tremor_sd_m=0.001),
            ModulationConfig(),
            HarnessConfig(),
            device=device,
        )
        assert record.valid
        assert device.command_log == []
        assert not device.stimulation_commanded()


def test_stimulation_commanded_under_electro_conditions():
    for feedback in (Feedback.ELECTROTACTILE, Feedback.VISUO_ELECTROTACTILE):
        device = StimulatorSim()
        record = run_trial(
            entry(feedback), SceneSpec(), quiet_subject(), ModulationConfig(), HarnessConfig(),
            device=device,
        )
        assert record.valid
        cmds = [cmd for _, cmd in device.command_log]
        assert any(isinstance(c, SetStimulus) for c in cmds)
        assert any(isinstance(c, Start) for c in cmds)
        assert record.stim_exposure_s > 0


def test_feedback_reduces_depth_vs_none():
    none_rec = run_trial(
        entry(Feedback.NONE), SceneSpec(), quiet_subject(), ModulationConfig(), HarnessConfig()
    )
    fb_rec = run_trial(
        entry(Feedback.VISUAL), SceneSpec(), quiet_subject(), ModulationConfig(), HarnessConfig()
    )
    assert fb_rec.avg_d < none_rec.avg_d * 0.9


class ScriptedSubject:
    """Steers a fixed depth script; answers probes like a quiet subject."""

    def __init__(self, depths, default=0.02):
        self.depths = list(depths)
        self.default = default
        self.inner = quiet_subject()

    def respond(self, probe):
        return self.inner.respond(probe)

    def steer(self, feedback_strength, nominal_depth_m, tick_dt_s):
        if self.depths:
            return self.depths.pop(0)
        return self.default


def test_contact_loss_beyond_grace_invalidates():
    # 50 in-contact ticks, then 20 ticks (222 ms) fully withdrawn.
    subject = ScriptedSubject([0.02] * 50 + [0.0] * 20, default=0.02)
    record = run_trial(
        entry(Feedback.NONE), SceneSpec(), subject, ModulationConfig(), HarnessConfig()
    )
    assert not record.valid
    assert record.invalid_reason == "contact_lost"


def test_momentary_loss_pauses_and_recovers():
    subject = ScriptedSubject([0.02] * 50 + [0.0] * 5 + [0.02] * 500, default=0.02)
    record = run_trial(
        entry(Feedback.NONE), SceneSpec(), subject, ModulationConfig(), HarnessConfig()
    )
    assert record.valid
    assert abs(record.n_samples - 270) <= 1


def test_no_contact_times_out_invalid():
    subject = ScriptedSubject([], default=0.0)  # never penetrates
    record = run_trial(
        entry(Feedback.NONE), SceneSpec(), subject, ModulationConfig(),
        HarnessConfig(nominal_depth_m=0.0),
    )
    assert not record.valid
    assert record.invalid_reason == "no_contact"
    assert record.n_samples == 0


# --- sessions --------------------------------------------------------------------


def session_config(**subject_kwargs):
    defaults = dict(motor_tremor_sd_m=0.0, response_noise_sd_ma=0.0)
    defaults.update(subject_kwargs)
    return SessionConfig(seed=5, subject=SubjectModel(**defaults))


def test_session_structure_and_counts():
    ds = run_session(0, session_config())
    assert ds.status == "complete"
    assert len(ds.trials) == 96
    assert all(t.valid for t in ds.trials)
    assert set(ds.calibrations) == {"initial", "middle", "final"}


def test_parts_identical_without_noise_or_habituation():
    ds = run_session(0, session_config())
    by_part = {1: {}, 2: {}}
    for tr in ds.trials:
        by_part[tr.part].setdefault(tr.condition.feedback, []).append(tr.avg_d)
    for feedback in by_part[1]:
        a = np.mean(by_part[1][feedback])
        b = np.mean(by_part[2][feedback])
        assert a == pytest.approx(b, rel=1e-9)


def test_habituation_raises_thresholds_across_calibrations():
    ds = run_session(0, session_config(habituation_gain_per_hour=3.0))
    initial = ds.calibrations["initial"].result
    middle = ds.calibrations["middle"].result
    final = ds.calibrations["final"].result
    assert middle.detection_threshold_ma > initial.detection_threshold_ma
    assert middle.discomfort_threshold_ma > initial.discomfort_threshold_ma
    assert final.detection_threshold_ma > initial.detection_threshold_ma
    assert final.discomfort_threshold_ma > initial.discomfort_threshold_ma


def test_retry_rows_extend_dataset():
    # A subject whose depth script fails exactly one trial: the failed
    # attempt stays in the dataset and a retry runs at block end.
    class OneFailSubject(ScriptedSubject):
        def __init__(self):
            # First trial: approach script holds 0.02 m for 30 ticks, then
            # withdraws for 20 ticks (loss > grace) -> invalid.
            super().__init__([0.02] * 30 + [0.0] * 20, default=0.02)

    subject = OneFailSubject()
    cfg = session_config()
    plan = build_plan(0, cfg.seed)
    blocks = plan.part_blocks(1)
    from collections import deque

    records = []
    queue = deque((e, 0) for e in blocks[0])
    while queue:
        e, attempt = queue.popleft()
        rec = run_trial(e, cfg.scene, subject, cfg.modulation, cfg.harness, attempt=attempt)
        records.append(rec)
        if not rec.valid and attempt + 1 < cfg.harness.max_attempts_per_trial:
            queue.append((e, attempt + 1))
    assert len(records) == 13
    assert sum(1 for r in records if not r.valid) == 1
    failed = next(r for r in records if not r.valid)
    retry = records[-1]
    assert (retry.part, retry.block, retry.repetition) == (
        failed.part,
        failed.block,
        failed.repetition,
    )
    assert retry.attempt == 1 and retry.valid


def test_feedback_direction_over_sessions():
    cfg = SessionConfig(
        seed=11,
        subject=SubjectModel(motor_tremor_sd_m=0.001, response_noise_sd_ma=0.02),
    )
    means = {f: [] for f in Feedback}
    for pid in range(3):
        ds = run_session(pid, cfg)
        for tr in ds.trials:
            if tr.valid:
                means[tr.condition.feedback].append(tr.avg_d)
    baseline = np.mean(means[Feedback.NONE])
    for feedback in (Feedback.VISUAL, Feedback.ELECTROTACTILE, Feedback.VISUO_ELECTROTACTILE):
        assert np.mean(means[feedback]) < 0.9 * baseline


def test_scene_spec_fixed_cube_edge():
    with pytest.raises(ValueError):
        SceneSpec(cube_edge_m=0.2)
    spec = SceneSpec()
    assert spec.cube_top_y_m == pytest.approx(0.90)
    objects = {o.id for o in spec.to_scene()}
    assert objects == {"cube", "table"}
