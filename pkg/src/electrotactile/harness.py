"""Desk-scale reproduction of the contact-precision experiment.

One trial: the fingertip travels from the resting area, arcs over the cube,
descends into its top face, holds contact for three seconds while the
subject's motor loop reacts to whatever feedback the condition provides, and
the interpenetration depth is sampled every tick. A session strings 96 such
trials (2 parts x 4 feedback blocks x 12 repetitions) around three
calibrations, with threshold habituation applied between them.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Optional

from .calibration import (
    CalibrationConfig,
    CalibrationError,
    CalibrationOutcome,
    run_calibration,
)
from .contact import (
    AxisAlignedBox,
    FingertipState,
    HalfSpace,
    InterpenetrationSample,
    SceneObject,
    Vec3,
    interpenetration,
    resolve_proxy,
)
from .modulation import STIMULUS_OFF, ModulationConfig, electro_map
from .schedule import Condition, Feedback, PlanEntry, SessionPlan, build_plan
from .stimulator import StimulatorSim, StimulusDriver
from .subject import SubjectModel, SyntheticSubject

import numpy as np


@dataclass(frozen=True, slots=True)
class SceneSpec:
    """Task geometry: a 15 cm cube on a table, resting area to the right."""

    cube_edge_m: float = 0.15
    table_height_m: float = 0.75
    cube_center_x_m: float = -0.25
    cube_center_z_m: float = 0.35
    rest_offset_x_m: float = 0.5  # resting area sits this far to the right of the cube

    def __post_init__(self):
        if abs(self.cube_edge_m - 0.15) > 1e-12:
            raise ValueError("the task cube has a fixed 15 cm edge")
        if self.table_height_m <= 0:
            raise ValueError("table height must be positive")

    @property
    def cube_top_y_m(self) -> float:
        return self.table_height_m + self.cube_edge_m

    @property
    def contact_point(self) -> Vec3:
        """Center of the cube's top face: the target the finger descends onto."""
        return Vec3(self.cube_center_x_m, self.cube_top_y_m, self.cube_center_z_m)

    @property
    def rest_pos(self) -> Vec3:
        return Vec3(
            self.cube_center_x_m + self.rest_offset_x_m,
            self.table_height_m + 0.10,
            self.cube_center_z_m,
        )

    def to_scene(self) -> list[SceneObject]:
        half = self.cube_edge_m / 2.0
        cube = SceneObject(
            id="cube",
            shape=AxisAlignedBox(
                center=Vec3(self.cube_center_x_m, self.table_height_m + half, self.cube_center_z_m),
                half_extents=Vec3(half, half, half),
            ),
        )
        table = SceneObject(
            id="table",
            shape=HalfSpace(
                point=Vec3(0.0, self.table_height_m, 0.0),
                outward_normal=Vec3(0.0, 1.0, 0.0),
            ),
        )
        return [cube, table]


@dataclass(frozen=True, slots=True)
class HarnessConfig:
    tick_rate_hz: float = 90.0
    hold_duration_s: float = 3.0
    approach_duration_s: float = 1.0
    contact_grace_s: float = 0.1
    nominal_depth_m: float = 0.02
    max_attempts_per_trial: int = 3
    keep_samples: bool = True

    def __post_init__(self):
        if self.tick_rate_hz <= 0 or self.hold_duration_s <= 0 or self.approach_duration_s <= 0:
            raise ValueError("rates and durations must be positive")
        if self.contact_grace_s < 0 or self.nominal_depth_m < 0:
            raise ValueError("grace and nominal depth must be >= 0")
        if self.max_attempts_per_trial < 1:
            raise ValueError("max_attempts_per_trial must be >= 1")


class TrialWindow:
    """Bookkeeping for the 3-second contact window.

    Counts only in-contact ticks toward the window, pausing during momentary
    contact losses; a loss longer than the grace invalidates the attempt.
    Metrics are accumulated incrementally (Welford) as samples arrive.
    """

    def __init__(self, hold_s: float, grace_s: float, dt: float, keep_samples: bool = True):
        self.target_ticks = int(round(hold_s / dt))
        self.grace_ticks = int(math.ceil(grace_s / dt))
        self.dt = dt
        self.keep_samples = keep_samples
        self.samples: list[InterpenetrationSample] = []
        self.ticks = 0
        self.lost_ticks = 0
        self._mean = 0.0
        self._m2 = 0.0
        self._max = 0.0

    def feed(self, sample: InterpenetrationSample, in_contact: bool) -> str:
        """Advance one tick; returns 'continue', 'done', or 'invalid'."""
        if not in_contact:
            self.lost_ticks += 1
            if self.lost_ticks > self.grace_ticks:
                return "invalid"
            return "continue"
        self.lost_ticks = 0
        self.ticks += 1
        if self.keep_samples:
            self.samples.append(sample)
        delta = sample.d - self._mean
        self._mean += delta / self.ticks
        self._m2 += delta * (sample.d - self._mean)
        if sample.d > self._max:
            self._max = sample.d
        return "done" if self.ticks >= self.target_ticks else "continue"

    @property
    def n_samples(self) -> int:
        return self.ticks

    @property
    def avg_d(self) -> float:
        return self._mean if self.ticks else float("nan")

    @property
    def std_d(self) -> float:
        # Population standard deviation over the window samples.
        return math.sqrt(self._m2 / self.ticks) if self.ticks else float("nan")

    @property
    def max_d(self) -> float:
        return self._max if self.ticks else float("nan")


@dataclass
class TrialRecord:
    participant_id: int
    part: int
    block: int
    repetition: int
    attempt: int
    condition: Condition
    valid: bool
    avg_d: float
    std_d: float
    max_d: float
    n_samples: int
    t_start_beep: float
    t_contact_start: Optional[float]
    t_end_beep: Optional[float]
    stim_exposure_s: float
    invalid_reason: Optional[str] = None
    samples: list[InterpenetrationSample] = field(default_factory=list)


def minimum_jerk(tau: float) -> float:
    """Smooth 0..1 position profile with zero end velocity/acceleration."""
    tau = min(max(tau, 0.0), 1.0)
    return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau))


def _approach_pos(rest: Vec3, hover: Vec3, target: Vec3, t: float, duration: float) -> Vec3:
    """Two-segment reach: arc to a hover point above the cube, then descend.

    Descending vertically onto the top face guarantees entry through it
    rather than through a side face.
    """
    split = 0.6 * duration
    if t <= split:
        return rest.lerp(hover, minimum_jerk(t / split))
    return hover.lerp(target, minimum_jerk((t - split) / (duration - split)))


def run_trial(
    entry: PlanEntry,
    scene_spec: SceneSpec,
    subject: SyntheticSubject,
    modulation_cfg: ModulationConfig,
    harness_cfg: HarnessConfig,
    device: Optional[StimulatorSim] = None,
    driver: Optional[StimulusDriver] = None,
    participant_id: int = 0,
    attempt: int = 0,
    scene: Optional[list[SceneObject]] = None,
) -> TrialRecord:
    """Simulate one repetition: rest, approach, 3-second hold, metrics."""
    cfg = harness_cfg
    dt = 1.0 / cfg.tick_rate_hz
    if scene is None:
        scene = scene_spec.to_scene()
    if driver is None:
        driver = StimulusDriver(device if device is not None else StimulatorSim())

    contact = scene_spec.contact_point
    rest = scene_spec.rest_pos
    hover = Vec3(contact.x, contact.y + 0.03, contact.z)
    electro = entry.condition.feedback.has_electrotactile
    any_feedback = entry.condition.feedback is not Feedback.NONE

    window = TrialWindow(cfg.hold_duration_s, cfg.contact_grace_s, dt, cfg.keep_samples)
    state = FingertipState.free(rest)
    approach_timeout = cfg.approach_duration_s + 1.0

    t = 0.0
    t_contact: Optional[float] = None
    t_end: Optional[float] = None
    last_d_hat = 0.0
    stim_on_s = 0.0
    invalid_reason: Optional[str] = None

    while True:
        t += dt
        if t <= cfg.approach_duration_s:
            # Reach over the cube and descend exactly onto the top face; the
            # subject starts pressing in only once the approach is over.
            real = _approach_pos(rest, hover, contact, t, cfg.approach_duration_s)
        else:
            feedback_strength = last_d_hat if any_feedback else 0.0
            depth = subject.steer(feedback_strength, cfg.nominal_depth_m, dt)
            real = Vec3(contact.x, contact.y - depth, contact.z)

        state = resolve_proxy(state, real, scene)
        sample = interpenetration(state, t)

        if t_contact is None:
            if not state.in_contact:
                if t > approach_timeout:
                    invalid_reason = "no_contact"
                    break
                continue
            t_contact = t

        status = window.feed(sample, state.in_contact)
        last_d_hat = sample.d_hat
        if electro:
            params = electro_map(sample.d_hat, modulation_cfg)
            driver.update(params)
            if params.active:
                stim_on_s += dt
        if status == "done":
            t_end = t
            break
        if status == "invalid":
            invalid_reason = "contact_lost"
            break

    driver.update(STIMULUS_OFF)

    return TrialRecord(
        participant_id=participant_id,
        part=entry.part,
        block=entry.block,
        repetition=entry.repetition,
        attempt=attempt,
        condition=entry.condition,
        valid=invalid_reason is None,
        avg_d=window.avg_d,
        std_d=window.std_d,
        max_d=window.max_d,
        n_samples=window.n_samples,
        t_start_beep=0.0,
        t_contact_start=t_contact,
        t_end_beep=t_end,
        stim_exposure_s=stim_on_s,
        invalid_reason=invalid_reason,
        samples=window.samples,
    )


@dataclass
class SessionDataset:
    """Everything one participant produced: plan, trials, calibrations."""

    participant_id: int
    seed: int
    status: str
    plan: SessionPlan
    trials: list[TrialRecord]
    calibrations: dict[str, CalibrationOutcome]

    @property
    def complete(self) -> bool:
        return self.status == "complete"


@dataclass(frozen=True)
class SessionConfig:
    """Bundle of every sub-configuration a session needs."""

    seed: int = 0
    participants: int = 1
    scene: SceneSpec = field(default_factory=SceneSpec)
    subject: SubjectModel = field(default_factory=SubjectModel)
    modulation: ModulationConfig = field(default_factory=ModulationConfig)
    calibration: CalibrationConfig = field(default_factory=CalibrationConfig)
    harness: HarnessConfig = field(default_factory=HarnessConfig)


def make_subject(cfg: SessionConfig, participant_id: int) -> SyntheticSubject:
    """Participant-specific subject with an rng derived from (seed, id)."""
    rng = np.random.default_rng([cfg.seed, participant_id])
    return SyntheticSubject(cfg.subject, rng=rng)


def run_session(participant_id: int, cfg: SessionConfig) -> SessionDataset:
    """Run the full protocol for one participant.

    Sequence: initial calibration, part 1, re-calibration, part 2, final
    calibration. Habituation is applied before each re-calibration using the
    stimulation exposure accumulated since the previous one. An aborted
    calibration ends the session early; whatever completed stays in the
    dataset with a status flag.
    """
    subject = make_subject(cfg, participant_id)
    plan = build_plan(participant_id, cfg.seed)
    scene = cfg.scene.to_scene()
    device = StimulatorSim()
    driver = StimulusDriver(device)

    trials: list[TrialRecord] = []
    calibrations: dict[str, CalibrationOutcome] = {}
    exposure_s = 0.0
    status = "complete"

    def calibrate(label: str) -> Optional[CalibrationOutcome]:
        nonlocal exposure_s, status
        try:
            outcome = run_calibration(subject.respond, cfg.calibration)
        except CalibrationError as exc:
            status = f"aborted_calibration_{label}: {exc}"
            return None
        calibrations[label] = outcome
        exposure_s += outcome.exposure_s
        return outcome

    def run_part(part: int, modulation_cfg: ModulationConfig) -> None:
        nonlocal exposure_s
        for block in plan.part_blocks(part):
            queue = deque((entry, 0) for entry in block)
            while queue:
                entry, attempt = queue.popleft()
                record = run_trial(
                    entry,
                    cfg.scene,
                    subject,
                    modulation_cfg,
                    cfg.harness,
                    driver=driver,
                    participant_id=participant_id,
                    attempt=attempt,
                    scene=scene,
                )
                trials.append(record)
                exposure_s += record.stim_exposure_s
                if not record.valid and attempt + 1 < cfg.harness.max_attempts_per_trial:
                    queue.append((entry, attempt + 1))

    initial = calibrate("initial")
    if initial is not None:
        modulation_cfg = replace(cfg.modulation, intensity_ma=initial.result.working_intensity_ma)
        run_part(1, modulation_cfg)
        subject.habituate(exposure_s / 3600.0)
        exposure_s = 0.0
        middle = calibrate("middle")
        if middle is not None:
            modulation_cfg = replace(cfg.modulation, intensity_ma=middle.result.working_intensity_ma)
            run_part(2, modulation_cfg)
            subject.habituate(exposure_s / 3600.0)
            exposure_s = 0.0
            calibrate("final")

    return SessionDataset(
        participant_id=participant_id,
        seed=cfg.seed,
        status=status,
        plan=plan,
        trials=trials,
        calibrations=calibrations,
    )


def run_participants(cfg: SessionConfig) -> list[SessionDataset]:
    return [run_session(pid, cfg) for pid in range(cfg.participants)]
