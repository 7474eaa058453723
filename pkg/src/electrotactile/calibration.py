"""Per-subject intensity calibration by the method of limits.

Three phases, always in order: ascend from a low intensity until the stimulus
is first felt (detection), keep ascending until it turns uncomfortable
(discomfort), then descend from the third quartile of the detection-discomfort
range until it is no longer felt. The detection threshold is the mean of the
ascending and descending estimates; the working intensity used during trials
interpolates between detection and discomfort.

Probes always use the strongest modulated waveform (500 µs, 200 Hz) so the
calibration covers the worst case the feedback can produce.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .modulation import StimulusParams

#: Probe pacing used by drivers: stimulus on-time and gap between probes.
PROBE_ON_S = 1.0
PROBE_OFF_S = 0.5

#: Hardware ceiling; ascending past this aborts the calibration.
MAX_INTENSITY_MA = 9.0


class CalibrationError(RuntimeError):
    pass


class CalibrationSafetyError(CalibrationError):
    """Ascent reached the hardware intensity ceiling without a response."""


class CalibrationInvalidError(CalibrationError):
    """Recorded thresholds are unusable (detection >= discomfort)."""


class SubjectResponse(str, Enum):
    NOT_FELT = "not_felt"
    FELT = "felt"
    DISCOMFORT = "discomfort"


class Phase(str, Enum):
    ASCEND_DETECT = "ascend_detect"
    ASCEND_DISCOMFORT = "ascend_discomfort"
    DESCEND = "descend"
    DONE = "done"


@dataclass(frozen=True, slots=True)
class CalibrationConfig:
    step_ma: float = 0.1
    start_ma: float = 0.1
    working_fraction: float = 0.5  # 0 -> detection threshold, 1 -> discomfort
    probe_frequency_hz: float = 200.0
    probe_pulse_width_us: float = 500.0

    def __post_init__(self):
        if self.step_ma <= 0:
            raise ValueError("step_ma must be positive")
        if self.start_ma <= 0:
            raise ValueError("start_ma must be positive")
        if not 0.0 <= self.working_fraction <= 1.0:
            raise ValueError("working_fraction must be in [0, 1]")


@dataclass(frozen=True, slots=True)
class CalibrationResult:
    detection_threshold_ma: float
    discomfort_threshold_ma: float
    working_intensity_ma: float

    def as_dict(self) -> dict:
        return {
            "detection_threshold_ma": self.detection_threshold_ma,
            "discomfort_threshold_ma": self.discomfort_threshold_ma,
            "working_intensity_ma": self.working_intensity_ma,
        }


@dataclass(frozen=True, slots=True)
class ProbeRecord:
    phase: Phase
    intensity_ma: float
    response: SubjectResponse
    t: float


@dataclass
class MethodOfLimits:
    """Sequential calibration state machine.

    Drive it with alternating ``next_probe()`` / ``record_response()`` calls;
    phases advance strictly AscendDetect -> AscendDiscomfort -> Descend ->
    Done and every probe lies on the configured intensity grid.
    """

    config: CalibrationConfig = field(default_factory=CalibrationConfig)
    phase: Phase = Phase.ASCEND_DETECT
    detect_up_ma: Optional[float] = None
    discomfort_ma: Optional[float] = None
    detect_down_ma: Optional[float] = None
    result: Optional[CalibrationResult] = None
    transcript: list[ProbeRecord] = field(default_factory=list)
    anomalies: list[str] = field(default_factory=list)
    _grid_index: int = 0  # intensity = start_ma + index * step_ma

    @property
    def done(self) -> bool:
        return self.phase is Phase.DONE

    @property
    def current_intensity_ma(self) -> float:
        return self.config.start_ma + self._grid_index * self.config.step_ma

    def next_probe(self) -> StimulusParams:
        """Stimulus for the next probe, at the strongest modulation settings."""
        if self.done:
            raise CalibrationError("calibration already finished")
        return StimulusParams(
            intensity_ma=self.current_intensity_ma,
            pulse_width_us=self.config.probe_pulse_width_us,
            frequency_hz=self.config.probe_frequency_hz,
            active=True,
        )

    def record_response(self, response: SubjectResponse, t: float = 0.0) -> None:
        """Apply the subject's answer to the probe last issued by next_probe."""
        if self.done:
            raise CalibrationError("calibration already finished")
        intensity = self.current_intensity_ma
        self.transcript.append(ProbeRecord(self.phase, intensity, response, t))

        if self.phase is Phase.ASCEND_DETECT:
            if response is SubjectResponse.NOT_FELT:
                self._step_up()
            elif response is SubjectResponse.FELT:
                self.detect_up_ma = intensity
                self.phase = Phase.ASCEND_DISCOMFORT
                self._step_up()
            else:
                # Discomfort before anything was merely felt: take this
                # intensity as both events and go straight to the descent.
                self.anomalies.append(
                    f"discomfort reported during {Phase.ASCEND_DETECT.value} "
                    f"at {intensity:.2f} mA"
                )
                self.detect_up_ma = intensity
                self.discomfort_ma = intensity
                self._start_descent()
        elif self.phase is Phase.ASCEND_DISCOMFORT:
            if response is SubjectResponse.DISCOMFORT:
                self.discomfort_ma = intensity
                self._start_descent()
            else:
                self._step_up()
        else:  # Phase.DESCEND
            if response is SubjectResponse.NOT_FELT:
                # The previous (one step higher) intensity was the last felt.
                self.detect_down_ma = intensity + self.config.step_ma
                self.phase = Phase.DONE
                self.result = self.finalize()
            else:
                self._step_down()

    def finalize(self) -> CalibrationResult:
        """Combine the recorded series into thresholds and a working intensity."""
        if self.detect_up_ma is None or self.discomfort_ma is None or self.detect_down_ma is None:
            raise CalibrationError("calibration incomplete")
        detection = 0.5 * (self.detect_up_ma + self.detect_down_ma)
        discomfort = self.discomfort_ma
        if detection >= discomfort:
            raise CalibrationInvalidError(
                f"detection {detection:.2f} mA >= discomfort {discomfort:.2f} mA"
            )
        working = detection + self.config.working_fraction * (discomfort - detection)
        return CalibrationResult(
            detection_threshold_ma=detection,
            discomfort_threshold_ma=discomfort,
            working_intensity_ma=working,
        )

    def _step_up(self) -> None:
        self._grid_index += 1
        if self.current_intensity_ma > MAX_INTENSITY_MA + 1e-9:
            raise CalibrationSafetyError(
                f"ascent exceeded the {MAX_INTENSITY_MA} mA hardware ceiling"
            )

    def _step_down(self) -> None:
        if self._grid_index == 0:
            # Below the lowest probe the device can deliver; treat the floor
            # as the disappearance point rather than probing nothing.
            self.anomalies.append("descent reached the grid floor while still felt")
            self.detect_down_ma = self.current_intensity_ma
            self.phase = Phase.DONE
            self.result = self.finalize()
            return
        self._grid_index -= 1

    def _start_descent(self) -> None:
        assert self.detect_up_ma is not None and self.discomfort_ma is not None
        q3 = self.detect_up_ma + 0.75 * (self.discomfort_ma - self.detect_up_ma)
        # Snap DOWN onto the probe grid so every descent probe stays on it.
        index = int(math.floor((q3 - self.config.start_ma) / self.config.step_ma + 1e-9))
        self._grid_index = max(index, 0)
        self.phase = Phase.DESCEND

    def transcript_jsonl(self) -> str:
        """One JSON record per probe: phase, intensity, response, timestamp."""
        lines = [
            json.dumps(
                {
                    "phase": rec.phase.value,
                    "intensity_ma": rec.intensity_ma,
                    "response": rec.response.value,
                    "t": rec.t,
                },
                sort_keys=True,
            )
            for rec in self.transcript
        ]
        return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class CalibrationOutcome:
    result: CalibrationResult
    session: MethodOfLimits
    n_probes: int
    exposure_s: float  # total stimulus on-time delivered by the probes
    duration_s: float  # wall time of the whole calibration block


def run_calibration(
    respond: Callable[[StimulusParams], SubjectResponse],
    config: CalibrationConfig | None = None,
    t0: float = 0.0,
) -> CalibrationOutcome:
    """Run a full calibration against a responder (synthetic subject or UI shim).

    Probes are paced at PROBE_ON_S of stimulation plus PROBE_OFF_S of silence;
    transcript timestamps follow that schedule starting at ``t0``.
    """
    session = MethodOfLimits(config=config or CalibrationConfig())
    t = t0
    n = 0
    while not session.done:
        probe = session.next_probe()
        response = respond(probe)
        session.record_response(response, t=t)
        t += PROBE_ON_S + PROBE_OFF_S
        n += 1
    assert session.result is not None
    return CalibrationOutcome(
        result=session.result,
        session=session,
        n_probes=n,
        exposure_s=n * PROBE_ON_S,
        duration_s=t - t0,
    )
