"""Synthetic psychophysical participant.

A deliberately simple stand-in for a human subject: noisy fixed thresholds
for answering calibration probes, multiplicative threshold drift with
stimulation exposure (habituation), and a one-parameter motor model in which
perceived feedback pulls the aimed-for contact depth toward the surface.
It reproduces the *direction* of human behavior (feedback reduces
interpenetration, tolerance grows with exposure), never effect sizes.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .calibration import SubjectResponse
from .modulation import StimulusParams

_THRESHOLD_FLOOR_MA = 0.1
_THRESHOLD_CEIL_MA = 9.0


@dataclass(frozen=True, slots=True)
class SubjectModel:
    """Parameters describing one synthetic participant (JSON-loadable)."""

    detect_threshold_ma: float = 1.15
    discomfort_threshold_ma: float = 2.95
    habituation_gain_per_hour: float = 0.0
    response_noise_sd_ma: float = 0.0
    motor_tremor_sd_m: float = 0.0
    depth_control_gain: float = 0.8
    rng_seed: int = 0

    def __post_init__(self):
        if not _THRESHOLD_FLOOR_MA <= self.detect_threshold_ma < self.discomfort_threshold_ma <= _THRESHOLD_CEIL_MA:
            raise ValueError(
                "thresholds must satisfy 0.1 <= detect < discomfort <= 9 mA, got "
                f"{self.detect_threshold_ma} / {self.discomfort_threshold_ma}"
            )
        if self.response_noise_sd_ma < 0 or self.motor_tremor_sd_m < 0:
            raise ValueError("noise standard deviations must be >= 0")
        if not 0.0 <= self.depth_control_gain <= 1.0:
            raise ValueError("depth_control_gain must be in [0, 1]")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "SubjectModel":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown subject fields: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def from_json(cls, path) -> "SubjectModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.as_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


class SyntheticSubject:
    """Stateful participant: answers probes, drifts with exposure, steers depth.

    All randomness comes from one seeded generator, so identical seeds and
    call sequences reproduce identical behavior exactly.
    """

    def __init__(self, model: SubjectModel, rng: Optional[np.random.Generator] = None):
        self.model = model
        self.detect_ma = model.detect_threshold_ma
        self.discomfort_ma = model.discomfort_threshold_ma
        self.rng = rng if rng is not None else np.random.default_rng(model.rng_seed)

    def respond(self, probe: StimulusParams) -> SubjectResponse:
        """Answer one calibration probe against noisy effective thresholds."""
        noise = self.model.response_noise_sd_ma
        detect = self.detect_ma + self.rng.normal(0.0, noise)
        discomfort = self.discomfort_ma + self.rng.normal(0.0, noise)
        if probe.intensity_ma >= discomfort:
            return SubjectResponse.DISCOMFORT
        if probe.intensity_ma >= detect:
            return SubjectResponse.FELT
        return SubjectResponse.NOT_FELT

    def habituate(self, exposure_hours: float) -> None:
        """Raise both thresholds with accumulated stimulation exposure.

        The multiplier is limited so both thresholds stay inside the device
        range while keeping their ratio, which preserves detect < discomfort
        no matter how large the exposure.
        """
        if exposure_hours < 0:
            raise ValueError("exposure must be >= 0")
        scale = 1.0 + self.model.habituation_gain_per_hour * exposure_hours
        scale = max(scale, _THRESHOLD_FLOOR_MA / self.detect_ma)
        scale = min(scale, _THRESHOLD_CEIL_MA / self.discomfort_ma)
        self.detect_ma *= scale
        self.discomfort_ma *= scale

    def steer(self, feedback_strength: float, nominal_depth_m: float, tick_dt_s: float) -> float:
        """Aimed-for penetration depth for the next tick.

        Perceived feedback scales the nominal target down in proportion to
        ``depth_control_gain``; motor tremor adds per-tick noise. Never
        negative: the finger cannot hover below its own contact.
        """
        target = nominal_depth_m * (1.0 - self.model.depth_control_gain * feedback_strength)
        target += self.rng.normal(0.0, self.model.motor_tremor_sd_m)
        return max(target, 0.0)
