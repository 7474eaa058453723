"""Mapping from normalized interpenetration depth to stimulus and outline parameters.

Pulse width grows linearly with depth; frequency grows exponentially so that
the perceived (logarithmic) pulse rate rises linearly. Current intensity is
never modulated: it is fixed per subject by calibration, because small
intensity increases can turn uncomfortable quickly. The visual outline uses
plain linear ramps for its scale factor and border width.
"""

from __future__ import annotations

from dataclasses import dataclass

FREQUENCY_LAWS = ("exponential", "power")


@dataclass(frozen=True, slots=True)
class StimulusParams:
    intensity_ma: float
    pulse_width_us: float
    frequency_hz: float
    active: bool = True


#: No-stimulation sentinel: no pulses are emitted while inactive.
STIMULUS_OFF = StimulusParams(0.0, 0.0, 0.0, active=False)


@dataclass(frozen=True, slots=True)
class OutlineParams:
    scale: float      # silhouette scale factor, 1.0 = object size
    border_px: float  # outline border width; renderer may round to pixels


@dataclass(frozen=True, slots=True)
class ModulationConfig:
    """Feedback mapping ranges.

    ``intensity_ma`` is the per-subject working intensity produced by
    calibration. ``frequency_law`` selects how pulse rate follows depth:
    ``"exponential"`` (log-frequency linear in depth) or ``"power"``
    (f_min + range * depth**gamma).
    """

    pw_min_us: float = 200.0
    pw_max_us: float = 500.0
    f_min_hz: float = 30.0
    f_max_hz: float = 200.0
    intensity_ma: float = 2.0
    outline_scale_min: float = 1.0
    outline_scale_max: float = 1.2
    outline_border_min_px: float = 1.0
    outline_border_max_px: float = 5.0
    frequency_law: str = "exponential"
    gamma: float = 1.0

    def __post_init__(self):
        if not 30.0 <= self.pw_min_us < self.pw_max_us <= 500.0:
            raise ValueError(
                f"pulse width range [{self.pw_min_us}, {self.pw_max_us}] µs must be "
                "increasing and within [30, 500]"
            )
        if not 1.0 <= self.f_min_hz < self.f_max_hz <= 200.0:
            raise ValueError(
                f"frequency range [{self.f_min_hz}, {self.f_max_hz}] Hz must be "
                "increasing and within [1, 200]"
            )
        if not 0.1 <= self.intensity_ma <= 9.0:
            raise ValueError(f"intensity {self.intensity_ma} mA outside [0.1, 9]")
        if not self.outline_scale_min < self.outline_scale_max:
            raise ValueError("outline scale min must be < max")
        if not self.outline_border_min_px < self.outline_border_max_px:
            raise ValueError("outline border min must be < max")
        if self.frequency_law not in FREQUENCY_LAWS:
            raise ValueError(f"unknown frequency law {self.frequency_law!r}")
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")


def _check_depth(d_hat: float) -> None:
    if not (0.0 <= d_hat <= 1.0):
        raise ValueError(f"normalized depth {d_hat!r} outside [0, 1]")


def _lerp(lo: float, hi: float, t: float) -> float:
    # Symmetric form hits both endpoints exactly.
    return (1.0 - t) * lo + t * hi


def electro_map(d_hat: float, cfg: ModulationConfig) -> StimulusParams:
    """Stimulus parameters for a normalized interpenetration depth.

    Zero depth means no stimulation at all; contact without penetration is
    silent. For positive depth, pulse width interpolates linearly between the
    configured bounds and frequency follows the configured law.
    """
    _check_depth(d_hat)
    if d_hat == 0.0:
        return STIMULUS_OFF
    pulse_width = _lerp(cfg.pw_min_us, cfg.pw_max_us, d_hat)
    if cfg.frequency_law == "exponential":
        if d_hat == 1.0:
            frequency = cfg.f_max_hz
        else:
            frequency = cfg.f_min_hz * (cfg.f_max_hz / cfg.f_min_hz) ** d_hat
    else:
        frequency = cfg.f_min_hz + (cfg.f_max_hz - cfg.f_min_hz) * d_hat ** cfg.gamma
    return StimulusParams(
        intensity_ma=cfg.intensity_ma,
        pulse_width_us=pulse_width,
        frequency_hz=frequency,
        active=True,
    )


def visual_map(d_hat: float, cfg: ModulationConfig) -> OutlineParams:
    """Outline scale and border width for a normalized interpenetration depth."""
    _check_depth(d_hat)
    return OutlineParams(
        scale=_lerp(cfg.outline_scale_min, cfg.outline_scale_max, d_hat),
        border_px=_lerp(cfg.outline_border_min_px, cfg.outline_border_max_px, d_hat),
    )
