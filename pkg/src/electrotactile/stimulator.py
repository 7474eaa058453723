"""Simulated 32-channel electrotactile stimulator.

Covers parameter validation against the hardware ranges, biphasic square-wave
pulse-train synthesis, electrode/channel configuration, and the bit-exact
binary command protocol the device speaks. The simulator stands in for the
physical box: frames are decoded, applied to a device state, and kept in a
hex audit log.

Frame layout: 0xA5 magic, payload length, command byte, payload, XOR checksum
over all preceding bytes. Commands:

    0x01 SetChannelMode   payload = channel u8, mode u8 (0 off, 1 cathode, 2 anode)
    0x02 SetStimulus      payload = intensity u8 (units of 0.1 mA),
                          pulse width u16 big-endian (µs), frequency u8 (Hz)
    0x03 Start            no payload
    0x04 Stop             no payload
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional, Union

import numpy as np

from .modulation import STIMULUS_OFF, StimulusParams

N_CHANNELS = 32
INTENSITY_RANGE_MA = (0.1, 9.0)
PULSE_WIDTH_RANGE_US = (30.0, 500.0)
FREQUENCY_RANGE_HZ = (1.0, 200.0)

#: Default synthesis rate: >= 3 samples even at the 30 µs minimum phase width.
DEFAULT_SYNTH_RATE_HZ = 100_000.0

FRAME_MAGIC = 0xA5
CMD_SET_CHANNEL_MODE = 0x01
CMD_SET_STIMULUS = 0x02
CMD_START = 0x03
CMD_STOP = 0x04


class ParameterError(ValueError):
    """Stimulus parameters outside the hardware ranges."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class SynthesisError(ValueError):
    """Synthesis rate too low to represent the requested pulse shape."""


class EncodingError(ValueError):
    """Command value not representable in the wire encoding."""


class FrameError(ValueError):
    """Rejected frame; ``reason`` is one of magic/length/checksum/command/field."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


class ChannelMode(IntEnum):
    DISABLED = 0
    CATHODE = 1
    ANODE = 2


@dataclass(frozen=True, slots=True)
class ChannelConfig:
    channel_id: int
    mode: ChannelMode

    def __post_init__(self):
        if not 0 <= self.channel_id < N_CHANNELS:
            raise ValueError(f"channel_id {self.channel_id} outside 0..{N_CHANNELS - 1}")


@dataclass(frozen=True)
class ElectrodeLayout:
    """Fingertip electrode wiring.

    ``cathodes`` is a 2x3 grid of channel ids in row-major order; ``anodes``
    lists the channels driving the two lateral anode pads, which are
    interconnected and act as a single electrical node.
    """

    cathodes: tuple[int, ...]
    anodes: tuple[int, ...]

    def __post_init__(self):
        if len(self.cathodes) != 6:
            raise ValueError(f"expected 6 cathodes (2x3 grid), got {len(self.cathodes)}")
        if not self.anodes:
            raise ValueError("anode list must be non-empty")
        ids = list(self.cathodes) + list(self.anodes)
        if len(set(ids)) != len(ids):
            raise ValueError("electrode channel ids must be distinct")
        for cid in ids:
            if not 0 <= cid < N_CHANNELS:
                raise ValueError(f"channel id {cid} outside 0..{N_CHANNELS - 1}")

    def channel_configs(self) -> list[ChannelConfig]:
        out = [ChannelConfig(cid, ChannelMode.CATHODE) for cid in self.cathodes]
        out += [ChannelConfig(cid, ChannelMode.ANODE) for cid in self.anodes]
        return out


def default_fingertip_layout() -> ElectrodeLayout:
    return ElectrodeLayout(cathodes=(0, 1, 2, 3, 4, 5), anodes=(6, 7))


@dataclass(frozen=True, slots=True)
class ParamViolation:
    name: str
    value: float
    low: float
    high: float

    def __str__(self) -> str:
        return f"{self.name}={self.value} outside [{self.low}, {self.high}]"


def validate_params(p: StimulusParams) -> list[ParamViolation]:
    """Every hardware-range violation in ``p``; empty list means valid."""
    violations = []
    checks = (
        ("intensity_ma", p.intensity_ma, INTENSITY_RANGE_MA),
        ("pulse_width_us", p.pulse_width_us, PULSE_WIDTH_RANGE_US),
        ("frequency_hz", p.frequency_hz, FREQUENCY_RANGE_HZ),
    )
    for name, value, (low, high) in checks:
        if not low <= value <= high:
            violations.append(ParamViolation(name, value, low, high))
    return violations


@dataclass(frozen=True)
class PulseTrain:
    """Sampled stimulation waveform.

    Each pulse period holds a cathodic (negative) square phase one pulse
    width long, immediately followed by an anodic phase of equal width and
    magnitude, so every period carries zero net charge.
    """

    times_s: np.ndarray
    amplitudes_ma: np.ndarray
    rate_hz: float
    params: StimulusParams
    n_periods: int
    samples_per_phase: int

    def __len__(self) -> int:
        return len(self.times_s)

    def samples(self):
        """Iterate (t, amplitude) pairs."""
        return zip(self.times_s.tolist(), self.amplitudes_ma.tolist())

    def charge_per_period_ma_s(self) -> np.ndarray:
        """Net charge of each pulse period (mA*s); zero for balanced pulses."""
        dt = 1.0 / self.rate_hz
        out = np.empty(self.n_periods)
        for k in range(self.n_periods):
            i0 = int(math.floor(k * self.rate_hz / self.params.frequency_hz))
            i1 = int(math.floor((k + 1) * self.rate_hz / self.params.frequency_hz))
            out[k] = self.amplitudes_ma[i0:min(i1, len(self))].sum() * dt
        return out

    def to_csv(self, path) -> None:
        """Write ``t_s,amplitude_ma`` rows for waveform inspection."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t_s,amplitude_ma\n")
            for t, a in self.samples():
                fh.write(f"{t!r},{a!r}\n")


def synthesize(
    p: StimulusParams, duration_s: float, rate_hz: float = DEFAULT_SYNTH_RATE_HZ
) -> PulseTrain:
    """Render a stimulus setting into a sampled biphasic square-wave train.

    The train holds floor(duration * frequency) pulse periods; the remainder
    of the duration is silence. An inactive stimulus yields an empty train.
    """
    if not p.active:
        return PulseTrain(
            times_s=np.empty(0),
            amplitudes_ma=np.empty(0),
            rate_hz=rate_hz,
            params=p,
            n_periods=0,
            samples_per_phase=0,
        )
    violations = validate_params(p)
    if violations:
        raise ParameterError(violations)
    if duration_s < 0:
        raise ValueError("duration must be >= 0")

    samples_per_phase = int(round(p.pulse_width_us * 1e-6 * rate_hz))
    if samples_per_phase < 2:
        raise SynthesisError(
            f"rate {rate_hz} Hz gives {samples_per_phase} samples for a "
            f"{p.pulse_width_us} µs phase; need at least 2"
        )

    n_total = int(math.floor(duration_s * rate_hz))
    n_periods = int(math.floor(duration_s * p.frequency_hz))
    amplitudes = np.zeros(n_total)
    for k in range(n_periods):
        i0 = int(math.floor(k * rate_hz / p.frequency_hz))
        amplitudes[i0 : i0 + samples_per_phase] = -p.intensity_ma
        amplitudes[i0 + samples_per_phase : i0 + 2 * samples_per_phase] = p.intensity_ma
    times = np.arange(n_total) / rate_hz
    return PulseTrain(
        times_s=times,
        amplitudes_ma=amplitudes,
        rate_hz=rate_hz,
        params=p,
        n_periods=n_periods,
        samples_per_phase=samples_per_phase,
    )


# --- command protocol --------------------------------------------------------


@dataclass(frozen=True, slots=True)
class SetChannelMode:
    channel: ChannelConfig


@dataclass(frozen=True, slots=True)
class SetStimulus:
    params: StimulusParams


@dataclass(frozen=True, slots=True)
class Start:
    pass


@dataclass(frozen=True, slots=True)
class Stop:
    pass


Command = Union[SetChannelMode, SetStimulus, Start, Stop]


def _xor(data: bytes) -> int:
    acc = 0
    for b in data:
        acc ^= b
    return acc


def _intensity_units(intensity_ma: float) -> int:
    units = round(intensity_ma * 10.0)
    if abs(intensity_ma * 10.0 - units) > 1e-6:
        raise EncodingError(
            f"intensity {intensity_ma} mA is not on the 0.1 mA encoding grid"
        )
    if not 1 <= units <= 90:
        raise EncodingError(f"intensity {intensity_ma} mA outside encodable [0.1, 9.0]")
    return units


def _checked_int(value: float, low: int, high: int, what: str) -> int:
    out = round(value)
    if abs(value - out) > 1e-6:
        raise EncodingError(f"{what} {value} is not an integer")
    if not low <= out <= high:
        raise EncodingError(f"{what} {value} outside encodable [{low}, {high}]")
    return out


def encode_command(cmd: Command) -> bytes:
    """Encode a command into a checksummed device frame."""
    if isinstance(cmd, SetChannelMode):
        code = CMD_SET_CHANNEL_MODE
        payload = bytes([cmd.channel.channel_id, int(cmd.channel.mode)])
    elif isinstance(cmd, SetStimulus):
        p = cmd.params
        if not p.active:
            raise EncodingError("cannot encode an inactive stimulus; send Stop instead")
        units = _intensity_units(p.intensity_ma)
        pw = _checked_int(p.pulse_width_us, 30, 500, "pulse width")
        freq = _checked_int(p.frequency_hz, 1, 200, "frequency")
        code = CMD_SET_STIMULUS
        payload = bytes([units]) + pw.to_bytes(2, "big") + bytes([freq])
    elif isinstance(cmd, Start):
        code = CMD_START
        payload = b""
    elif isinstance(cmd, Stop):
        code = CMD_STOP
        payload = b""
    else:
        raise EncodingError(f"unknown command type: {type(cmd).__name__}")
    head = bytes([FRAME_MAGIC, len(payload), code]) + payload
    return head + bytes([_xor(head)])


_PAYLOAD_SIZES = {
    CMD_SET_CHANNEL_MODE: 2,
    CMD_SET_STIMULUS: 4,
    CMD_START: 0,
    CMD_STOP: 0,
}


def decode_command(frame: bytes) -> Command:
    """Decode one full frame; raises FrameError naming the rejection reason."""
    if len(frame) < 4:
        raise FrameError("length", f"frame too short ({len(frame)} bytes)")
    if frame[0] != FRAME_MAGIC:
        raise FrameError("magic", f"expected {FRAME_MAGIC:#04x}, got {frame[0]:#04x}")
    if len(frame) != 4 + frame[1]:
        raise FrameError("length", f"declared payload {frame[1]}, frame {len(frame)} bytes")
    if _xor(frame[:-1]) != frame[-1]:
        raise FrameError("checksum", f"expected {_xor(frame[:-1]):#04x}, got {frame[-1]:#04x}")
    code = frame[2]
    if code not in _PAYLOAD_SIZES:
        raise FrameError("command", f"unknown command byte {code:#04x}")
    payload = frame[3:-1]
    if len(payload) != _PAYLOAD_SIZES[code]:
        raise FrameError(
            "length", f"command {code:#04x} expects {_PAYLOAD_SIZES[code]}-byte payload"
        )
    if code == CMD_SET_CHANNEL_MODE:
        channel, mode = payload
        if channel >= N_CHANNELS:
            raise FrameError("field", f"channel {channel} outside 0..{N_CHANNELS - 1}")
        if mode > 2:
            raise FrameError("field", f"mode byte {mode} outside 0..2")
        return SetChannelMode(ChannelConfig(channel, ChannelMode(mode)))
    if code == CMD_SET_STIMULUS:
        units = payload[0]
        pw = int.from_bytes(payload[1:3], "big")
        freq = payload[3]
        if not 1 <= units <= 90:
            raise FrameError("field", f"intensity units {units} outside 1..90")
        if not 30 <= pw <= 500:
            raise FrameError("field", f"pulse width {pw} outside 30..500")
        if not 1 <= freq <= 200:
            raise FrameError("field", f"frequency {freq} outside 1..200")
        return SetStimulus(
            StimulusParams(
                intensity_ma=units / 10.0,
                pulse_width_us=float(pw),
                frequency_hz=float(freq),
                active=True,
            )
        )
    return Start() if code == CMD_START else Stop()


# --- device simulation -------------------------------------------------------


@dataclass
class DeviceState:
    channels: list[ChannelMode] = field(
        default_factory=lambda: [ChannelMode.DISABLED] * N_CHANNELS
    )
    current_params: StimulusParams = STIMULUS_OFF
    running: bool = False


class StimulatorSim:
    """In-memory stand-in for the stimulator hardware.

    Consumes encoded frames, applies them to a device state, and keeps an
    audit log of every accepted command (raw bytes plus decoded form). The
    hex log is the ground truth tests use to prove no stimulation happened.
    ``frame_sink``, when set to a writable text stream, receives one hex dump
    line per accepted frame for live audit.
    """

    def __init__(self, frame_sink=None):
        self.state = DeviceState()
        self.command_log: list[tuple[bytes, Command]] = []
        self.frame_sink = frame_sink

    def submit(self, frame: bytes) -> Command:
        cmd = decode_command(frame)
        self._apply(cmd)
        self.command_log.append((bytes(frame), cmd))
        if self.frame_sink is not None:
            self.frame_sink.write(frame.hex(" ") + "\n")
            self.frame_sink.flush()
        return cmd

    def send(self, cmd: Command) -> bytes:
        """Encode and submit in one step; returns the frame that was sent."""
        frame = encode_command(cmd)
        self.submit(frame)
        return frame

    def _apply(self, cmd: Command) -> None:
        if isinstance(cmd, SetChannelMode):
            self.state.channels[cmd.channel.channel_id] = cmd.channel.mode
        elif isinstance(cmd, SetStimulus):
            self.state.current_params = cmd.params
        elif isinstance(cmd, Start):
            self.state.running = True
        else:
            self.state.running = False

    def apply_layout(self, layout: ElectrodeLayout) -> None:
        for channel in layout.channel_configs():
            self.send(SetChannelMode(channel))

    def hex_log(self) -> list[str]:
        return [frame.hex(" ") for frame, _ in self.command_log]

    def stimulus_commands(self) -> list[StimulusParams]:
        return [cmd.params for _, cmd in self.command_log if isinstance(cmd, SetStimulus)]

    def stimulation_commanded(self) -> bool:
        """True if any stimulus setting or start was ever issued."""
        return any(isinstance(cmd, (SetStimulus, Start)) for _, cmd in self.command_log)


def quantize_params(p: StimulusParams) -> StimulusParams:
    """Snap a stimulus setting onto the device encoding grid.

    Intensity rounds *down* to the 0.1 mA grid so a quantized command can
    never exceed the calibrated value it came from; pulse width and frequency
    round to the nearest representable integer.
    """
    if not p.active:
        return STIMULUS_OFF
    units = max(1, int(math.floor(p.intensity_ma * 10.0 + 1e-9)))
    pw = min(max(round(p.pulse_width_us), 30), 500)
    freq = min(max(round(p.frequency_hz), 1), 200)
    return StimulusParams(
        intensity_ma=units / 10.0,
        pulse_width_us=float(pw),
        frequency_hz=float(freq),
        active=True,
    )


class StimulusDriver:
    """Change-detecting front end for a stimulator.

    Callers hand it the continuously varying stimulus each tick; it quantizes
    to device resolution and only emits SetStimulus/Start/Stop frames when the
    quantized setting actually changes, which keeps the command stream at or
    below the encoding granularity (0.1 mA, 1 µs, 1 Hz deadbands).
    """

    def __init__(self, device: StimulatorSim):
        self.device = device
        self._last: Optional[StimulusParams] = None
        self._running = False

    def update(self, p: StimulusParams) -> list[bytes]:
        frames = []
        if not p.active:
            if self._running:
                frames.append(self.device.send(Stop()))
                self._running = False
            self._last = None
            return frames
        q = quantize_params(p)
        if not self._running:
            frames.append(self.device.send(SetStimulus(q)))
            frames.append(self.device.send(Start()))
            self._running = True
            self._last = q
        elif q != self._last:
            frames.append(self.device.send(SetStimulus(q)))
            self._last = q
        return frames

    @property
    def running(self) -> bool:
        return self._running
