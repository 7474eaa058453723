"""Stimulator tests: ranges, waveform synthesis, and the wire protocol."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from electrotactile.modulation import STIMULUS_OFF, StimulusParams
from electrotactile.stimulator import (
    ChannelConfig,
    ChannelMode,
    ElectrodeLayout,
    EncodingError,
    FrameError,
    ParameterError,
    SetChannelMode,
    SetStimulus,
    Start,
    StimulatorSim,
    StimulusDriver,
    Stop,
    SynthesisError,
    decode_command,
    default_fingertip_layout,
    encode_command,
    quantize_params,
    synthesize,
    validate_params,
)


def params(i=2.0, pw=350.0, f=120.0):
    return StimulusParams(intensity_ma=i, pulse_width_us=pw, frequency_hz=f)


# --- range validation ---------------------------------------------------------


def test_interior_point_is_valid():
    assert validate_params(params(2.0, 350.0, 120.0)) == []


def test_intensity_violation():
    violations = validate_params(params(9.5, 350.0, 120.0))
    assert [v.name for v in violations] == ["intensity_ma"]


def test_multiple_violations():
    violations = validate_params(params(2.0, 20.0, 250.0))
    assert {v.name for v in violations} == {"pulse_width_us", "frequency_hz"}


@pytest.mark.parametrize(
    "field,low,high",
    [("intensity_ma", 0.1, 9.0), ("pulse_width_us", 30.0, 500.0), ("frequency_hz", 1.0, 200.0)],
)
def test_boundaries_inclusive(field, low, high):
    base = {"intensity_ma": 2.0, "pulse_width_us": 350.0, "frequency_hz": 120.0}
    for bound, outside in ((low, low - 1e-6), (high, high + 1e-6)):
        ok = dict(base, **{field: bound})
        assert validate_params(StimulusParams(**ok)) == []
        bad = dict(base, **{field: outside})
        assert [v.name for v in validate_params(StimulusParams(**bad))] == [field]


# --- synthesis ------------------------------------------------------------------


def test_synthesize_reference_train():
    # 1.0 mA, 500 µs, 200 Hz for 10 ms at 100 kHz:
    # 2 periods of 5 ms = 500 samples; each phase is 50 samples.
    train = synthesize(params(1.0, 500.0, 200.0), duration_s=0.01, rate_hz=100_000.0)
    assert train.n_periods == 2
    assert train.samples_per_phase == 50
    assert len(train) == 1000
    amp = train.amplitudes_ma
    assert np.all(amp[0:50] == -1.0)
    assert np.all(amp[50:100] == 1.0)
    assert np.all(amp[100:500] == 0.0)
    assert np.all(amp[500:550] == -1.0)
    assert np.all(amp[550:600] == 1.0)
    assert np.all(amp[600:] == 0.0)


def test_inactive_train_is_empty():
    train = synthesize(STIMULUS_OFF, duration_s=1.0)
    assert len(train) == 0
    assert train.n_periods == 0


def test_charge_balance_reference():
    train = synthesize(params(3.3, 410.0, 57.0), duration_s=0.1)
    per_period = train.charge_per_period_ma_s()
    assert np.max(np.abs(per_period)) <= 1e-9
    dt = 1.0 / train.rate_hz
    assert abs(train.amplitudes_ma.sum() * dt) <= 1e-9


def test_pulse_count_random_params():
    rng = np.random.default_rng(42)
    for _ in range(100):
        p = params(
            i=round(rng.uniform(0.1, 9.0), 1),
            pw=float(rng.integers(30, 501)),
            f=float(rng.integers(1, 201)),
        )
        duration = float(rng.uniform(0.005, 0.08))
        train = synthesize(p, duration_s=duration)
        assert train.n_periods == math.floor(duration * p.frequency_hz)
        cathodic_onsets = np.sum((train.amplitudes_ma[1:] < 0) & (train.amplitudes_ma[:-1] >= 0))
        if train.amplitudes_ma.size and train.amplitudes_ma[0] < 0:
            cathodic_onsets += 1
        assert cathodic_onsets == train.n_periods
        assert np.max(np.abs(train.charge_per_period_ma_s())) <= 1e-9 if train.n_periods else True


def test_invalid_params_rejected():
    with pytest.raises(ParameterError):
        synthesize(params(12.0, 350.0, 120.0), duration_s=0.01)


def test_rate_too_low_for_pulse_width():
    with pytest.raises(SynthesisError):
        synthesize(params(1.0, 30.0, 100.0), duration_s=0.01, rate_hz=33_000.0)


def test_train_csv_export(tmp_path):
    train = synthesize(params(1.0, 500.0, 200.0), duration_s=0.01)
    path = tmp_path / "train.csv"
    train.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t_s,amplitude_ma"
    assert len(lines) == 1 + len(train)
    t, a = lines[1].split(",")
    assert float(t) == 0.0 and float(a) == -1.0


# --- wire protocol --------------------------------------------------------------


def xor_reference(frame_body: bytes) -> int:
    """Independent checksum: fold with functools instead of a loop."""
    from functools import reduce

    return reduce(lambda a, b: a ^ b, frame_body, 0)


def test_stop_frame_reference_bytes():
    frame = encode_command(Stop())
    assert frame == bytes([0xA5, 0x00, 0x04, 0xA1])
    assert frame[-1] == xor_reference(frame[:-1])


def test_set_stimulus_reference_bytes():
    frame = encode_command(SetStimulus(params(2.0, 350.0, 120.0)))
    # 2.0 mA -> 0x14 units; 350 µs -> 0x015E big-endian; 120 Hz -> 0x78
    assert frame[:-1] == bytes([0xA5, 0x04, 0x02, 0x14, 0x01, 0x5E, 0x78])
    assert frame[-1] == xor_reference(frame[:-1])
    assert frame[-1] == 0x90


def test_set_channel_mode_round_trip():
    cmd = SetChannelMode(ChannelConfig(13, ChannelMode.ANODE))
    assert decode_command(encode_command(cmd)) == cmd


valid_commands = st.one_of(
    st.just(Start()),
    st.just(Stop()),
    st.builds(
        SetChannelMode,
        st.builds(
            ChannelConfig,
            st.integers(min_value=0, max_value=31),
            st.sampled_from(list(ChannelMode)),
        ),
    ),
    st.builds(
        lambda units, pw, f: SetStimulus(
            StimulusParams(units / 10.0, float(pw), float(f), active=True)
        ),
        st.integers(min_value=1, max_value=90),
        st.integers(min_value=30, max_value=500),
        st.integers(min_value=1, max_value=200),
    ),
)


@settings(max_examples=300)
@given(valid_commands)
def test_round_trip_identity(cmd):
    assert decode_command(encode_command(cmd)) == cmd


def test_single_byte_corruptions_rejected():
    frames = [
        encode_command(Stop()),
        encode_command(Start()),
        encode_command(SetChannelMode(ChannelConfig(31, ChannelMode.CATHODE))),
        encode_command(SetStimulus(params(2.0, 350.0, 120.0))),
        encode_command(SetStimulus(params(0.1, 30.0, 1.0))),
        encode_command(SetStimulus(params(9.0, 500.0, 200.0))),
    ]
    for frame in frames:
        for pos in range(len(frame)):
            for value in range(256):
                if value == frame[pos]:
                    continue
                corrupt = bytearray(frame)
                corrupt[pos] = value
                with pytest.raises(FrameError):
                    decode_command(bytes(corrupt))


def test_frame_error_reasons_distinguished():
    frame = encode_command(SetStimulus(params(2.0, 350.0, 120.0)))
    with pytest.raises(FrameError) as err:
        decode_command(frame[:-2])
    assert err.value.reason == "length"
    bad_magic = bytearray(frame)
    bad_magic[0] = 0x5A
    with pytest.raises(FrameError) as err:
        decode_command(bytes(bad_magic))
    assert err.value.reason == "magic"
    bad_sum = bytearray(frame)
    bad_sum[-1] ^= 0xFF
    with pytest.raises(FrameError) as err:
        decode_command(bytes(bad_sum))
    assert err.value.reason == "checksum"
    # unknown command byte with a recomputed valid checksum
    body = bytearray([0xA5, 0x00, 0x7F])
    body.append(xor_reference(bytes(body)))
    with pytest.raises(FrameError) as err:
        decode_command(bytes(body))
    assert err.value.reason == "command"
    # out-of-range field with a valid checksum (frequency byte 0)
    body = bytearray([0xA5, 0x04, 0x02, 0x14, 0x01, 0x5E, 0x00])
    body.append(xor_reference(bytes(body)))
    with pytest.raises(FrameError) as err:
        decode_command(bytes(body))
    assert err.value.reason == "field"


def test_encoding_errors():
    with pytest.raises(EncodingError):
        encode_command(SetStimulus(params(2.05, 350.0, 120.0)))  # off the 0.1 mA grid
    with pytest.raises(EncodingError):
        encode_command(SetStimulus(params(2.0, 350.5, 120.0)))  # fractional µs
    with pytest.raises(EncodingError):
        encode_command(SetStimulus(params(2.0, 350.0, 0.0)))
    with pytest.raises(EncodingError):
        encode_command(SetStimulus(STIMULUS_OFF))
    with pytest.raises(ValueError):
        ChannelConfig(32, ChannelMode.CATHODE)


# --- electrode layout and device simulation --------------------------------------


def test_default_layout_shape():
    layout = default_fingertip_layout()
    assert len(layout.cathodes) == 6
    assert len(layout.anodes) == 2
    modes = {c.channel_id: c.mode for c in layout.channel_configs()}
    assert sum(1 for m in modes.values() if m == ChannelMode.CATHODE) == 6


@pytest.mark.parametrize(
    "kwargs",
    [
        {"cathodes": (0, 1, 2, 3, 4), "anodes": (6,)},
        {"cathodes": (0, 1, 2, 3, 4, 5), "anodes": ()},
        {"cathodes": (0, 1, 2, 3, 4, 4), "anodes": (6,)},
        {"cathodes": (0, 1, 2, 3, 4, 5), "anodes": (5,)},
        {"cathodes": (0, 1, 2, 3, 4, 40), "anodes": (6,)},
    ],
)
def test_layout_validation(kwargs):
    with pytest.raises(ValueError):
        ElectrodeLayout(**kwargs)


def test_device_applies_commands_and_logs_hex():
    device = StimulatorSim()
    device.apply_layout(default_fingertip_layout())
    assert device.state.channels[0] == ChannelMode.CATHODE
    assert device.state.channels[6] == ChannelMode.ANODE
    device.send(SetStimulus(params(2.0, 350.0, 120.0)))
    device.send(Start())
    assert device.state.running
    assert device.state.current_params.intensity_ma == 2.0
    device.send(Stop())
    assert not device.state.running
    log = device.hex_log()
    assert len(log) == 8 + 3
    assert log[-1] == "a5 00 04 a1"


def test_device_rejects_corrupt_frame():
    device = StimulatorSim()
    with pytest.raises(FrameError):
        device.submit(b"\xa5\x00\x04\xa0")
    assert device.command_log == []


def test_device_streams_hex_audit_log():
    import io

    sink = io.StringIO()
    device = StimulatorSim(frame_sink=sink)
    device.send(Stop())
    device.send(SetStimulus(params(2.0, 350.0, 120.0)))
    lines = sink.getvalue().splitlines()
    assert lines[0] == "a5 00 04 a1"
    assert lines[1].startswith("a5 04 02 14 01 5e 78")


# --- quantization and the change-detecting driver --------------------------------


def test_quantize_rounds_intensity_down():
    q = quantize_params(params(2.15, 350.4, 120.6))
    assert q.intensity_ma == pytest.approx(2.1)
    assert q.pulse_width_us == 350.0
    assert q.frequency_hz == 121.0
    assert quantize_params(params(2.1, 350.0, 120.0)).intensity_ma == pytest.approx(2.1)


def test_driver_emits_start_and_stop_transitions():
    device = StimulatorSim()
    driver = StimulusDriver(device)
    frames = driver.update(params(2.0, 500.0, 200.0))
    assert len(frames) == 2  # SetStimulus then Start
    cmds = [cmd for _, cmd in device.command_log]
    assert isinstance(cmds[0], SetStimulus) and isinstance(cmds[1], Start)
    assert driver.running
    frames = driver.update(STIMULUS_OFF)
    assert len(frames) == 1
    assert isinstance(device.command_log[-1][1], Stop)
    assert not driver.running


def test_driver_deadband_suppresses_repeats():
    device = StimulatorSim()
    driver = StimulusDriver(device)
    driver.update(params(2.0, 350.0, 120.0))
    before = len(device.command_log)
    for _ in range(50):
        # sub-resolution wiggle: stays on the same quantized setting
        assert driver.update(params(2.0, 350.2, 120.3)) == []
    assert len(device.command_log) == before
    driver.update(params(2.0, 360.0, 120.0))
    assert len(device.command_log) == before + 1
