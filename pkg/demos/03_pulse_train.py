"""Synthesize a biphasic pulse train and inspect its shape and charge balance.

Each period starts with a cathodic (negative) square phase one pulse width
long, balanced immediately by an equal anodic phase, so the skin sees zero
net charge. The train can be exported as CSV for plotting.
"""

import sys

import numpy as np

from electrotactile import StimulusParams, synthesize

params = StimulusParams(intensity_ma=2.1, pulse_width_us=350.0, frequency_hz=120.0)
train = synthesize(params, duration_s=0.05)

print(f"stimulus: {params.intensity_ma} mA, {params.pulse_width_us} µs, {params.frequency_hz} Hz")
print(f"rate {train.rate_hz:.0f} Hz, {len(train)} samples, {train.n_periods} periods, "
      f"{train.samples_per_phase} samples per phase")

charge = train.charge_per_period_ma_s()
print(f"net charge per period: max |q| = {np.max(np.abs(charge)):.2e} mA*s")

# Sketch the first period as ASCII
period = int(train.rate_hz / params.frequency_hz)
window = train.amplitudes_ma[: period // 4]
for row in (params.intensity_ma, 0.0, -params.intensity_ma):
    line = "".join("#" if abs(a - row) < 0.01 else " " for a in window[::4])
    print(f"{row:+5.1f} mA |{line}")

if len(sys.argv) > 1:
    train.to_csv(sys.argv[1])
    print(f"waveform written to {sys.argv[1]}")
