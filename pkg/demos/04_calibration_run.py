"""Run a method-of-limits calibration against the synthetic subject.

Intensity ascends in 0.1 mA steps until first felt (detection) and then until
uncomfortable (discomfort); a descending series starts from the third
quartile of that range and runs until the stimulus disappears. The working
intensity interpolates between the combined thresholds.
"""

from electrotactile import SubjectModel, SyntheticSubject, run_calibration

subject = SyntheticSubject(
    SubjectModel(detect_threshold_ma=1.15, discomfort_threshold_ma=2.95, response_noise_sd_ma=0.02)
)
outcome = run_calibration(subject.respond)

phase = None
for rec in outcome.session.transcript:
    if rec.phase is not phase:
        phase = rec.phase
        print(f"\n--- {phase.value} ---")
    print(f"  t={rec.t:6.1f}s  {rec.intensity_ma:4.1f} mA -> {rec.response.value}")

r = outcome.result
print(f"\n{outcome.n_probes} probes, {outcome.exposure_s:.0f} s of stimulation")
print(f"detection threshold : {r.detection_threshold_ma:.2f} mA")
print(f"discomfort threshold: {r.discomfort_threshold_ma:.2f} mA")
print(f"working intensity   : {r.working_intensity_ma:.2f} mA")
