"""Dataset persistence: raw JSON, per-trial CSV, and per-tick JSONL traces.

Everything written here is deterministic for a fixed seed: floats are
rendered with Python's shortest round-trip representation (locale
independent), rows follow plan order, and no wall-clock values appear in any
file. ``std_d`` columns hold the *population* standard deviation.

Files in a dataset directory:
    dataset.json      full-fidelity record (re-exportable)
    trials.csv        one row per trial attempt, metrics in centimeters
    calibrations.csv  thresholds and working intensity per calibration, in mA
    samples.jsonl     optional per-tick traces (one JSON object per sample)
    meta.json         format version and column documentation
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .calibration import (
    CalibrationConfig,
    CalibrationOutcome,
    CalibrationResult,
    MethodOfLimits,
    Phase,
    ProbeRecord,
    SubjectResponse,
)
from .contact import InterpenetrationSample
from .harness import SessionDataset, TrialRecord
from .schedule import Condition, Feedback, PlanEntry, SessionPlan, Shading

DATASET_FORMAT_VERSION = 1

TRIAL_COLUMNS = (
    "participant_id",
    "part",
    "block",
    "repetition",
    "attempt",
    "feedback",
    "shading",
    "valid",
    "avg_d_cm",
    "std_d_cm",
    "max_d_cm",
    "n_samples",
    "invalid_reason",
)

CALIBRATION_COLUMNS = (
    "participant_id",
    "calibration",
    "detection_threshold_ma",
    "discomfort_threshold_ma",
    "working_intensity_ma",
    "n_probes",
)


def _fmt(value: float) -> str:
    # repr() of a float is its shortest exact round-trip form.
    return repr(float(value))


def _metric_cm(value: float, n_samples: int) -> str:
    return _fmt(value * 100.0) if n_samples else ""


def trial_rows(datasets: Iterable[SessionDataset]) -> list[list[str]]:
    rows = []
    for ds in datasets:
        for tr in ds.trials:
            rows.append(
                [
                    str(tr.participant_id),
                    str(tr.part),
                    str(tr.block),
                    str(tr.repetition),
                    str(tr.attempt),
                    tr.condition.feedback.value,
                    tr.condition.shading.value,
                    "1" if tr.valid else "0",
                    _metric_cm(tr.avg_d, tr.n_samples),
                    _metric_cm(tr.std_d, tr.n_samples),
                    _metric_cm(tr.max_d, tr.n_samples),
                    str(tr.n_samples),
                    tr.invalid_reason or "",
                ]
            )
    return rows


def calibration_rows(datasets: Iterable[SessionDataset]) -> list[list[str]]:
    rows = []
    for ds in datasets:
        for label in ("initial", "middle", "final"):
            outcome = ds.calibrations.get(label)
            if outcome is None:
                continue
            r = outcome.result
            rows.append(
                [
                    str(ds.participant_id),
                    label,
                    _fmt(r.detection_threshold_ma),
                    _fmt(r.discomfort_threshold_ma),
                    _fmt(r.working_intensity_ma),
                    str(outcome.n_probes),
                ]
            )
    return rows


def _write_csv(path: Path, header: tuple[str, ...], rows: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _sample_to_dict(s: InterpenetrationSample) -> dict:
    return {"t": s.t, "d": s.d, "d_hat": s.d_hat}


def _trial_to_dict(tr: TrialRecord, include_samples: bool) -> dict:
    doc = {
        "participant_id": tr.participant_id,
        "part": tr.part,
        "block": tr.block,
        "repetition": tr.repetition,
        "attempt": tr.attempt,
        "feedback": tr.condition.feedback.value,
        "shading": tr.condition.shading.value,
        "valid": tr.valid,
        "avg_d": tr.avg_d if tr.n_samples else None,
        "std_d": tr.std_d if tr.n_samples else None,
        "max_d": tr.max_d if tr.n_samples else None,
        "n_samples": tr.n_samples,
        "t_start_beep": tr.t_start_beep,
        "t_contact_start": tr.t_contact_start,
        "t_end_beep": tr.t_end_beep,
        "stim_exposure_s": tr.stim_exposure_s,
        "invalid_reason": tr.invalid_reason,
    }
    if include_samples:
        doc["samples"] = [_sample_to_dict(s) for s in tr.samples]
    return doc


def _trial_from_dict(doc: dict) -> TrialRecord:
    n = doc["n_samples"]
    return TrialRecord(
        participant_id=doc["participant_id"],
        part=doc["part"],
        block=doc["block"],
        repetition=doc["repetition"],
        attempt=doc["attempt"],
        condition=Condition(Feedback(doc["feedback"]), Shading(doc["shading"])),
        valid=doc["valid"],
        avg_d=doc["avg_d"] if n else float("nan"),
        std_d=doc["std_d"] if n else float("nan"),
        max_d=doc["max_d"] if n else float("nan"),
        n_samples=n,
        t_start_beep=doc["t_start_beep"],
        t_contact_start=doc["t_contact_start"],
        t_end_beep=doc["t_end_beep"],
        stim_exposure_s=doc["stim_exposure_s"],
        invalid_reason=doc["invalid_reason"],
        samples=[
            InterpenetrationSample(s["t"], s["d"], s["d_hat"])
            for s in doc.get("samples", [])
        ],
    )


def _calibration_to_dict(outcome: CalibrationOutcome) -> dict:
    return {
        "result": outcome.result.as_dict(),
        "n_probes": outcome.n_probes,
        "exposure_s": outcome.exposure_s,
        "duration_s": outcome.duration_s,
        "anomalies": list(outcome.session.anomalies),
        "transcript": [
            {
                "phase": rec.phase.value,
                "intensity_ma": rec.intensity_ma,
                "response": rec.response.value,
                "t": rec.t,
            }
            for rec in outcome.session.transcript
        ],
    }


def _calibration_from_dict(doc: dict) -> CalibrationOutcome:
    session = MethodOfLimits(config=CalibrationConfig())
    session.phase = Phase.DONE
    session.anomalies = list(doc.get("anomalies", []))
    session.transcript = [
        ProbeRecord(
            Phase(rec["phase"]),
            rec["intensity_ma"],
            SubjectResponse(rec["response"]),
            rec["t"],
        )
        for rec in doc.get("transcript", [])
    ]
    result = CalibrationResult(**doc["result"])
    session.result = result
    return CalibrationOutcome(
        result=result,
        session=session,
        n_probes=doc["n_probes"],
        exposure_s=doc["exposure_s"],
        duration_s=doc["duration_s"],
    )


def dataset_to_dict(datasets: Iterable[SessionDataset], include_samples: bool) -> dict:
    return {
        "format_version": DATASET_FORMAT_VERSION,
        "sessions": [
            {
                "participant_id": ds.participant_id,
                "seed": ds.seed,
                "status": ds.status,
                "trials": [_trial_to_dict(tr, include_samples) for tr in ds.trials],
                "calibrations": {
                    label: _calibration_to_dict(outcome)
                    for label, outcome in ds.calibrations.items()
                },
            }
            for ds in datasets
        ],
    }


def dataset_from_dict(doc: dict) -> list[SessionDataset]:
    if doc.get("format_version") != DATASET_FORMAT_VERSION:
        raise ValueError(f"unsupported dataset format version {doc.get('format_version')!r}")
    out = []
    for session in doc["sessions"]:
        trials = [_trial_from_dict(t) for t in session["trials"]]
        plan = _rebuild_plan(session["participant_id"], session["seed"], trials)
        out.append(
            SessionDataset(
                participant_id=session["participant_id"],
                seed=session["seed"],
                status=session["status"],
                plan=plan,
                trials=trials,
                calibrations={
                    label: _calibration_from_dict(c)
                    for label, c in session["calibrations"].items()
                },
            )
        )
    return out


def _rebuild_plan(participant_id: int, seed: int, trials: list[TrialRecord]) -> SessionPlan:
    entries = tuple(
        PlanEntry(tr.part, tr.block, tr.repetition, tr.condition)
        for tr in trials
        if tr.attempt == 0
    )
    return SessionPlan(participant_id=participant_id, seed=seed, entries=entries)


def write_dataset(
    datasets: list[SessionDataset],
    out_dir,
    include_samples: bool = False,
) -> list[Path]:
    """Write the full dataset directory; returns the files created."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    raw = dataset_to_dict(datasets, include_samples=True)
    path = out / "dataset.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(raw, fh, indent=1, sort_keys=True)
        fh.write("\n")
    written.append(path)

    written += export_tables(datasets, out, fmt="csv")

    if include_samples:
        written.append(write_samples_jsonl(datasets, out / "samples.jsonl"))

    meta = {
        "format_version": DATASET_FORMAT_VERSION,
        "trials_columns": list(TRIAL_COLUMNS),
        "calibrations_columns": list(CALIBRATION_COLUMNS),
        "units": {"avg_d_cm/std_d_cm/max_d_cm": "centimeters", "*_ma": "milliamps"},
        "notes": [
            "std_d is the population (not sample) standard deviation",
            "metrics cover only in-contact samples inside the 3 s hold window",
            "floats use shortest round-trip decimal form",
        ],
    }
    path = out / "meta.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(path)
    return written


def export_tables(datasets: list[SessionDataset], out_dir, fmt: str = "csv") -> list[Path]:
    """Write trial and calibration tables as csv or jsonl."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "csv":
        path = out / "trials.csv"
        _write_csv(path, TRIAL_COLUMNS, trial_rows(datasets))
        written.append(path)
        path = out / "calibrations.csv"
        _write_csv(path, CALIBRATION_COLUMNS, calibration_rows(datasets))
        written.append(path)
    elif fmt == "jsonl":
        path = out / "trials.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            for ds in datasets:
                for tr in ds.trials:
                    fh.write(json.dumps(_trial_to_dict(tr, False), sort_keys=True) + "\n")
        written.append(path)
        path = out / "calibrations.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            for ds in datasets:
                for label in ("initial", "middle", "final"):
                    if label in ds.calibrations:
                        doc = {"participant_id": ds.participant_id, "calibration": label}
                        doc.update(ds.calibrations[label].result.as_dict())
                        doc["n_probes"] = ds.calibrations[label].n_probes
                        fh.write(json.dumps(doc, sort_keys=True) + "\n")
        written.append(path)
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    return written


def write_samples_jsonl(datasets: list[SessionDataset], path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for ds in datasets:
            for tr in ds.trials:
                base = {
                    "participant_id": tr.participant_id,
                    "part": tr.part,
                    "block": tr.block,
                    "repetition": tr.repetition,
                    "attempt": tr.attempt,
                }
                for s in tr.samples:
                    doc = dict(base)
                    doc.update(_sample_to_dict(s))
                    fh.write(json.dumps(doc, sort_keys=True) + "\n")
    return path


def load_dataset(directory) -> list[SessionDataset]:
    path = Path(directory) / "dataset.json"
    with open(path, encoding="utf-8") as fh:
        return dataset_from_dict(json.load(fh))


def read_trials_csv(path) -> list[dict]:
    """Parse trials.csv back into dicts with floats for the metric columns."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        values = line.split(",")
        row: dict = dict(zip(header, values))
        for key in ("avg_d_cm", "std_d_cm", "max_d_cm"):
            row[key] = float(row[key]) if row[key] else None
        for key in ("participant_id", "part", "block", "repetition", "attempt", "n_samples"):
            row[key] = int(row[key])
        row["valid"] = row["valid"] == "1"
        rows.append(row)
    return rows
