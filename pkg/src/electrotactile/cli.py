"""Command-line entry points.

    electrotactile calibrate    --subject subject.json | --interactive
    electrotactile run-session  --config session.json --out dir [--participants N]
    electrotactile simulate-trial --condition electrotactile --depth 0.02
    electrotactile export       --dataset dir --format csv|jsonl [--out dir]
    electrotactile serve        --port 7340 [--http-port 7341] [--mode free]

Exit codes: 0 success, 1 runtime failure, 2 bad flags or config. Failures
print a single JSON object on stderr.
"""

from __future__ import annotations

import argparse
import asyncio
import dataclasses
import json
import sys
from pathlib import Path

from .calibration import (
    CalibrationError,
    MethodOfLimits,
    SubjectResponse,
    run_calibration,
)
from .config import ConfigError, load_session_config, session_config_to_dict
from .export import export_tables, load_dataset, write_dataset
from .harness import SessionConfig, make_subject, run_session, run_trial
from .schedule import Condition, Feedback, PlanEntry, Shading
from .service import MODES, SessionEngine, run_service
from .subject import SubjectModel, SyntheticSubject

USAGE_EXIT = 2
FAILURE_EXIT = 1


def _fail(code: int, error: str, **detail) -> int:
    sys.stderr.write(json.dumps({"error": error, **detail}) + "\n")
    return code


def _load_config(path: str | None) -> SessionConfig:
    if path is None:
        return SessionConfig()
    return load_session_config(path)


def cmd_calibrate(args) -> int:
    cfg = _load_config(args.config)
    if args.interactive:
        result = _interactive_calibration(cfg)
    else:
        model = SubjectModel.from_json(args.subject) if args.subject else cfg.subject
        subject = SyntheticSubject(model)
        outcome = run_calibration(subject.respond, cfg.calibration)
        result = outcome.result
        if args.transcript:
            Path(args.transcript).write_text(outcome.session.transcript_jsonl())
    print(json.dumps(result.as_dict(), sort_keys=True))
    return 0


def _interactive_calibration(cfg: SessionConfig):
    """Terminal-driven method of limits: the operator answers each probe."""
    session = MethodOfLimits(config=cfg.calibration)
    answers = {"n": SubjectResponse.NOT_FELT, "f": SubjectResponse.FELT, "d": SubjectResponse.DISCOMFORT}
    print("answer each probe: [n]ot felt, [f]elt, [d]iscomfort", file=sys.stderr)
    while not session.done:
        probe = session.next_probe()
        prompt = f"probe {probe.intensity_ma:.1f} mA ({session.phase.value}) > "
        while True:
            sys.stderr.write(prompt)
            sys.stderr.flush()
            line = sys.stdin.readline()
            if not line:
                raise CalibrationError("input closed before calibration finished")
            key = line.strip().lower()[:1]
            if key in answers:
                session.record_response(answers[key])
                break
    assert session.result is not None
    return session.result


def cmd_run_session(args) -> int:
    cfg = _load_config(args.config)
    if args.participants is not None:
        cfg = dataclasses.replace(cfg, participants=args.participants)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    datasets = [run_session(pid, cfg) for pid in range(cfg.participants)]
    files = write_dataset(datasets, args.out, include_samples=args.samples)
    summary = {
        "participants": len(datasets),
        "trials": sum(len(d.trials) for d in datasets),
        "invalid_trials": sum(1 for d in datasets for t in d.trials if not t.valid),
        "statuses": sorted({d.status for d in datasets}),
        "files": [str(f) for f in files],
    }
    print(json.dumps(summary, sort_keys=True))
    return 0 if all(d.complete for d in datasets) else FAILURE_EXIT


def cmd_simulate_trial(args) -> int:
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    cfg = dataclasses.replace(
        cfg, harness=dataclasses.replace(cfg.harness, nominal_depth_m=args.depth)
    )
    subject = make_subject(cfg, 0)
    feedback = Feedback(args.condition)
    modulation = cfg.modulation
    if feedback.has_electrotactile:
        outcome = run_calibration(subject.respond, cfg.calibration)
        modulation = dataclasses.replace(
            modulation, intensity_ma=outcome.result.working_intensity_ma
        )
    entry = PlanEntry(1, 0, 0, Condition(feedback, Shading.OPAQUE))
    record = run_trial(entry, cfg.scene, subject, modulation, cfg.harness)
    print(
        json.dumps(
            {
                "condition": feedback.value,
                "valid": record.valid,
                "invalid_reason": record.invalid_reason,
                "avg_d_m": record.avg_d if record.n_samples else None,
                "std_d_m": record.std_d if record.n_samples else None,
                "max_d_m": record.max_d if record.n_samples else None,
                "n_samples": record.n_samples,
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_export(args) -> int:
    datasets = load_dataset(args.dataset)
    out = args.out or args.dataset
    files = export_tables(datasets, out, fmt=args.format)
    print(json.dumps({"files": [str(f) for f in files]}, sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    cfg = _load_config(args.config)
    subject = None if args.human else make_subject(cfg, args.participant)
    engine = SessionEngine(
        cfg,
        mode=args.mode,
        subject=subject,
        participant_id=args.participant,
        max_trials=args.max_trials,
    )
    if args.device_log:
        engine.device.frame_sink = open(args.device_log, "w", encoding="utf-8")
    static_dir = Path(args.static) if args.static else None
    try:
        asyncio.run(
            run_service(
                engine,
                host=args.host,
                port=args.port,
                http_port=args.http_port,
                static_dir=static_dir,
                realtime=not args.turbo,
            )
        )
    except KeyboardInterrupt:
        pass
    return 0


def cmd_print_config(args) -> int:
    cfg = _load_config(args.config)
    print(json.dumps(session_config_to_dict(cfg), indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="electrotactile",
        description="Simulated electrotactile interpenetration feedback toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="run a method-of-limits calibration")
    p.add_argument("--subject", help="subject parameter JSON file")
    p.add_argument("--interactive", action="store_true", help="answer probes on the terminal")
    p.add_argument("--config", help="session config JSON")
    p.add_argument("--transcript", help="write per-probe transcript JSONL here")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("run-session", help="run full sessions and write a dataset")
    p.add_argument("--config", help="session config JSON")
    p.add_argument("--participants", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="dataset output directory")
    p.add_argument("--samples", action="store_true", help="also write per-tick samples.jsonl")
    p.set_defaults(func=cmd_run_session)

    p = sub.add_parser("simulate-trial", help="run one trial and print its metrics")
    p.add_argument(
        "--condition",
        required=True,
        choices=[f.value for f in Feedback],
    )
    p.add_argument("--depth", type=float, required=True, help="nominal depth in meters")
    p.add_argument("--config", help="session config JSON")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_simulate_trial)

    p = sub.add_parser("export", help="re-export a stored dataset")
    p.add_argument("--dataset", required=True, help="dataset directory (with dataset.json)")
    p.add_argument("--format", required=True, choices=["csv", "jsonl"])
    p.add_argument("--out", help="output directory (defaults to the dataset dir)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="serve a live session for the operator console")
    p.add_argument("--port", type=int, default=7340, help="TCP line-protocol port")
    p.add_argument("--http-port", type=int, help="HTTP/WebSocket bridge port")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--config", help="session config JSON")
    p.add_argument("--mode", choices=list(MODES), default="session")
    p.add_argument("--human", action="store_true", help="operator answers probes and steers")
    p.add_argument("--participant", type=int, default=0)
    p.add_argument("--max-trials", type=int, help="stop after this many trials")
    p.add_argument("--static", help="operator console asset directory")
    p.add_argument(
        "--device-log",
        help="write a hex dump of every device command frame to this file",
    )
    p.add_argument(
        "--turbo",
        action="store_true",
        help="run simulated time as fast as possible (integration tests)",
    )
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("print-config", help="print the effective configuration")
    p.add_argument("--config", help="session config JSON")
    p.set_defaults(func=cmd_print_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(USAGE_EXIT, "config", detail=str(exc))
    except FileNotFoundError as exc:
        return _fail(USAGE_EXIT, "missing_file", detail=str(exc))
    except CalibrationError as exc:
        return _fail(FAILURE_EXIT, "calibration", detail=str(exc))
    except (ValueError, OSError) as exc:
        return _fail(FAILURE_EXIT, type(exc).__name__.lower(), detail=str(exc))


if __name__ == "__main__":
    sys.exit(main())
