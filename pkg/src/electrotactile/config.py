"""Session configuration files.

A session config is a UTF-8 JSON document whose sections mirror the
corresponding dataclass fields::

    {
      "seed": 42,
      "participants": 1,
      "scene":       { ... SceneSpec fields ... }        | "scene.json",
      "subject":     { ... SubjectModel fields ... }     | "subject.json",
      "modulation":  { ... ModulationConfig fields ... },
      "calibration": { ... CalibrationConfig fields ... },
      "harness":     { ... HarnessConfig fields ... }
    }

A section given as a string is read from that path, resolved relative to the
config file. Omitted sections use defaults; unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Optional

from .calibration import CalibrationConfig
from .harness import HarnessConfig, SceneSpec, SessionConfig
from .modulation import ModulationConfig
from .subject import SubjectModel


class ConfigError(ValueError):
    pass


_SECTIONS = {
    "scene": SceneSpec,
    "subject": SubjectModel,
    "modulation": ModulationConfig,
    "calibration": CalibrationConfig,
    "harness": HarnessConfig,
}


def _build(cls, doc: dict, section: str):
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown keys in '{section}': {sorted(unknown)}")
    try:
        return cls(**doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid '{section}' section: {exc}") from exc


def _load_section(value, cls, section: str, base: Optional[Path]):
    if isinstance(value, str):
        path = Path(value)
        if not path.is_absolute() and base is not None:
            path = base / path
        try:
            with open(path, encoding="utf-8") as fh:
                value = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read '{section}' file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"'{section}' file {path} is not valid JSON: {exc}") from exc
    if not isinstance(value, dict):
        raise ConfigError(f"'{section}' must be an object or a file path")
    return _build(cls, value, section)


def session_config_from_dict(doc: dict, base: Optional[Path] = None) -> SessionConfig:
    if not isinstance(doc, dict):
        raise ConfigError("session config must be a JSON object")
    known = {"seed", "participants"} | set(_SECTIONS)
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    kwargs = {}
    if "seed" in doc:
        kwargs["seed"] = int(doc["seed"])
    if "participants" in doc:
        n = int(doc["participants"])
        if n < 1:
            raise ConfigError("participants must be >= 1")
        kwargs["participants"] = n
    for section, cls in _SECTIONS.items():
        if section in doc:
            kwargs[section] = _load_section(doc[section], cls, section, base)
    return SessionConfig(**kwargs)


def load_session_config(path) -> SessionConfig:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return session_config_from_dict(doc, base=path.parent)


def session_config_to_dict(cfg: SessionConfig) -> dict:
    return {
        "seed": cfg.seed,
        "participants": cfg.participants,
        "scene": dataclasses.asdict(cfg.scene),
        "subject": dataclasses.asdict(cfg.subject),
        "modulation": dataclasses.asdict(cfg.modulation),
        "calibration": dataclasses.asdict(cfg.calibration),
        "harness": dataclasses.asdict(cfg.harness),
    }


def save_session_config(cfg: SessionConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(session_config_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")
