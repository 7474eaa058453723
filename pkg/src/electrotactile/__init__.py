"""Electrotactile interpenetration feedback, simulated end to end at desk scale.

The package covers the full loop: god-object contact resolution for a tracked
fingertip, depth-to-stimulus and depth-to-outline modulation, a simulated
32-channel stimulator with its wire protocol, method-of-limits intensity
calibration, a synthetic participant, the 96-trial experimental protocol, and
a live session service for driving everything from an operator console.
"""

from .calibration import (
    CalibrationConfig,
    CalibrationOutcome,
    CalibrationResult,
    MethodOfLimits,
    SubjectResponse,
    run_calibration,
)
from .contact import (
    D_MAX,
    AxisAlignedBox,
    FingertipState,
    HalfSpace,
    InterpenetrationSample,
    SceneObject,
    Vec3,
    interpenetration,
    load_scene,
    resolve_proxy,
    save_scene,
)
from .harness import (
    HarnessConfig,
    SceneSpec,
    SessionConfig,
    SessionDataset,
    TrialRecord,
    run_session,
    run_trial,
)
from .modulation import (
    STIMULUS_OFF,
    ModulationConfig,
    OutlineParams,
    StimulusParams,
    electro_map,
    visual_map,
)
from .schedule import Condition, Feedback, SessionPlan, Shading, build_plan
from .stimulator import (
    PulseTrain,
    StimulatorSim,
    decode_command,
    encode_command,
    synthesize,
    validate_params,
)
from .subject import SubjectModel, SyntheticSubject

__version__ = "0.1.0"

__all__ = [
    "AxisAlignedBox",
    "CalibrationConfig",
    "CalibrationOutcome",
    "CalibrationResult",
    "Condition",
    "D_MAX",
    "Feedback",
    "FingertipState",
    "HalfSpace",
    "HarnessConfig",
    "InterpenetrationSample",
    "MethodOfLimits",
    "ModulationConfig",
    "OutlineParams",
    "PulseTrain",
    "SceneObject",
    "SceneSpec",
    "SessionConfig",
    "SessionDataset",
    "SessionPlan",
    "Shading",
    "STIMULUS_OFF",
    "StimulatorSim",
    "StimulusParams",
    "SubjectModel",
    "SubjectResponse",
    "SyntheticSubject",
    "TrialRecord",
    "Vec3",
    "build_plan",
    "decode_command",
    "electro_map",
    "encode_command",
    "interpenetration",
    "load_scene",
    "resolve_proxy",
    "run_calibration",
    "run_session",
    "run_trial",
    "save_scene",
    "synthesize",
    "validate_params",
    "visual_map",
]
