"""Counterbalanced session plans: 2 parts x 4 feedback blocks x 12 repetitions.

Feedback block order comes from a balanced 4x4 latin square row selected by
participant id, so over every group of four consecutive participants each
feedback type occupies each block position exactly once. Cube shading is
constant within a part and swaps between parts, alternating which shading
comes first across participants.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Feedback(str, Enum):
    NONE = "none"
    VISUAL = "visual"
    ELECTROTACTILE = "electrotactile"
    VISUO_ELECTROTACTILE = "visuo_electrotactile"

    @property
    def has_visual(self) -> bool:
        return self in (Feedback.VISUAL, Feedback.VISUO_ELECTROTACTILE)

    @property
    def has_electrotactile(self) -> bool:
        return self in (Feedback.ELECTROTACTILE, Feedback.VISUO_ELECTROTACTILE)


class Shading(str, Enum):
    OPAQUE = "opaque"
    WIREFRAME = "wireframe"


@dataclass(frozen=True, slots=True)
class Condition:
    feedback: Feedback
    shading: Shading


FEEDBACK_LEVELS = (
    Feedback.NONE,
    Feedback.VISUAL,
    Feedback.ELECTROTACTILE,
    Feedback.VISUO_ELECTROTACTILE,
)

# Williams construction: every level once per row, once per column, and each
# level preceded by every other level equally often across the four rows.
BALANCED_LATIN_4 = (
    (0, 1, 3, 2),
    (1, 2, 0, 3),
    (2, 3, 1, 0),
    (3, 0, 2, 1),
)

PARTS = 2
BLOCKS_PER_PART = 4
REPS_PER_BLOCK = 12
TRIALS_PER_PART = BLOCKS_PER_PART * REPS_PER_BLOCK
TOTAL_TRIALS = PARTS * TRIALS_PER_PART

#: Calibration happens before part 1, between parts, and after part 2.
CALIBRATION_POINTS = ("initial", "middle", "final")


@dataclass(frozen=True, slots=True)
class PlanEntry:
    part: int        # 1 or 2
    block: int       # 0..3 within the part
    repetition: int  # 0..11 within the block
    condition: Condition


@dataclass(frozen=True)
class SessionPlan:
    participant_id: int
    seed: int
    entries: tuple[PlanEntry, ...]

    def part_blocks(self, part: int) -> list[list[PlanEntry]]:
        """Entries of one part grouped by block, in execution order."""
        blocks: list[list[PlanEntry]] = [[] for _ in range(BLOCKS_PER_PART)]
        for entry in self.entries:
            if entry.part == part:
                blocks[entry.block].append(entry)
        return blocks


def feedback_order(participant_id: int) -> tuple[Feedback, ...]:
    row = BALANCED_LATIN_4[participant_id % 4]
    return tuple(FEEDBACK_LEVELS[i] for i in row)


def build_plan(participant_id: int, seed: int) -> SessionPlan:
    """Deterministic plan for one participant: 96 trials, 48 per part."""
    if participant_id < 0:
        raise ValueError("participant_id must be >= 0")
    order = feedback_order(participant_id)
    first_shading = Shading.OPAQUE if participant_id % 2 == 0 else Shading.WIREFRAME
    entries = []
    for part in (1, 2):
        if part == 1:
            shading = first_shading
        else:
            shading = Shading.WIREFRAME if first_shading is Shading.OPAQUE else Shading.OPAQUE
        for block, feedback in enumerate(order):
            condition = Condition(feedback=feedback, shading=shading)
            for rep in range(REPS_PER_BLOCK):
                entries.append(PlanEntry(part, block, rep, condition))
    return SessionPlan(participant_id=participant_id, seed=seed, entries=tuple(entries))
