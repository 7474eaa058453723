"""Live session service: deterministic tick engine plus a line-protocol server.

One authoritative tick loop owns all session state. Every outbound message is
a JSON object on its own line with a monotonically increasing ``seq`` and the
session id; inbound messages are applied at the next tick. The same stream is
offered on a raw TCP socket and bridged to browsers over a WebSocket (one
message per WS text frame), with the operator console's static assets served
alongside.

Inbound message types: ``hello`` (handshake, protocol version "1"),
``finger_input`` {pos}, ``calibration_response`` {probe_id, response},
``control`` {action: start|pause|abort}. Outbound: ``hello``, ``snapshot``,
``calibration_probe``, ``event``, ``ack``, ``error``.
"""

from __future__ import annotations

import asyncio
import json
import logging
import time
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Optional

from .calibration import (
    PROBE_OFF_S,
    PROBE_ON_S,
    CalibrationError,
    CalibrationResult,
    MethodOfLimits,
    SubjectResponse,
)
from .contact import FingertipState, Vec3, interpenetration, resolve_proxy
from .harness import SessionConfig, TrialWindow, _approach_pos, minimum_jerk
from .modulation import STIMULUS_OFF, electro_map, visual_map
from .schedule import Feedback, PlanEntry, build_plan
from .stimulator import StimulatorSim, StimulusDriver
from .subject import SyntheticSubject

log = logging.getLogger(__name__)

PROTOCOL_VERSION = "1"
SNAPSHOT_RATE_HZ = 30.0
MODES = ("session", "calibration", "free")

#: Radius around the resting position that counts as "returned to rest".
REST_RADIUS_M = 0.15
RETURN_DWELL_S = 0.4


class EnginePhase(str, Enum):
    IDLE = "idle"
    CALIBRATING = "calibrating"
    TRIAL_WAIT = "trial_wait"
    TRIAL_HOLD = "trial_hold"
    TRIAL_RETURN = "trial_return"
    FREE = "free"
    DONE = "done"


@dataclass
class _TrialState:
    entry: PlanEntry
    attempt: int
    t: float = 0.0
    t_contact: Optional[float] = None
    window: Optional[TrialWindow] = None
    last_d_hat: float = 0.0
    return_t: float = 0.0
    dwell_t: float = 0.0


class SessionEngine:
    """Tick-stepped session state machine, free of any I/O.

    With a synthetic subject the engine drives itself (auto-answered probes,
    scripted finger trajectory); without one it waits on operator messages
    for calibration answers and fingertip positions.
    """

    def __init__(
        self,
        cfg: SessionConfig,
        mode: str = "session",
        subject: Optional[SyntheticSubject] = None,
        participant_id: int = 0,
        max_trials: Optional[int] = None,
        session_id: str = "session-0",
    ):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.cfg = cfg
        self.mode = mode
        self.subject = subject
        self.participant_id = participant_id
        self.max_trials = max_trials
        self.session_id = session_id

        self.scene_spec = cfg.scene
        self.scene = cfg.scene.to_scene()
        self.device = StimulatorSim()
        self.driver = StimulusDriver(self.device)
        self.plan = build_plan(participant_id, cfg.seed)
        self.modulation = cfg.modulation

        self.phase = EnginePhase.IDLE
        self.paused = False
        self.sim_t = 0.0
        self.seq = 0
        self.status = "idle"
        self.calibrations: dict[str, CalibrationResult] = {}
        self.working_intensity_ma: Optional[float] = None

        self._finger = FingertipState.free(self.scene_spec.rest_pos)
        self._pending_finger: Optional[Vec3] = None
        self._pending_responses: deque[tuple[int, SubjectResponse]] = deque()
        self._cal: Optional[MethodOfLimits] = None
        self._cal_label: Optional[str] = None
        self._probe_id = 0
        self._probe_active = False
        self._probe_t = 0.0
        self._exposure_s = 0.0
        self._trials_run = 0
        self._trial: Optional[_TrialState] = None
        self._block_queue: deque[tuple[PlanEntry, int]] = deque()
        self._part_blocks: deque[list[PlanEntry]] = deque()
        self._part = 0
        self._last_sample_d = 0.0
        self._last_sample_d_hat = 0.0

    # --- inbound ------------------------------------------------------------

    def handle_message(self, msg: dict) -> list[dict]:
        """Apply one client message; returns the immediate replies."""
        if not isinstance(msg, dict) or "type" not in msg:
            return [self._error("malformed", "message must be an object with a type")]
        kind = msg["type"]
        client_seq = msg.get("seq")
        if kind == "finger_input":
            try:
                self._pending_finger = Vec3.from_seq(msg["pos"])
            except (KeyError, TypeError, ValueError) as exc:
                return [self._error("malformed", f"bad finger_input: {exc}")]
            return [self._ack(client_seq)]
        if kind == "calibration_response":
            try:
                probe_id = int(msg["probe_id"])
                response = SubjectResponse(msg["response"])
            except (KeyError, ValueError) as exc:
                return [self._error("malformed", f"bad calibration_response: {exc}")]
            self._pending_responses.append((probe_id, response))
            return [self._ack(client_seq)]
        if kind == "control":
            action = msg.get("action")
            if action == "start":
                replies = [self._ack(client_seq)]
                replies += self._start()
                return replies
            if action == "pause":
                self.paused = not self.paused
                return [self._ack(client_seq)]
            if action == "abort":
                self.status = "aborted"
                self.phase = EnginePhase.DONE
                self.driver.update(STIMULUS_OFF)
                return [self._ack(client_seq), self._event("session_aborted")]
            return [self._error("malformed", f"unknown control action {action!r}")]
        if kind == "hello":
            # Transport performs the handshake; tolerate a repeat politely.
            return [self._ack(client_seq)]
        return [self._error("malformed", f"unknown message type {kind!r}")]

    def _start(self) -> list[dict]:
        if self.phase is not EnginePhase.IDLE:
            return [self._error("bad_state", f"cannot start from phase {self.phase.value}")]
        self.status = "running"
        if self.mode == "free":
            self.phase = EnginePhase.FREE
            return [self._event("free_mode_started")]
        if self.mode == "calibration":
            return self._begin_calibration("initial")
        msgs = self._begin_calibration("initial")
        self._part = 0
        return msgs

    # --- tick ---------------------------------------------------------------

    def tick(self, dt: float) -> list[dict]:
        """Advance the session by one fixed step; returns outbound messages."""
        msgs: list[dict] = []
        if not self.paused and self.phase not in (EnginePhase.IDLE, EnginePhase.DONE):
            self.sim_t += dt
            if self.phase is EnginePhase.CALIBRATING:
                msgs += self._tick_calibration(dt)
            elif self.phase in (
                EnginePhase.TRIAL_WAIT,
                EnginePhase.TRIAL_HOLD,
                EnginePhase.TRIAL_RETURN,
            ):
                msgs += self._tick_trial(dt)
            elif self.phase is EnginePhase.FREE:
                msgs += self._tick_free(dt)
        msgs.append(self._snapshot())
        return msgs

    # --- calibration phase ----------------------------------------------------

    def _begin_calibration(self, label: str) -> list[dict]:
        self.phase = EnginePhase.CALIBRATING
        self._cal = MethodOfLimits(config=self.cfg.calibration)
        self._cal_label = label
        self._probe_active = False
        self._probe_t = 0.0
        return [self._event("calibration_boundary", calibration=label)]

    def _tick_calibration(self, dt: float) -> list[dict]:
        msgs: list[dict] = []
        assert self._cal is not None
        self._probe_t += dt

        if self._probe_active:
            if self.subject is not None and self._probe_t >= PROBE_ON_S:
                probe = self._cal.next_probe()
                response = self.subject.respond(probe)
                msgs += self._finish_probe(response)
            elif self.subject is None and self._pending_responses:
                probe_id, response = self._pending_responses.popleft()
                if probe_id != self._probe_id:
                    msgs.append(self._error("stale_probe", f"probe {probe_id} is not current"))
                else:
                    msgs += self._finish_probe(response)
        else:
            if self._cal.done:
                msgs += self._calibration_complete()
            elif self._probe_t >= PROBE_OFF_S or self._probe_id == 0:
                msgs.append(self._issue_probe())
        return msgs

    def _issue_probe(self) -> dict:
        assert self._cal is not None
        probe = self._cal.next_probe()
        self._probe_id += 1
        self._probe_active = True
        self._probe_t = 0.0
        self.driver.update(probe)
        return self._message(
            "calibration_probe",
            probe_id=self._probe_id,
            intensity_ma=probe.intensity_ma,
            phase=self._cal.phase.value,
        )

    def _finish_probe(self, response: SubjectResponse) -> list[dict]:
        assert self._cal is not None
        msgs: list[dict] = []
        # Interactive probes stay on until answered; synthetic ones run 1 s.
        self._exposure_s += self._probe_t if self.subject is None else PROBE_ON_S
        self.driver.update(STIMULUS_OFF)
        self._probe_active = False
        self._probe_t = 0.0
        try:
            self._cal.record_response(response, t=self.sim_t)
        except CalibrationError as exc:
            self.status = f"aborted_calibration_{self._cal_label}: {exc}"
            self.phase = EnginePhase.DONE
            msgs.append(self._event("session_fault", reason=str(exc)))
            return msgs
        msgs.append(
            self._event(
                "calibration_response_recorded",
                probe_id=self._probe_id,
                response=response.value,
            )
        )
        return msgs

    def _calibration_complete(self) -> list[dict]:
        assert self._cal is not None and self._cal.result is not None
        result = self._cal.result
        label = self._cal_label or "calibration"
        self.calibrations[label] = result
        self.working_intensity_ma = result.working_intensity_ma
        self.modulation = replace(
            self.cfg.modulation, intensity_ma=result.working_intensity_ma
        )
        msgs = [self._event("calibration_done", calibration=label, result=result.as_dict())]
        self._cal = None

        if self.mode == "calibration":
            self.phase = EnginePhase.DONE
            self.status = "complete"
            msgs.append(self._event("session_done"))
            return msgs

        if label == "initial":
            self._part = 1
            msgs += self._begin_part(1)
        elif label == "middle":
            self._part = 2
            msgs += self._begin_part(2)
        else:
            self.phase = EnginePhase.DONE
            self.status = "complete"
            msgs.append(self._event("session_done"))
        return msgs

    # --- trial phases ----------------------------------------------------------

    def _begin_part(self, part: int) -> list[dict]:
        self._part_blocks = deque(self.plan.part_blocks(part))
        self._block_queue = deque()
        msgs = [self._event("part_started", part=part)]
        msgs += self._next_trial()
        return msgs

    def _next_trial(self) -> list[dict]:
        if self.max_trials is not None and self._trials_run >= self.max_trials:
            self.phase = EnginePhase.DONE
            self.status = "complete"
            return [self._event("session_done", truncated=True)]
        while not self._block_queue:
            if not self._part_blocks:
                return self._part_complete()
            block = self._part_blocks.popleft()
            self._block_queue = deque((e, 0) for e in block)
        entry, attempt = self._block_queue.popleft()
        self._trial = _TrialState(entry=entry, attempt=attempt)
        self.phase = EnginePhase.TRIAL_WAIT
        return [
            self._event(
                "beep",
                which="trial_start",
                part=entry.part,
                block=entry.block,
                repetition=entry.repetition,
                attempt=attempt,
            )
        ]

    def _part_complete(self) -> list[dict]:
        msgs = [self._event("block_boundary", part=self._part, end_of_part=True)]
        self.subject_habituate()
        if self._part == 1:
            msgs += self._begin_calibration("middle")
        else:
            msgs += self._begin_calibration("final")
        return msgs

    def subject_habituate(self) -> None:
        if self.subject is not None:
            self.subject.habituate(self._exposure_s / 3600.0)
        self._exposure_s = 0.0

    def _trial_finger_pos(self, trial: _TrialState, dt: float) -> Vec3:
        """Synthetic trajectory mirroring the batch harness, or operator input."""
        if self.subject is None:
            if self._pending_finger is not None:
                pos = self._pending_finger
                self._pending_finger = None
                return pos
            return self._finger.real_pos
        cfg = self.cfg.harness
        contact = self.scene_spec.contact_point
        if self.phase is EnginePhase.TRIAL_WAIT and trial.t <= cfg.approach_duration_s:
            hover = Vec3(contact.x, contact.y + 0.03, contact.z)
            return _approach_pos(
                self.scene_spec.rest_pos, hover, contact, trial.t, cfg.approach_duration_s
            )
        if self.phase is EnginePhase.TRIAL_RETURN:
            s = minimum_jerk(trial.return_t / 0.5)
            return Vec3(contact.x, contact.y, contact.z).lerp(self.scene_spec.rest_pos, s)
        feedback_strength = (
            trial.last_d_hat if trial.entry.condition.feedback is not Feedback.NONE else 0.0
        )
        depth = self.subject.steer(feedback_strength, cfg.nominal_depth_m, dt)
        return Vec3(contact.x, contact.y - depth, contact.z)

    def _tick_trial(self, dt: float) -> list[dict]:
        msgs: list[dict] = []
        trial = self._trial
        assert trial is not None
        cfg = self.cfg.harness
        trial.t += dt

        real = self._trial_finger_pos(trial, dt)
        self._finger = resolve_proxy(self._finger, real, self.scene)
        sample = interpenetration(self._finger, trial.t)
        self._last_sample_d = sample.d
        self._last_sample_d_hat = sample.d_hat

        if self.phase is EnginePhase.TRIAL_WAIT:
            if self._finger.in_contact:
                trial.t_contact = trial.t
                trial.window = TrialWindow(
                    cfg.hold_duration_s, cfg.contact_grace_s, 1.0 / cfg.tick_rate_hz
                )
                self.phase = EnginePhase.TRIAL_HOLD
                msgs.append(self._event("contact_started"))
            elif self.subject is not None and trial.t > cfg.approach_duration_s + 1.0:
                msgs += self._trial_over(trial, invalid_reason="no_contact")
                return msgs

        if self.phase is EnginePhase.TRIAL_HOLD:
            assert trial.window is not None
            status = trial.window.feed(sample, self._finger.in_contact)
            trial.last_d_hat = sample.d_hat
            msgs += self._drive_stimulus(trial.entry, sample.d_hat, dt)
            if status == "done":
                msgs.append(self._event("beep", which="hold_complete"))
                msgs += self._trial_over(trial, invalid_reason=None)
            elif status == "invalid":
                msgs += self._trial_over(trial, invalid_reason="contact_lost")
            return msgs

        if self.phase is EnginePhase.TRIAL_RETURN:
            trial.return_t += dt
            at_rest = real.distance_to(self.scene_spec.rest_pos) <= REST_RADIUS_M
            if at_rest:
                trial.dwell_t += dt
            else:
                trial.dwell_t = 0.0
            if trial.dwell_t >= RETURN_DWELL_S:
                msgs += self._next_trial()
        return msgs

    def _drive_stimulus(self, entry: PlanEntry, d_hat: float, dt: float) -> list[dict]:
        if not entry.condition.feedback.has_electrotactile:
            return []
        params = electro_map(d_hat, self.modulation)
        if params.active and self.working_intensity_ma is not None:
            # Trials must never exceed the calibrated working intensity.
            assert params.intensity_ma <= self.working_intensity_ma + 1e-9
        try:
            self.driver.update(params)
        except Exception as exc:  # device rejection is a session fault, not a crash
            self.status = f"device_fault: {exc}"
            self.phase = EnginePhase.DONE
            return [self._event("session_fault", reason=str(exc))]
        if params.active:
            self._exposure_s += dt
        return []

    def _trial_over(self, trial: _TrialState, invalid_reason: Optional[str]) -> list[dict]:
        self.driver.update(STIMULUS_OFF)
        self._trials_run += 1
        msgs = []
        if invalid_reason is not None:
            msgs.append(self._event("trial_invalid", reason=invalid_reason))
            if trial.attempt + 1 < self.cfg.harness.max_attempts_per_trial:
                self._block_queue.append((trial.entry, trial.attempt + 1))
        self.phase = EnginePhase.TRIAL_RETURN
        trial.return_t = 0.0
        trial.dwell_t = 0.0
        # Operator sessions go straight to waiting for the rest area; the
        # synthetic subject animates its return over the same phase.
        return msgs

    # --- free mode ---------------------------------------------------------------

    def _tick_free(self, dt: float) -> list[dict]:
        if self._pending_finger is not None:
            real = self._pending_finger
            self._pending_finger = None
        else:
            real = self._finger.real_pos
        self._finger = resolve_proxy(self._finger, real, self.scene)
        sample = interpenetration(self._finger, self.sim_t)
        self._last_sample_d = sample.d
        self._last_sample_d_hat = sample.d_hat
        self.driver.update(electro_map(sample.d_hat, self.modulation))
        return []

    # --- message helpers -----------------------------------------------------------

    def _message(self, kind: str, **fields) -> dict:
        self.seq += 1
        msg = {"type": kind, "seq": self.seq, "session": self.session_id}
        msg.update(fields)
        return msg

    def _event(self, name: str, **fields) -> dict:
        return self._message("event", name=name, t=self.sim_t, **fields)

    def _ack(self, client_seq) -> dict:
        return self._message("ack", ack=client_seq)

    def _error(self, reason: str, detail: str = "") -> dict:
        return self._message("error", reason=reason, detail=detail)

    def _snapshot(self) -> dict:
        trial = self._trial
        condition = None
        trial_info = None
        if trial is not None and self.phase in (
            EnginePhase.TRIAL_WAIT,
            EnginePhase.TRIAL_HOLD,
            EnginePhase.TRIAL_RETURN,
        ):
            condition = {
                "feedback": trial.entry.condition.feedback.value,
                "shading": trial.entry.condition.shading.value,
            }
            trial_info = {
                "part": trial.entry.part,
                "block": trial.entry.block,
                "repetition": trial.entry.repetition,
                "attempt": trial.attempt,
            }

        show_outline = self.phase is EnginePhase.FREE or (
            trial is not None
            and self.phase is EnginePhase.TRIAL_HOLD
            and trial.entry.condition.feedback.has_visual
        )
        outline = visual_map(self._last_sample_d_hat if show_outline else 0.0, self.modulation)

        hold_elapsed = hold_remaining = None
        if trial is not None and trial.window is not None:
            dt = 1.0 / self.cfg.harness.tick_rate_hz
            hold_elapsed = trial.window.ticks * dt
            hold_remaining = max(0.0, (trial.window.target_ticks - trial.window.ticks) * dt)

        device = self.device.state
        return self._message(
            "snapshot",
            t=self.sim_t,
            phase=self.phase.value,
            paused=self.paused,
            status=self.status,
            trial=trial_info,
            condition=condition,
            real_pos=self._finger.real_pos.as_list(),
            avatar_pos=self._finger.avatar_pos.as_list(),
            in_contact=self._finger.in_contact,
            d=self._last_sample_d,
            d_hat=self._last_sample_d_hat,
            stimulus={
                "active": device.running,
                "intensity_ma": device.current_params.intensity_ma,
                "pulse_width_us": device.current_params.pulse_width_us,
                "frequency_hz": device.current_params.frequency_hz,
            },
            outline={"scale": outline.scale, "border_px": outline.border_px},
            timers={"hold_elapsed_s": hold_elapsed, "hold_remaining_s": hold_remaining},
            calibration=(
                {"probe_id": self._probe_id, "awaiting_response": self._probe_active}
                if self.phase is EnginePhase.CALIBRATING
                else None
            ),
        )

    def hello(self) -> dict:
        spec = self.scene_spec
        return self._message(
            "hello",
            version=PROTOCOL_VERSION,
            mode=self.mode,
            tick_rate_hz=self.cfg.harness.tick_rate_hz,
            scene={
                "cube_edge_m": spec.cube_edge_m,
                "cube_center": [spec.cube_center_x_m, spec.table_height_m + spec.cube_edge_m / 2, spec.cube_center_z_m],
                "cube_top_y_m": spec.cube_top_y_m,
                "contact_point": spec.contact_point.as_list(),
                "rest_pos": spec.rest_pos.as_list(),
                "table_height_m": spec.table_height_m,
                "d_max_m": 0.03,
            },
        )


# --- transport ---------------------------------------------------------------------


class ServiceServer:
    """Single-client line-protocol server around one SessionEngine.

    ``realtime=False`` removes tick pacing (simulated time runs as fast as
    the loop allows) for integration tests and batch demos; snapshot
    throttling stays wall-clock based either way.
    """

    def __init__(
        self,
        engine: SessionEngine,
        snapshot_rate_hz: float = SNAPSHOT_RATE_HZ,
        realtime: bool = True,
    ):
        self.engine = engine
        self.snapshot_interval = 1.0 / snapshot_rate_hz
        self.realtime = realtime
        self.inbound: asyncio.Queue = asyncio.Queue()
        self.outbound: Optional[asyncio.Queue] = None
        self._last_snapshot_sent = 0.0
        self._client_lock = asyncio.Lock()
        self.ticks = 0

    # -- engine side

    async def tick_loop(self):
        dt = 1.0 / self.engine.cfg.harness.tick_rate_hz
        next_deadline = time.monotonic()
        while True:
            next_deadline += dt
            while not self.inbound.empty():
                msg = self.inbound.get_nowait()
                for reply in self.engine.handle_message(msg):
                    self._dispatch(reply)
            for msg in self.engine.tick(dt):
                self._dispatch(msg)
            self.ticks += 1
            if not self.realtime:
                await asyncio.sleep(0)
                continue
            delay = next_deadline - time.monotonic()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                next_deadline = time.monotonic()
                await asyncio.sleep(0)

    def _dispatch(self, msg: dict):
        if self.outbound is None:
            return
        if msg["type"] == "snapshot":
            now = time.monotonic()
            if now - self._last_snapshot_sent < self.snapshot_interval:
                return
            self._last_snapshot_sent = now
        try:
            self.outbound.put_nowait(msg)
        except asyncio.QueueFull:
            pass

    # -- client side

    async def _client_session(self, read_line, write_line, peer: str):
        """Shared handshake + pumping for both TCP and WebSocket clients."""
        if self._client_lock.locked():
            await write_line(
                {"type": "error", "reason": "busy", "detail": "another client is connected"}
            )
            return
        async with self._client_lock:
            await write_line(self.engine.hello())
            try:
                raw = await asyncio.wait_for(read_line(), timeout=10.0)
            except asyncio.TimeoutError:
                await write_line({"type": "error", "reason": "handshake_timeout", "detail": ""})
                return
            if raw is None:
                return
            try:
                hello = json.loads(raw)
            except json.JSONDecodeError:
                await write_line({"type": "error", "reason": "malformed", "detail": "bad hello"})
                return
            if hello.get("type") != "hello" or hello.get("version") != PROTOCOL_VERSION:
                await write_line(
                    {
                        "type": "error",
                        "reason": "version_mismatch",
                        "detail": f"server speaks protocol {PROTOCOL_VERSION}",
                    }
                )
                return

            outbound: asyncio.Queue = asyncio.Queue(maxsize=256)
            self.outbound = outbound
            # Client resumes from the freshest state immediately.
            outbound.put_nowait(self.engine._snapshot())
            log.info("client connected: %s", peer)

            async def writer():
                while True:
                    msg = await outbound.get()
                    await write_line(msg)

            writer_task = asyncio.create_task(writer())
            try:
                while True:
                    raw = await read_line()
                    if raw is None:
                        break
                    if not raw.strip():
                        continue
                    try:
                        msg = json.loads(raw)
                    except json.JSONDecodeError as exc:
                        outbound.put_nowait(
                            {"type": "error", "reason": "malformed", "detail": str(exc)}
                        )
                        continue
                    await self.inbound.put(msg)
            finally:
                writer_task.cancel()
                if self.outbound is outbound:
                    self.outbound = None
                log.info("client disconnected: %s", peer)

    async def handle_tcp(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        peer = str(writer.get_extra_info("peername"))

        async def read_line():
            line = await reader.readline()
            return line.decode("utf-8") if line else None

        async def write_line(msg: dict):
            writer.write((json.dumps(msg) + "\n").encode("utf-8"))
            await writer.drain()

        try:
            await self._client_session(read_line, write_line, peer)
        except (ConnectionResetError, BrokenPipeError):
            pass
        finally:
            writer.close()


async def run_service(
    engine: SessionEngine,
    host: str = "127.0.0.1",
    port: int = 7340,
    http_port: Optional[int] = None,
    static_dir: Optional[Path] = None,
    ready: Optional[asyncio.Event] = None,
    realtime: bool = True,
):
    """Serve the session: TCP line protocol plus optional HTTP/WebSocket bridge."""
    server = ServiceServer(engine, realtime=realtime)
    tcp_server = await asyncio.start_server(server.handle_tcp, host, port)
    log.info("session service on tcp://%s:%d", host, port)

    runner = None
    if http_port is not None:
        runner = await _start_http_bridge(server, host, http_port, static_dir)

    if ready is not None:
        ready.set()
    try:
        await server.tick_loop()
    finally:
        tcp_server.close()
        await tcp_server.wait_closed()
        if runner is not None:
            await runner.cleanup()


async def _start_http_bridge(server: ServiceServer, host: str, port: int, static_dir):
    from aiohttp import WSMsgType, web

    async def ws_handler(request):
        ws = web.WebSocketResponse(heartbeat=30)
        await ws.prepare(request)
        queue: asyncio.Queue = asyncio.Queue(maxsize=64)

        async def read_line():
            msg = await ws.receive()
            if msg.type == WSMsgType.TEXT:
                return msg.data
            return None

        async def write_line(msg: dict):
            await ws.send_str(json.dumps(msg))

        try:
            await server._client_session(read_line, write_line, str(request.remote))
        except ConnectionResetError:
            pass
        finally:
            await ws.close()
        return ws

    app = web.Application()
    app.router.add_get("/ws", ws_handler)
    if static_dir is not None and Path(static_dir).is_dir():
        async def index(request):
            return web.FileResponse(Path(static_dir) / "index.html")

        app.router.add_get("/", index)
        app.router.add_static("/", static_dir)
    runner = web.AppRunner(app)
    await runner.setup()
    site = web.TCPSite(runner, host, port)
    await site.start()
    log.info("operator console on http://%s:%d", host, port)
    return runner
