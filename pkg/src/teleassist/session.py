"""The four-phase interactive assistance loop.

A session moves through pre-activation (an eligible object is in the
scene), generation (the operator sketches the start of the motion),
validation (the proposed trajectory is previewed for accept/reject) and
operator-paced execution. The proposal pipeline recognizes the primitive
from the motion prefix, conditions it on the prefix and the object goal,
and blends the tail into the object's affordance plan when one exists.

Execution is tracked by a first-order-lag kinematic follower so deviation
between commanded and followed poses can be monitored and surfaced.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .affordance import covered_mask, pose_to_channel_vector
from .blending import blend, solve_blend_profile
from .config import AssistConfig
from .errors import (
    ActiveExecutionError,
    ConstraintError,
    IllegalTransitionError,
    SchemaError,
    UnknownObjectError,
)
from .geometry import Pose, geodesic_angle
from .promp import ObservationPoint, condition, mean_trajectory
from .recognition import ObservationBuffer, detect_motion_onset, recognize
from .scene import SceneObject, SceneRegistry
from .trajectory import ChannelKind, Trajectory, channel_slices


class Phase(enum.Enum):
    IDLE = "Idle"
    PRE_ACTIVATION = "PreActivation"
    GENERATION = "Generation"
    VALIDATION = "Validation"
    EXECUTING = "Executing"
    PAUSED = "Paused"
    COMPLETED = "Completed"
    ABORTED = "Aborted"


_ABORTABLE = tuple(p for p in Phase if p is not Phase.COMPLETED)

LEGAL_TRANSITIONS = frozenset(
    {
        (Phase.IDLE, Phase.PRE_ACTIVATION),
        (Phase.PRE_ACTIVATION, Phase.GENERATION),
        (Phase.GENERATION, Phase.VALIDATION),
        (Phase.VALIDATION, Phase.GENERATION),
        (Phase.VALIDATION, Phase.EXECUTING),
        (Phase.EXECUTING, Phase.PAUSED),
        (Phase.PAUSED, Phase.EXECUTING),
        (Phase.EXECUTING, Phase.COMPLETED),
    }
    | {(p, Phase.ABORTED) for p in _ABORTABLE}
)


@dataclass(frozen=True)
class Proposal:
    """What the operator previews: the recognized, adapted, blended reference."""

    recognized: object
    conditioned_promp: object
    reference: Trajectory          # world frame, drives the follower
    preview: Trajectory            # object frame, drawn by the console
    envelope: np.ndarray           # per-sample per-dim std of the adapted primitive
    blend_start_index: int | None
    duration: float
    gripper_command: str | None

    def __post_init__(self):
        if self.reference.n_samples < 2:
            raise SchemaError("a proposal reference needs at least 2 samples")
        if self.blend_start_index is not None and not (
            0 <= self.blend_start_index < self.reference.n_samples
        ):
            raise SchemaError("blend_start_index outside the reference range")


class Follower:
    """First-order lag model standing in for the robot controller."""

    def __init__(self, channels, initial: np.ndarray, tau: float):
        self.channels = tuple(channels)
        self.commanded = np.array(initial, dtype=float)
        self.actual = np.array(initial, dtype=float)
        self.tau = tau

    def command(self, values: np.ndarray) -> None:
        self.commanded = np.array(values, dtype=float)

    def step(self, dt: float) -> None:
        if dt <= 0:
            raise SchemaError("follower step requires dt > 0")
        factor = 1.0 - math.exp(-dt / self.tau)
        self.actual = self.actual + (self.commanded - self.actual) * factor

    def freeze(self) -> None:
        self.commanded = self.actual.copy()

    def deviations(self) -> dict:
        """Per channel-group positional [m] and orientation [rad] errors."""
        out = {}
        for (name, kind), sl in channel_slices(self.channels).items():
            entry = out.setdefault(name, {"position_error": 0.0, "orientation_error": 0.0})
            if kind is ChannelKind.POSITION:
                entry["position_error"] = float(
                    np.linalg.norm(self.commanded[sl] - self.actual[sl])
                )
            else:
                entry["orientation_error"] = geodesic_angle(
                    self.actual[sl], self.commanded[sl]
                )
        return out

    def state_dict(self) -> dict:
        return {
            "commanded": self.commanded.tolist(),
            "actual": self.actual.tolist(),
            "deviations": self.deviations(),
        }


@dataclass
class AssistSession:
    """State record of one assistance episode."""

    session_seq: int
    state: Phase = Phase.IDLE
    target_object: str | None = None
    buffer: ObservationBuffer | None = None
    proposal: Proposal | None = None
    cursor: float = 0.0

    def transition(self, new_state: Phase, command: str) -> None:
        if (self.state, new_state) not in LEGAL_TRANSITIONS:
            raise IllegalTransitionError(self.state.value, command)
        self.state = new_state


class SessionController:
    """Owns the single active session, the scene, and the follower.

    Commands are expected to arrive on one serialized stream; every state
    change, availability and warning is pushed to the event sink in
    mutation order.
    """

    def __init__(self, scene: SceneRegistry, config: AssistConfig | None = None,
                 emit=None):
        self.scene = scene
        self.config = config or AssistConfig()
        self._emit = emit or (lambda event: None)
        self._session_counter = 0
        self._idle_epoch = 0
        self._availability_sent: set = set()
        self._raw_stream: list = []
        self.follower: Follower | None = None
        self.session = self._fresh_session()
        self.dropped_samples = 0

    # -- plumbing ----------------------------------------------------------

    def _fresh_session(self) -> AssistSession:
        self._session_counter += 1
        self._idle_epoch += 1
        return AssistSession(session_seq=self._session_counter)

    def emit(self, event_type: str, **payload) -> None:
        self._emit({"type": event_type, **payload})

    def _set_state(self, new_state: Phase, command: str) -> None:
        previous = self.session.state
        self.session.transition(new_state, command)
        self.emit(
            "state_changed",
            session=self.session.session_seq,
            previous=previous.value,
            current=new_state.value,
        )

    def _announce_available(self, obj: SceneObject) -> None:
        key = (obj.id, self._idle_epoch)
        if key in self._availability_sent:
            return
        self._availability_sent.add(key)
        self.emit(
            "availability",
            object_id=obj.id,
            object_class=obj.object_class,
            tasks=list(obj.associated_tasks),
        )

    def _enter_pre_activation(self, obj: SceneObject) -> None:
        self.session.target_object = obj.id
        self._set_state(Phase.PRE_ACTIVATION, "object_available")

    def _reset_after_terminal(self) -> None:
        self.session = self._fresh_session()
        for obj in self.scene.eligible_objects():
            self._announce_available(obj)
        eligible = self.scene.eligible_objects()
        if eligible:
            self._enter_pre_activation(eligible[-1])

    # -- scene commands ------------------------------------------------------

    def inject_detection(self, object_class: str, pose: Pose) -> SceneObject:
        obj = self.scene.inject_detection(object_class, pose)
        self.emit("object_added", object=obj.to_dict())
        if obj.associated_tasks:
            if self.session.state in (Phase.IDLE, Phase.PRE_ACTIVATION):
                self._announce_available(obj)
            if self.session.state is Phase.IDLE:
                self._enter_pre_activation(obj)
        return obj

    def override_pose(self, object_id: str, pose: Pose) -> SceneObject:
        old = self.scene.get(object_id)
        is_target = self.session.target_object == object_id
        if is_target and self.session.state in (
            Phase.VALIDATION, Phase.EXECUTING, Phase.PAUSED
        ):
            raise ActiveExecutionError(
                f"cannot override pose of {object_id!r} while the session is "
                f"{self.session.state.value}"
            )
        updated = self.scene.set_pose(object_id, pose)
        if is_target and self.session.state is Phase.GENERATION:
            self._reexpress_buffer(old.pose, pose)
        self.emit("pose_overridden", object=updated.to_dict())
        return updated

    def _reexpress_buffer(self, old_pose: Pose, new_pose: Pose) -> None:
        """Move buffered object-frame samples into the corrected object frame."""
        buf = self.session.buffer
        if buf is None or not len(buf):
            return
        delta = new_pose.inverse().compose(old_pose)
        buf.values = [self._transform_vector(delta, v, buf.channels) for v in buf.values]
        self._raw_stream = [
            (t, self._transform_vector(delta, v, buf.channels)) for t, v in self._raw_stream
        ]

    @staticmethod
    def _transform_vector(pose: Pose, values: np.ndarray, channels) -> np.ndarray:
        out = np.array(values, dtype=float)
        for (name, kind), sl in channel_slices(channels).items():
            if kind is ChannelKind.POSITION:
                out[sl] = pose.apply(out[sl])
            else:
                out[sl] = pose.rotate_rotvec(out[sl])
        return out

    # -- session commands ----------------------------------------------------

    def activate(self, object_id: str | None = None) -> None:
        if self.session.state is not Phase.PRE_ACTIVATION:
            raise IllegalTransitionError(self.session.state.value, "activate")
        if object_id is not None:
            obj = self.scene.get(object_id)
            if not obj.associated_tasks:
                raise UnknownObjectError(
                    f"object {object_id!r} has no associated tasks"
                )
            self.session.target_object = object_id
        target = self.scene.get(self.session.target_object)
        layout = tuple(self.scene.tasks.tasks_for(target.object_class)[0].channels)
        self.session.buffer = ObservationBuffer(channels=layout)
        self._raw_stream = []
        self._set_state(Phase.GENERATION, "activate")

    def feed_observation(self, timestamp: float, values) -> bool:
        """Append one operator sample (object frame). Returns True if kept.

        Samples are decimated to the configured rate; the drop count is
        surfaced in telemetry. Before motion onset, samples accumulate in a
        raw stream that only the onset detector sees.
        """
        if self.session.state is not Phase.GENERATION:
            raise IllegalTransitionError(self.session.state.value, "feed_observation")
        values = np.asarray(values, dtype=float)
        buf = self.session.buffer
        # 10% timing slack so a nominal-rate stream with jitter is not halved
        if self._raw_stream and timestamp - self._raw_stream[-1][0] < 0.9 / self.config.sample_rate:
            self.dropped_samples += 1
            return False
        self._raw_stream.append((float(timestamp), values))

        if not buf.started:
            onset = self._detect_onset()
            if onset is None:
                return True
            self._rebind_nearest_object(onset)
            buf = self.session.buffer
            buf.start(onset)
            for t, v in self._raw_stream:
                if t >= onset:
                    buf.append(t, v)
        else:
            buf.append(float(timestamp), values)

        candidates = self.scene.tasks.tasks_for(
            self.scene.get(self.session.target_object).object_class
        )
        shortest = min(c.mean_duration for c in candidates)
        if buf.span >= self.config.window_fraction * shortest:
            self._propose()
        return True

    def _detect_onset(self) -> float | None:
        if len(self._raw_stream) < 2:
            return None
        ts = np.array([t for t, _ in self._raw_stream])
        vals = np.stack([v for _, v in self._raw_stream])
        stream = Trajectory(
            channels=self.session.buffer.channels,
            timestamps=ts,
            values=vals,
            frame="object",
        )
        return detect_motion_onset(stream, threshold=self.config.onset_threshold)

    def _rebind_nearest_object(self, onset: float) -> None:
        """With several same-class objects, bind to the one nearest the hand."""
        target = self.scene.get(self.session.target_object)
        siblings = self.scene.objects_of_class(target.object_class)
        if len(siblings) < 2:
            return
        first = next(v for t, v in self._raw_stream if t >= onset)
        sl = channel_slices(self.session.buffer.channels)
        pos_slice = next(
            s for (name, kind), s in sl.items() if kind is ChannelKind.POSITION
        )
        hand_world = target.pose.apply(first[pos_slice])
        nearest = min(
            siblings,
            key=lambda o: float(np.linalg.norm(hand_world - o.pose.position)),
        )
        if nearest.id != target.id:
            delta = nearest.pose.inverse().compose(target.pose)
            self._raw_stream = [
                (t, self._transform_vector(delta, v, self.session.buffer.channels))
                for t, v in self._raw_stream
            ]
            self.session.target_object = nearest.id

    def _propose(self) -> None:
        target = self.scene.get(self.session.target_object)
        candidates = self.scene.tasks.tasks_for(target.object_class)
        rec = recognize(
            self.session.buffer, candidates, window_fraction=self.config.window_fraction
        )
        promp = candidates[rec.task_index]

        timestamps, values = self.session.buffer.snapshot()
        onset = self.session.buffer.onset_time
        phases = np.clip((timestamps - onset) / promp.mean_duration, 0.0, 1.0)
        observations = []
        last_phase = -1.0
        for phase, value in zip(phases, values):
            if phase <= last_phase:  # clamping can collapse trailing samples
                continue
            observations.append(ObservationPoint.with_default_noise(
                float(phase), value, noise=self.config.observation_noise
            ))
            last_phase = phase
        adapted = condition(promp, observations)

        # anchor the goal: affordance approach waypoint when present, else the
        # primitive's own terminal mean (in the object frame either way)
        terminal = adapted.mean_at([1.0])[0]
        template = target.affordance
        if template is not None:
            goal_value = pose_to_channel_vector(
                template.approach_waypoint,
                promp.channels,
                template.actions[0].end_effector,
                fallback=terminal,
            )
            noise = np.where(
                covered_mask(promp.channels, template.actions[0].end_effector),
                self.config.observation_noise,
                1e9,  # uncovered groups stay unconstrained
            )
            goal = ObservationPoint(phase=1.0, value=goal_value, noise=noise)
        else:
            goal = ObservationPoint.with_default_noise(
                1.0, terminal, noise=self.config.observation_noise
            )
        adapted = condition(adapted, [goal])

        duration = promp.mean_duration / self.config.speed_scale
        n_ref = max(2, int(round(duration * self.config.sample_rate)))
        reference_obj = mean_trajectory(adapted, n_samples=n_ref, duration=duration)
        envelope = adapted.std_at(np.linspace(0.0, 1.0, n_ref))

        blend_start = None
        gripper = None
        if template is not None:
            n_blend = max(2, int(round(self.config.blend_fraction * n_ref)))
            n_blend = min(n_blend, n_ref)
            blend_start = n_ref - n_blend
            tail = Trajectory(
                channels=reference_obj.channels,
                timestamps=reference_obj.timestamps[blend_start:],
                values=reference_obj.values[blend_start:],
                frame=reference_obj.frame,
            )
            profile = solve_blend_profile(
                alpha_target=self.config.blend_alpha_target, n_blend=n_blend
            )
            blend_target = pose_to_channel_vector(
                template.approach_waypoint,
                promp.channels,
                template.actions[0].end_effector,
                fallback=reference_obj.values[-1],
            )
            blended = blend(tail, blend_target, profile)
            values_obj = np.vstack([reference_obj.values[:blend_start], blended.values])
            reference_obj = Trajectory(
                channels=reference_obj.channels,
                timestamps=reference_obj.timestamps,
                values=values_obj,
                frame=reference_obj.frame,
            )
            gripper = template.actions[0].gripper_command.value

        world_values = np.stack([
            self._transform_vector(target.pose, v, reference_obj.channels)
            for v in reference_obj.values
        ])
        reference_world = Trajectory(
            channels=reference_obj.channels,
            timestamps=reference_obj.timestamps,
            values=world_values,
            frame="world",
        )

        self.session.proposal = Proposal(
            recognized=rec,
            conditioned_promp=adapted,
            reference=reference_world,
            preview=reference_obj,
            envelope=envelope,
            blend_start_index=blend_start,
            duration=duration,
            gripper_command=gripper,
        )
        self._set_state(Phase.VALIDATION, "proposal_ready")
        self.emit(
            "proposal",
            session=self.session.session_seq,
            recognized=rec.to_dict(),
            duration=duration,
            blend_start_index=blend_start,
            preview={
                "frame": self.session.proposal.preview.frame,
                "timestamps": self.session.proposal.preview.timestamps.tolist(),
                "values": self.session.proposal.preview.values.tolist(),
                "channels": [c.to_dict() for c in reference_obj.channels],
            },
            envelope=envelope.tolist(),
            target_object=target.id,
        )

    def respond(self, verdict: str) -> None:
        if self.session.state is not Phase.VALIDATION:
            raise IllegalTransitionError(self.session.state.value, f"respond:{verdict}")
        if verdict == "accept":
            self._set_state(Phase.EXECUTING, "accept")
            self.session.cursor = 0.0
            reference = self.session.proposal.reference
            self.follower = Follower(
                reference.channels, reference.values[0], tau=self.config.follower_tau
            )
            self.emit("progress", session=self.session.session_seq, fraction=0.0)
        elif verdict == "reject":
            self.session.proposal = None
            self.session.buffer.clear()
            self._raw_stream = []
            self._set_state(Phase.GENERATION, "reject")
        else:
            raise SchemaError(f"verdict must be accept or reject, got {verdict!r}")

    def advance(self, delta: float) -> None:
        if self.session.state not in (Phase.EXECUTING, Phase.PAUSED):
            raise IllegalTransitionError(self.session.state.value, "advance")
        if delta < 0:
            raise ConstraintError("backward scrubbing is not supported")
        if delta == 0:
            if self.session.state is Phase.EXECUTING:
                self._set_state(Phase.PAUSED, "advance:pause")
            return
        if self.session.state is Phase.PAUSED:
            self._set_state(Phase.EXECUTING, "advance:resume")
        self.session.cursor = min(1.0, self.session.cursor + delta)
        reference = self.session.proposal.reference
        index = int(round(self.session.cursor * (reference.n_samples - 1)))
        self.follower.command(reference.values[index])
        self.emit(
            "progress", session=self.session.session_seq, fraction=self.session.cursor
        )
        if self.session.cursor >= 1.0:
            self._set_state(Phase.COMPLETED, "advance:complete")
            if self.session.proposal.gripper_command is not None:
                self.emit(
                    "gripper",
                    session=self.session.session_seq,
                    command=self.session.proposal.gripper_command,
                )
            self._reset_after_terminal()

    def tick(self, dt: float) -> dict | None:
        """Advance the follower clock; emits a warning when deviation exceeds bounds."""
        if self.follower is None:
            return None
        self.follower.step(dt)
        deviations = self.follower.deviations()
        for group, errs in deviations.items():
            if (
                errs["position_error"] > self.config.deviation_position_bound
                or errs["orientation_error"] > self.config.deviation_orientation_bound
            ):
                self.emit(
                    "deviation_warning",
                    session=self.session.session_seq,
                    group=group,
                    position_error=errs["position_error"],
                    orientation_error=errs["orientation_error"],
                    position_bound=self.config.deviation_position_bound,
                    orientation_bound=self.config.deviation_orientation_bound,
                )
        return self.follower.state_dict()

    def abort(self) -> None:
        if self.session.state is Phase.COMPLETED:
            raise IllegalTransitionError(self.session.state.value, "abort")
        if self.follower is not None:
            self.follower.freeze()
        if self.session.buffer is not None:
            self.session.buffer.clear()
        self._raw_stream = []
        self._set_state(Phase.ABORTED, "abort")
        self._reset_after_terminal()

    # -- snapshots -----------------------------------------------------------

    def snapshot(self) -> dict:
        session = {
            "session": self.session.session_seq,
            "state": self.session.state.value,
            "target_object": self.session.target_object,
            "cursor": self.session.cursor,
            "dropped_samples": self.dropped_samples,
            "proposal": None,
        }
        if self.session.proposal is not None:
            p = self.session.proposal
            session["proposal"] = {
                "recognized": p.recognized.to_dict(),
                "duration": p.duration,
                "blend_start_index": p.blend_start_index,
                "preview": {
                    "frame": p.preview.frame,
                    "timestamps": p.preview.timestamps.tolist(),
                    "values": p.preview.values.tolist(),
                    "channels": [c.to_dict() for c in p.preview.channels],
                },
                "envelope": p.envelope.tolist(),
            }
        return {
            "session": session,
            "scene": [o.to_dict() for o in self.scene.objects()],
            "registry": self.scene.tasks.describe(),
            "follower": None if self.follower is None else self.follower.state_dict(),
            "config": self.config.to_dict(),
        }
