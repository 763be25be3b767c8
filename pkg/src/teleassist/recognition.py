"""Motion-onset gating and primitive recognition from a motion prefix.

Recognition scores each candidate primitive by the summed distance between
the observed prefix and the candidate's mean, with the candidate modulated
to its own demonstrations' mean duration. The argmin wins; ties break to
the lowest candidate index so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientObservationError, NoContextError, SchemaError
from .trajectory import ChannelKind, Trajectory, channel_slices

DEFAULT_WINDOW_FRACTION = 1.0 / 3.0
DEFAULT_ONSET_THRESHOLD = 0.03  # m/s; below deliberate hand motion, above jitter


@dataclass
class ObservationBuffer:
    """Operator samples collected in the candidate object frame after onset.

    Single-writer: the session appends; readers take snapshots.
    """

    channels: tuple
    timestamps: list = field(default_factory=list)
    values: list = field(default_factory=list)
    started: bool = False
    onset_time: float | None = None

    def start(self, onset_time: float) -> None:
        self.started = True
        self.onset_time = onset_time

    def append(self, timestamp: float, value) -> None:
        if not self.started:
            raise SchemaError("buffer must be started (onset detected) before appending")
        if self.timestamps and timestamp <= self.timestamps[-1]:
            raise SchemaError("buffer timestamps must be strictly increasing")
        self.timestamps.append(float(timestamp))
        self.values.append(np.asarray(value, dtype=float))

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def span(self) -> float:
        if len(self.timestamps) < 2:
            return 0.0
        return self.timestamps[-1] - self.timestamps[0]

    def snapshot(self):
        """Immutable copy of (timestamps, values) for concurrent readers."""
        return np.array(self.timestamps), np.array(self.values)

    def clear(self) -> None:
        self.timestamps.clear()
        self.values.clear()
        self.started = False
        self.onset_time = None


@dataclass(frozen=True)
class RecognitionResult:
    """Winning candidate plus the full score table for observability."""

    task_index: int
    task_label: str
    scores: tuple
    window_fraction: float

    def __post_init__(self):
        if not all(np.isfinite(s) and s >= 0 for _, s in self.scores):
            raise SchemaError("scores must be finite and non-negative")
        best = min(range(len(self.scores)), key=lambda i: (self.scores[i][1], i))
        if self.task_index != best:
            raise SchemaError("task_index must minimize the score")

    def to_dict(self) -> dict:
        return {
            "task_index": self.task_index,
            "task_label": self.task_label,
            "scores": [[label, float(score)] for label, score in self.scores],
            "window_fraction": self.window_fraction,
        }


def detect_motion_onset(stream: Trajectory, threshold: float = DEFAULT_ONSET_THRESHOLD,
                        position_channel: str | None = None) -> float | None:
    """First timestamp at which the end-effector speed exceeds the threshold.

    Speed is the finite difference of the designated position channel
    (default: the first position-kind channel). The returned timestamp is
    the start of the first exceeding step, i.e. the last sample before
    motion was measured.
    """
    slices = channel_slices(stream.channels)
    position_slice = None
    for (name, kind), sl in slices.items():
        if kind is not ChannelKind.POSITION:
            continue
        if position_channel is None or name == position_channel:
            position_slice = sl
            break
    if position_slice is None:
        raise SchemaError(
            f"no position channel {position_channel!r} in layout "
            f"{[(c.name, c.kind.value) for c in stream.channels]}"
        )
    positions = stream.values[:, position_slice]
    steps = np.diff(positions, axis=0)
    dts = np.diff(stream.timestamps)
    speeds = np.linalg.norm(steps, axis=1) / dts
    exceeding = np.nonzero(speeds > threshold)[0]
    if len(exceeding) == 0:
        return None
    return float(stream.timestamps[exceeding[0]])


def prefix_buffer(traj: Trajectory, span: float) -> ObservationBuffer:
    """Buffer holding the trajectory head until ``span`` seconds are covered."""
    buf = ObservationBuffer(channels=tuple(traj.channels))
    t0 = float(traj.timestamps[0])
    buf.start(t0)
    for t, v in zip(traj.timestamps, traj.values):
        buf.append(float(t), v)
        if t - t0 >= span:
            break
    return buf


def recognize(buffer: ObservationBuffer, candidates, window_fraction: float = DEFAULT_WINDOW_FRACTION,
              channel_weights: dict | None = None) -> RecognitionResult:
    """Pick the candidate whose duration-modulated mean best matches the prefix.

    Buffer timestamps map onto each candidate's phase through that
    candidate's mean duration (clamped to [0, 1]). The distance is the
    Euclidean norm over a per-channel weighted stack; default weights are
    1.0 per meter and 1.0 per radian.
    """
    candidates = list(candidates)
    if not candidates:
        raise NoContextError("no candidate primitives for the current context")
    layout = tuple(buffer.channels)
    for cand in candidates:
        if cand.channels is None or tuple(cand.channels) != layout:
            raise SchemaError(
                f"candidate {cand.task_label!r} channel layout does not match the buffer"
            )
    if len(buffer) < 2:
        raise InsufficientObservationError("buffer holds fewer than 2 samples", 0.0)
    shortest = min(c.mean_duration for c in candidates)
    required_span = window_fraction * shortest
    if buffer.span < required_span:
        raise InsufficientObservationError(
            "observed prefix shorter than the recognition window",
            buffer.span / required_span if required_span > 0 else 1.0,
        )

    timestamps, values = buffer.snapshot()
    weighted = values * _weight_vector(layout, channel_weights)
    origin = buffer.onset_time if buffer.onset_time is not None else timestamps[0]

    scored = []
    for cand in candidates:
        phases = np.clip((timestamps - origin) / cand.mean_duration, 0.0, 1.0)
        mean = cand.mean_at(phases) * _weight_vector(layout, channel_weights)
        distance = float(np.linalg.norm(weighted - mean, axis=1).sum())
        scored.append((cand.task_label, distance))

    best = min(range(len(scored)), key=lambda i: (scored[i][1], i))
    return RecognitionResult(
        task_index=best,
        task_label=scored[best][0],
        scores=tuple(scored),
        window_fraction=buffer.span / candidates[best].mean_duration,
    )


def _weight_vector(channels, channel_weights: dict | None) -> np.ndarray:
    if channel_weights is None:
        channel_weights = {}
    parts = []
    for c in channels:
        w = channel_weights.get(c.name, channel_weights.get(c.kind, 1.0))
        parts.append(np.full(c.dim, float(w)))
    return np.concatenate(parts)
