"""Time-stamped multi-channel pose trajectories and phase normalization.

A trajectory stacks one or more channel groups, each a triple of scalar
dimensions: a position in meters or an orientation as an axis-angle vector
in radians. Channels sharing a name (e.g. ``left_hand`` position and
orientation) form the channel group tracked by the follower and reported
per row in evaluation tables.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, SchemaError


class ChannelKind(enum.Enum):
    POSITION = "position-m"
    ORIENTATION = "orientation-axisangle-rad"

    @property
    def dim(self) -> int:
        return 3

    @property
    def unit(self) -> str:
        return "m" if self is ChannelKind.POSITION else "rad"


@dataclass(frozen=True)
class ChannelSpec:
    """One named triple of stacked dimensions (position or orientation)."""

    name: str
    kind: ChannelKind

    @property
    def dim(self) -> int:
        return self.kind.dim

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind.value}

    @staticmethod
    def from_dict(doc: dict) -> "ChannelSpec":
        try:
            return ChannelSpec(doc["name"], ChannelKind(doc["kind"]))
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"bad channel descriptor {doc!r}: {exc}") from exc


def stacked_dim(channels) -> int:
    return sum(c.dim for c in channels)


def channel_slices(channels) -> dict:
    """Map (name, kind) -> slice into the stacked value vector."""
    out = {}
    offset = 0
    for c in channels:
        out[(c.name, c.kind)] = slice(offset, offset + c.dim)
        offset += c.dim
    return out


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Trajectory:
    """Strictly time-ordered samples of stacked channel values in one frame."""

    channels: tuple
    timestamps: np.ndarray
    values: np.ndarray
    frame: str

    def __post_init__(self):
        channels = tuple(self.channels)
        ts = _freeze(np.atleast_1d(self.timestamps))
        vals = _freeze(np.atleast_2d(self.values))
        if ts.ndim != 1 or len(ts) < 2:
            raise SchemaError("a trajectory needs at least 2 time-stamped samples")
        if np.any(np.diff(ts) <= 0):
            raise SchemaError("timestamps must be strictly increasing")
        n = stacked_dim(channels)
        if vals.shape != (len(ts), n):
            raise SchemaError(
                f"values shape {vals.shape} does not match {len(ts)} samples x {n} stacked dims"
            )
        if not np.all(np.isfinite(vals)) or not np.all(np.isfinite(ts)):
            raise SchemaError("trajectory entries must be finite")
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)

    @property
    def n_dims(self) -> int:
        return self.values.shape[1]

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def duration(self) -> float:
        return float(self.timestamps[-1] - self.timestamps[0])

    def slices(self) -> dict:
        return channel_slices(self.channels)

    def channel_values(self, name: str, kind: ChannelKind) -> np.ndarray:
        try:
            sl = self.slices()[(name, kind)]
        except KeyError:
            raise SchemaError(f"trajectory has no channel ({name!r}, {kind.value})")
        return self.values[:, sl]

    def same_layout(self, other_channels) -> bool:
        return tuple(self.channels) == tuple(other_channels)


@dataclass(frozen=True)
class PhaseTrajectory:
    """Duration-independent trajectory parameterized by phase in [0, 1]."""

    phases: np.ndarray
    values: np.ndarray
    source_duration: float

    def __post_init__(self):
        phases = _freeze(np.atleast_1d(self.phases))
        vals = _freeze(np.atleast_2d(self.values))
        if phases[0] != 0.0 or phases[-1] != 1.0:
            raise SchemaError("phase samples must start at 0 and end at 1")
        if np.any(np.diff(phases) <= 0):
            raise SchemaError("phases must be strictly increasing")
        if vals.shape[0] != len(phases):
            raise SchemaError("one value vector per phase sample required")
        if self.source_duration <= 0:
            raise SchemaError("source duration must be positive")
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "values", vals)

    @property
    def n_dims(self) -> int:
        return self.values.shape[1]


def normalize_phase(traj: Trajectory) -> PhaseTrajectory:
    """Map timestamps affinely onto [0, 1]; values are untouched."""
    duration = traj.duration
    if duration <= 0.0:
        raise DegenerateInputError("cannot normalize a zero-duration trajectory")
    phases = (traj.timestamps - traj.timestamps[0]) / duration
    phases = phases.copy()
    phases[0] = 0.0
    phases[-1] = 1.0
    return PhaseTrajectory(phases=phases, values=traj.values, source_duration=duration)
