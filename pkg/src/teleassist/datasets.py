"""Demonstration sets: persistence, and synthetic desk-scale generators.

Two generators stand in for recorded teleoperation data: a door-handle
reach with varied approach poses, and a three-family punching task (jab,
hook, uppercut analogues). Both emit minimum-jerk position profiles with
per-demo jitter and are reproducible from their seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, SchemaError
from .trajectory import ChannelKind, ChannelSpec, Trajectory

DEMOSET_SCHEMA_VERSION = 1
PROVENANCES = ("recorded", "synthetic", "paper-dataset")

DOOR_FRAME = "door_handle"
PUNCH_FRAME = "punch_target"
PUNCH_FAMILIES = ("jab", "hook", "uppercut")

SAMPLE_RATE = 50.0

DOOR_CHANNELS = (
    ChannelSpec("left_hand", ChannelKind.POSITION),
    ChannelSpec("left_hand", ChannelKind.ORIENTATION),
)
PUNCH_CHANNELS = (
    ChannelSpec("left_hand", ChannelKind.POSITION),
    ChannelSpec("left_hand", ChannelKind.ORIENTATION),
    ChannelSpec("left_forearm", ChannelKind.ORIENTATION),
    ChannelSpec("chest", ChannelKind.ORIENTATION),
)


@dataclass
class DemoSet:
    """Uniform-layout demonstrations for one task, in one frame."""

    task_label: str
    frame: str
    demos: list
    provenance: str = "recorded"
    demo_labels: list | None = None

    def __post_init__(self):
        if len(self.demos) < 2:
            raise SchemaError("a demo set needs at least 2 demonstrations")
        if self.provenance not in PROVENANCES:
            raise SchemaError(f"unknown provenance {self.provenance!r}")
        layout = tuple(self.demos[0].channels)
        for demo in self.demos[1:]:
            if not demo.same_layout(layout):
                raise SchemaError("demo channel layouts are inconsistent")
        if self.demo_labels is not None and len(self.demo_labels) != len(self.demos):
            raise SchemaError("one label per demo required when labels are given")

    @property
    def channels(self) -> tuple:
        return tuple(self.demos[0].channels)

    def split_by_label(self) -> dict:
        """Per-label demo sets, preserving demo order within each label."""
        if self.demo_labels is None:
            return {self.task_label: self}
        out = {}
        for label in dict.fromkeys(self.demo_labels):
            demos = [d for d, l in zip(self.demos, self.demo_labels) if l == label]
            out[label] = DemoSet(
                task_label=label,
                frame=self.frame,
                demos=demos,
                provenance=self.provenance,
                demo_labels=[label] * len(demos),
            )
        return out


def demoset_to_dict(ds: DemoSet) -> dict:
    demos = []
    for i, demo in enumerate(ds.demos):
        entry = {
            "samples": np.column_stack([demo.timestamps, demo.values]).tolist(),
        }
        if ds.demo_labels is not None:
            entry["label"] = ds.demo_labels[i]
        demos.append(entry)
    return {
        "version": DEMOSET_SCHEMA_VERSION,
        "task_label": ds.task_label,
        "frame": ds.frame,
        "provenance": ds.provenance,
        "channels": [c.to_dict() for c in ds.channels],
        "demos": demos,
    }


def demoset_from_dict(doc: dict, location=None) -> DemoSet:
    try:
        version = doc["version"]
        if version != DEMOSET_SCHEMA_VERSION:
            raise ParseError(f"unsupported demo-set schema version {version}", location)
        channels = tuple(ChannelSpec.from_dict(c) for c in doc["channels"])
        demos = []
        labels = []
        has_labels = False
        for i, entry in enumerate(doc["demos"]):
            samples = np.asarray(entry["samples"], dtype=float)
            if samples.ndim != 2 or samples.shape[1] < 2:
                raise ParseError("demo samples must be rows of [t, values...]",
                                 f"{location}: demos[{i}]")
            demos.append(Trajectory(
                channels=channels,
                timestamps=samples[:, 0],
                values=samples[:, 1:],
                frame=doc["frame"],
            ))
            label = entry.get("label")
            labels.append(label)
            has_labels = has_labels or label is not None
        return DemoSet(
            task_label=doc["task_label"],
            frame=doc["frame"],
            demos=demos,
            provenance=doc["provenance"],
            demo_labels=labels if has_labels else None,
        )
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed demo-set document: {exc}", location) from exc


def save_demoset(ds: DemoSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(demoset_to_dict(ds), fh)


def load_demoset(path) -> DemoSet:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}") from exc
    return demoset_from_dict(doc, location=str(path))


# --- synthetic generators -------------------------------------------------


def _minimum_jerk(s: np.ndarray) -> np.ndarray:
    return 10.0 * s**3 - 15.0 * s**4 + 6.0 * s**5


def _ramp(start: np.ndarray, end: np.ndarray, shape: np.ndarray) -> np.ndarray:
    return start + (end - start) * shape[:, None]


def generate_synthetic(task: str, count: int | None = None, seed: int = 0,
                       approach_angle_range: tuple = (-0.9, 0.9)) -> DemoSet:
    """Deterministic synthetic demonstrations for the two bundled tasks."""
    if task == "door-reach":
        return _generate_door_reach(20 if count is None else count, seed,
                                    approach_angle_range)
    if task == "punch":
        return _generate_punch(27 if count is None else count, seed)
    raise SchemaError(f"unknown synthetic task {task!r} (expected door-reach or punch)")


def _time_grid(rng, lo: float, hi: float):
    duration = float(rng.uniform(lo, hi))
    n = max(2, int(round(duration * SAMPLE_RATE)) + 1)
    ts = np.linspace(0.0, duration, n)
    s = _minimum_jerk(np.linspace(0.0, 1.0, n))
    return ts, s, np.linspace(0.0, 1.0, n)


def _generate_door_reach(count: int, seed: int, angle_range: tuple) -> DemoSet:
    rng = np.random.default_rng(seed)
    demos = []
    for _ in range(count):
        ts, shape, lin = _time_grid(rng, 1.8, 2.6)
        theta = float(rng.uniform(*angle_range))
        radius = float(rng.uniform(0.35, 0.55))
        start = np.array([radius * np.cos(theta), radius * np.sin(theta),
                          float(rng.uniform(-0.10, 0.15))])
        end = rng.normal(0.0, 0.01, size=3)
        positions = _ramp(start, end, shape)
        # lateral bow for natural variation
        bow = float(rng.normal(0.0, 0.02))
        positions[:, 1] += bow * np.sin(np.pi * lin)

        rot_start = np.array([0.0, 0.0, theta]) + rng.normal(0.0, 0.03, size=3)
        rot_end = np.array([0.0, 0.35, 0.0]) + rng.normal(0.0, 0.02, size=3)
        rotations = _ramp(rot_start, rot_end, shape)

        demos.append(Trajectory(
            channels=DOOR_CHANNELS,
            timestamps=ts,
            values=np.hstack([positions, rotations]),
            frame=DOOR_FRAME,
        ))
    return DemoSet(task_label="reach_handle", frame=DOOR_FRAME, demos=demos,
                   provenance="synthetic")


_PUNCH_STYLE = {
    # mid-phase positional bulge direction, final hand/forearm/chest rotvecs
    "jab": {
        "bulge": np.zeros(3),
        "hand": np.array([0.0, 0.2, 0.0]),
        "forearm": np.array([0.0, 0.3, 0.1]),
        "chest": np.array([0.0, 0.0, 0.15]),
    },
    "hook": {
        "bulge": np.array([0.0, 0.28, 0.0]),
        "hand": np.array([1.3, 0.2, 0.0]),
        "forearm": np.array([1.0, 0.1, 0.3]),
        "chest": np.array([0.0, 0.1, 0.35]),
    },
    "uppercut": {
        "bulge": np.array([0.0, 0.0, -0.30]),
        "hand": np.array([-1.3, 0.2, 0.0]),
        "forearm": np.array([-1.0, 0.4, 0.0]),
        "chest": np.array([0.0, -0.15, 0.20]),
    },
}


def _generate_punch(count: int, seed: int) -> DemoSet:
    rng = np.random.default_rng(seed)
    demos = []
    labels = []
    for i in range(count):
        family = PUNCH_FAMILIES[i % len(PUNCH_FAMILIES)]
        style = _PUNCH_STYLE[family]
        ts, shape, lin = _time_grid(rng, 0.9, 1.3)

        start = np.array([-0.45, 0.10, -0.15]) + rng.normal(0.0, 0.02, size=3)
        end = rng.normal(0.0, 0.01, size=3)
        positions = _ramp(start, end, shape)
        bulge = style["bulge"] * float(rng.normal(1.0, 0.07))
        positions += bulge * np.sin(np.pi * lin)[:, None]

        guard = np.array([0.0, 0.0, 0.3])
        parts = [positions]
        for group in ("hand", "forearm", "chest"):
            rot_end = style[group] + rng.normal(0.0, 0.03, size=3)
            rot_start = guard + rng.normal(0.0, 0.03, size=3)
            parts.append(_ramp(rot_start, rot_end, shape))

        demos.append(Trajectory(
            channels=PUNCH_CHANNELS,
            timestamps=ts,
            values=np.hstack(parts),
            frame=PUNCH_FRAME,
        ))
        labels.append(family)
    return DemoSet(task_label="punch", frame=PUNCH_FRAME, demos=demos,
                   provenance="synthetic", demo_labels=labels)
