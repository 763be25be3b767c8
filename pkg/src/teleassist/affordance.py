"""Object-centric manipulation templates: waypoint/action sequences per object class.

A template pairs an object class with ordered end-effector actions, each a
sequence of poses expressed in the object frame plus a gripper command.
Registering a template against a detected object pose turns it into a
world-frame action plan.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, SchemaError
from .geometry import Pose
from .trajectory import ChannelKind

AT_SCHEMA_VERSION = 1


class GripperCommand(enum.Enum):
    OPEN = "open"
    CLOSE = "close"
    HOLD = "hold"


@dataclass(frozen=True)
class ATAction:
    """One named end-effector move: waypoints in object frame plus a grip."""

    name: str
    end_effector: str
    waypoints: tuple
    gripper_command: GripperCommand

    def __post_init__(self):
        waypoints = tuple(self.waypoints)
        if not waypoints:
            raise SchemaError(f"action {self.name!r} needs at least one waypoint")
        object.__setattr__(self, "waypoints", waypoints)


@dataclass(frozen=True)
class AffordanceTemplate:
    object_class: str
    actions: tuple
    grasp_point: Pose

    def __post_init__(self):
        actions = tuple(self.actions)
        if not actions:
            raise SchemaError("a template needs at least one action")
        object.__setattr__(self, "actions", actions)

    @property
    def approach_waypoint(self) -> Pose:
        """First waypoint of the first action: where blending hands over."""
        return self.actions[0].waypoints[0]


@dataclass(frozen=True)
class RegisteredPlan:
    """A template transformed into the world frame for one detected object."""

    object_class: str
    object_pose: Pose
    actions: tuple
    grasp_point: Pose

    @property
    def approach_waypoint(self) -> Pose:
        return self.actions[0].waypoints[0]


def register_template(template: AffordanceTemplate, object_pose: Pose) -> RegisteredPlan:
    """Express every waypoint and the grasp point in the world frame."""
    object_pose.validate_rigid()
    actions = tuple(
        ATAction(
            name=a.name,
            end_effector=a.end_effector,
            waypoints=tuple(object_pose.compose(wp) for wp in a.waypoints),
            gripper_command=a.gripper_command,
        )
        for a in template.actions
    )
    return RegisteredPlan(
        object_class=template.object_class,
        object_pose=object_pose,
        actions=actions,
        grasp_point=object_pose.compose(template.grasp_point),
    )


def pose_to_channel_vector(pose: Pose, channels, end_effector: str,
                           fallback: np.ndarray) -> np.ndarray:
    """Stacked value vector holding the pose on the end-effector's channels.

    Channels belonging to other groups keep their ``fallback`` components,
    since a single waypoint pose says nothing about them.
    """
    fallback = np.asarray(fallback, dtype=float)
    out = fallback.copy()
    offset = 0
    covered = 0
    for c in channels:
        if c.name == end_effector:
            if c.kind is ChannelKind.POSITION:
                out[offset:offset + 3] = pose.position
            else:
                out[offset:offset + 3] = pose.rotvec
            covered += 1
        offset += c.dim
    if covered == 0:
        raise SchemaError(f"no channel group named {end_effector!r} in the layout")
    return out


def covered_mask(channels, end_effector: str) -> np.ndarray:
    """Boolean mask of stacked dims belonging to the end-effector group."""
    parts = [np.full(c.dim, c.name == end_effector) for c in channels]
    return np.concatenate(parts)


# --- persistence ----------------------------------------------------------


def template_to_dict(template: AffordanceTemplate) -> dict:
    return {
        "version": AT_SCHEMA_VERSION,
        "object_class": template.object_class,
        "units": {"position": "m", "orientation": "axis-angle rad"},
        "frame": "object",
        "grasp_point": template.grasp_point.to_dict(),
        "actions": [
            {
                "name": a.name,
                "end_effector": a.end_effector,
                "gripper_command": a.gripper_command.value,
                "waypoints": [wp.to_dict() for wp in a.waypoints],
            }
            for a in template.actions
        ],
    }


def template_from_dict(doc: dict, location=None) -> AffordanceTemplate | None:
    """Decode a template document; a null template decodes to None."""
    try:
        version = doc["version"]
        if version != AT_SCHEMA_VERSION:
            raise ParseError(f"unsupported template schema version {version}", location)
        if doc.get("null", False):
            return None
        actions = tuple(
            ATAction(
                name=a["name"],
                end_effector=a["end_effector"],
                waypoints=tuple(Pose.from_dict(w) for w in a["waypoints"]),
                gripper_command=GripperCommand(a["gripper_command"]),
            )
            for a in doc["actions"]
        )
        return AffordanceTemplate(
            object_class=doc["object_class"],
            actions=actions,
            grasp_point=Pose.from_dict(doc["grasp_point"]),
        )
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed template document: {exc}", location) from exc


def null_template_dict(object_class: str) -> dict:
    return {"version": AT_SCHEMA_VERSION, "object_class": object_class, "null": True}


def save_template(template: AffordanceTemplate | None, path,
                  object_class: str | None = None) -> None:
    if template is None:
        if object_class is None:
            raise SchemaError("a null template still needs an object class")
        doc = null_template_dict(object_class)
    else:
        doc = template_to_dict(template)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)


def load_template(path) -> AffordanceTemplate | None:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}") from exc
    return template_from_dict(doc, location=str(path))
