"""Object registry: detected objects, their poses, and their task context.

Fiducial-marker detection is out of scope; poses enter through injection
(API, CLI flag, or console) and can be manually overridden. The registry is
a single-writer store; mutation order defines event order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .affordance import AffordanceTemplate, load_template
from .errors import ParseError, UnknownObjectError
from .geometry import Pose
from .promp import load_promp

POSE_SOURCES = ("injected", "manual-override")


@dataclass(frozen=True)
class SceneObject:
    id: str
    object_class: str
    pose: Pose
    pose_source: str
    associated_tasks: tuple
    affordance: AffordanceTemplate | None = None

    def __post_init__(self):
        self.pose.validate_rigid()
        object.__setattr__(self, "associated_tasks", tuple(self.associated_tasks))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "object_class": self.object_class,
            "pose": self.pose.to_dict(),
            "pose_source": self.pose_source,
            "associated_tasks": list(self.associated_tasks),
            "has_affordance": self.affordance is not None,
        }


class TaskRegistry:
    """Maps object classes to their learned primitives and optional template."""

    def __init__(self):
        self._classes: dict = {}

    def register_class(self, object_class: str, promps,
                       affordance: AffordanceTemplate | None = None) -> None:
        self._classes[object_class] = (list(promps), affordance)

    def knows(self, object_class: str) -> bool:
        return object_class in self._classes

    def classes(self) -> list:
        return list(self._classes)

    def tasks_for(self, object_class: str) -> list:
        """Primitives associated with a class, in registration order."""
        if object_class not in self._classes:
            raise UnknownObjectError(f"object class {object_class!r} is not registered")
        return list(self._classes[object_class][0])

    def affordance_for(self, object_class: str) -> AffordanceTemplate | None:
        if object_class not in self._classes:
            raise UnknownObjectError(f"object class {object_class!r} is not registered")
        return self._classes[object_class][1]

    def describe(self) -> dict:
        return {
            cls: {
                "tasks": [p.task_label for p in promps],
                "has_affordance": affordance is not None,
            }
            for cls, (promps, affordance) in self._classes.items()
        }

    @staticmethod
    def from_manifest(path) -> "TaskRegistry":
        """Load a registry manifest mapping classes to primitive/template files."""
        path = Path(path)
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}") from exc
        registry = TaskRegistry()
        try:
            for object_class, entry in doc["objects"].items():
                promps = [load_promp(path.parent / p) for p in entry["promps"]]
                affordance = None
                if entry.get("affordance"):
                    affordance = load_template(path.parent / entry["affordance"])
                registry.register_class(object_class, promps, affordance)
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed manifest: {exc}", str(path)) from exc
        return registry


class SceneRegistry:
    """Live objects in the scene, keyed by id."""

    def __init__(self, tasks: TaskRegistry):
        self.tasks = tasks
        self._objects: dict = {}
        self._counter: dict = {}

    def inject_detection(self, object_class: str, pose: Pose) -> SceneObject:
        if not self.tasks.knows(object_class):
            raise UnknownObjectError(f"object class {object_class!r} is not registered")
        seq = self._counter.get(object_class, 0) + 1
        self._counter[object_class] = seq
        obj = SceneObject(
            id=f"{object_class}-{seq}",
            object_class=object_class,
            pose=pose,
            pose_source="injected",
            associated_tasks=tuple(p.task_label for p in self.tasks.tasks_for(object_class)),
            affordance=self.tasks.affordance_for(object_class),
        )
        self._objects[obj.id] = obj
        return obj

    def get(self, object_id: str) -> SceneObject:
        try:
            return self._objects[object_id]
        except KeyError:
            raise UnknownObjectError(f"no object with id {object_id!r} in the scene")

    def set_pose(self, object_id: str, pose: Pose, source: str = "manual-override") -> SceneObject:
        obj = self.get(object_id)
        updated = replace(obj, pose=pose, pose_source=source)
        self._objects[object_id] = updated
        return updated

    def objects(self) -> list:
        return list(self._objects.values())

    def eligible_objects(self) -> list:
        """Objects that can anchor an assisted session (have tasks)."""
        return [o for o in self._objects.values() if o.associated_tasks]

    def objects_of_class(self, object_class: str) -> list:
        return [o for o in self._objects.values() if o.object_class == object_class]
