"""Rigid transforms (position + unit quaternion) and axis-angle helpers.

Poses follow the scalar-last quaternion convention ``(x, y, z, w)`` used by
scipy. On the wire, orientation is always spelled out as
``orientation_xyzw`` to keep the convention explicit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import PoseValidationError

# |norm - 1| beyond this is treated as data corruption rather than drift
QUAT_NORM_TOLERANCE = 1e-6
ROTATION_ORTHONORMALITY_TOLERANCE = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Pose:
    """Rigid transform mapping points from the local frame to the parent frame."""

    position: np.ndarray
    orientation_xyzw: np.ndarray

    def __post_init__(self):
        pos = _freeze(self.position)
        quat = np.array(self.orientation_xyzw, dtype=float)
        if pos.shape != (3,):
            raise PoseValidationError(f"position must have shape (3,), got {pos.shape}")
        if quat.shape != (4,):
            raise PoseValidationError(f"quaternion must have shape (4,), got {quat.shape}")
        if not np.all(np.isfinite(pos)) or not np.all(np.isfinite(quat)):
            raise PoseValidationError("pose entries must be finite")
        norm = float(np.linalg.norm(quat))
        if abs(norm - 1.0) > QUAT_NORM_TOLERANCE:
            raise PoseValidationError(
                f"quaternion norm {norm:.9f} deviates from 1 beyond tolerance {QUAT_NORM_TOLERANCE}"
            )
        quat = _freeze(quat / norm)
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "orientation_xyzw", quat)

    @staticmethod
    def identity() -> "Pose":
        return Pose(np.zeros(3), np.array([0.0, 0.0, 0.0, 1.0]))

    @staticmethod
    def from_rotvec(position, rotvec) -> "Pose":
        quat = Rotation.from_rotvec(np.asarray(rotvec, dtype=float)).as_quat()
        return Pose(np.asarray(position, dtype=float), quat)

    @property
    def rotation(self) -> Rotation:
        return Rotation.from_quat(self.orientation_xyzw)

    @property
    def matrix(self) -> np.ndarray:
        return self.rotation.as_matrix()

    @property
    def rotvec(self) -> np.ndarray:
        return self.rotation.as_rotvec()

    def validate_rigid(self, tolerance: float = ROTATION_ORTHONORMALITY_TOLERANCE) -> None:
        """Check orthonormality and unit determinant of the rotation part."""
        r = self.matrix
        defect = float(np.linalg.norm(r.T @ r - np.eye(3)))
        det = float(np.linalg.det(r))
        if defect > tolerance or abs(det - 1.0) > 1e-9:
            raise PoseValidationError(
                f"rotation is not rigid (orthonormality defect {defect:.2e}, det {det:.9f})"
            )

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform points (…, 3) from the local frame to the parent frame."""
        points = np.asarray(points, dtype=float)
        return points @ self.matrix.T + self.position

    def compose(self, other: "Pose") -> "Pose":
        """Return self ∘ other: first apply ``other``, then ``self``."""
        rot = self.rotation * other.rotation
        pos = self.apply(other.position)
        return Pose(pos, rot.as_quat())

    def inverse(self) -> "Pose":
        inv_rot = self.rotation.inv()
        return Pose(-inv_rot.apply(self.position), inv_rot.as_quat())

    def rotate_rotvec(self, rotvec: np.ndarray) -> np.ndarray:
        """Express a local-frame orientation (axis-angle) in the parent frame."""
        local = Rotation.from_rotvec(np.asarray(rotvec, dtype=float))
        return (self.rotation * local).as_rotvec()

    def angle_to(self, other: "Pose") -> float:
        """Geodesic angle between the two orientations, in radians."""
        rel = self.rotation.inv() * other.rotation
        return float(np.linalg.norm(rel.as_rotvec()))

    def allclose(self, other: "Pose", atol: float = 1e-9) -> bool:
        return bool(
            np.allclose(self.position, other.position, atol=atol)
            and self.angle_to(other) <= atol
        )

    def to_dict(self) -> dict:
        return {
            "position": [float(v) for v in self.position],
            "orientation_xyzw": [float(v) for v in self.orientation_xyzw],
        }

    @staticmethod
    def from_dict(doc: dict) -> "Pose":
        try:
            return Pose(np.asarray(doc["position"], dtype=float),
                        np.asarray(doc["orientation_xyzw"], dtype=float))
        except KeyError as exc:
            raise PoseValidationError(f"pose document missing field {exc}") from exc


def geodesic_angle(rotvec_a: np.ndarray, rotvec_b: np.ndarray) -> float:
    """Angle of the relative rotation between two axis-angle orientations."""
    ra = Rotation.from_rotvec(np.asarray(rotvec_a, dtype=float))
    rb = Rotation.from_rotvec(np.asarray(rotvec_b, dtype=float))
    return float(np.linalg.norm((ra.inv() * rb).as_rotvec()))
