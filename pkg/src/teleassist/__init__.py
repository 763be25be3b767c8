"""Assistive teleoperation toolkit.

Learns movement primitives from demonstrations, recognizes which primitive a
partially observed operator motion belongs to, adapts the primitive to the
operator's input and the detected object pose, blends the result into
object-centric manipulation waypoints, and drives the whole loop through an
operator-paced session served over a streaming command/event API.
"""

from .basis import BasisConfig, eval_basis
from .blending import BlendProfile, blend, solve_blend_profile
from .errors import AssistanceError
from .geometry import Pose
from .promp import (
    ObservationPoint,
    ProMP,
    condition,
    fit_promp,
    fit_weights,
    load_promp,
    mean_trajectory,
    save_promp,
)
from .recognition import ObservationBuffer, RecognitionResult, detect_motion_onset, recognize
from .trajectory import ChannelKind, ChannelSpec, PhaseTrajectory, Trajectory, normalize_phase

__all__ = [
    "AssistanceError",
    "BasisConfig",
    "BlendProfile",
    "ChannelKind",
    "ChannelSpec",
    "ObservationBuffer",
    "ObservationPoint",
    "PhaseTrajectory",
    "Pose",
    "ProMP",
    "RecognitionResult",
    "Trajectory",
    "blend",
    "condition",
    "detect_motion_onset",
    "eval_basis",
    "fit_promp",
    "fit_weights",
    "load_promp",
    "mean_trajectory",
    "normalize_phase",
    "recognize",
    "save_promp",
    "solve_blend_profile",
]

__version__ = "0.1.0"
