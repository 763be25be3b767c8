"""Sigmoid hand-over from primitive-generated motion to affordance waypoints.

The blending coefficient is a logistic in the blend-window fraction,
renormalized affinely so the endpoints are exactly 0 and 1. Its parameters
are solved so the coefficient crosses a target value (default 0.85) at 70%
of the window, which hands authority to the affordance early and discards
imprecision near the end of the demonstrated motions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConstraintError, SchemaError
from .trajectory import Trajectory

DEFAULT_ALPHA_TARGET = 0.85
CROSSING_POINT = 0.7
# raw logistic endpoint slack; keeps sigma(0) <= 1e-3 and sigma(1) >= 1 - 1e-3
_ENDPOINT_LOGIT = math.log(999.0) * 1.15


def _raw_logistic(x, a: float, b: float, c: float):
    return 1.0 / (1.0 + a * np.exp(-b * (np.asarray(x, dtype=float) - c)))


@dataclass(frozen=True)
class BlendProfile:
    """Solved sigmoid parameters plus the number of blend samples."""

    a: float
    b: float
    c: float
    n_blend: int

    def alpha(self, x):
        """Blending coefficient on [0, 1]; exactly 0 at 0 and 1 at 1."""
        s0 = _raw_logistic(0.0, self.a, self.b, self.c)
        s1 = _raw_logistic(1.0, self.a, self.b, self.c)
        return (_raw_logistic(x, self.a, self.b, self.c) - s0) / (s1 - s0)

    def raw(self, x):
        return _raw_logistic(x, self.a, self.b, self.c)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "n_blend": self.n_blend}


def solve_blend_profile(alpha_target: float = DEFAULT_ALPHA_TARGET,
                        n_blend: int = 2) -> BlendProfile:
    """Pick sigmoid parameters meeting the endpoint and crossing constraints.

    Closed form chooses the center c so the raw logistic is already within
    1e-3 of 0 and 1 at the window endpoints, then the steepness b is
    polished so the renormalized coefficient hits ``alpha_target`` at 0.7
    exactly.
    """
    if not 0.8 < alpha_target < 0.9:
        raise ConstraintError(
            f"crossing target {alpha_target} outside the admissible interval (0.8, 0.9)"
        )
    if n_blend < 2:
        raise ConstraintError("a blend window needs at least 2 samples")
    beta = math.log(alpha_target / (1.0 - alpha_target))
    big = _ENDPOINT_LOGIT
    c = max(
        CROSSING_POINT * big / (beta + big),
        (CROSSING_POINT * big - beta) / (big - beta),
    )
    b0 = beta / (CROSSING_POINT - c)

    def crossing_gap(b):
        profile = BlendProfile(a=1.0, b=b, c=c, n_blend=n_blend)
        return float(profile.alpha(CROSSING_POINT)) - alpha_target

    lo, hi = 0.5 * b0, 2.0 * b0
    for _ in range(20):
        if crossing_gap(lo) * crossing_gap(hi) <= 0:
            break
        lo *= 0.5
        hi *= 1.5
    else:
        raise ConstraintError("could not bracket the blend steepness")
    b = float(brentq(crossing_gap, lo, hi, xtol=1e-13))
    return BlendProfile(a=1.0, b=b, c=c, n_blend=n_blend)


def blend(tail: Trajectory, target: np.ndarray, profile: BlendProfile) -> Trajectory:
    """Convex per-sample mix of the trajectory tail toward one target vector.

    Sample i uses alpha(i / (N_b - 1)): the first blended sample equals the
    incoming trajectory, the last equals the target. Orientation components
    mix on their axis-angle coordinates; any renormalization is the
    follower's concern.
    """
    target = np.asarray(target, dtype=float)
    if target.shape != (tail.n_dims,):
        raise SchemaError(
            f"blend target has shape {target.shape}, trajectory carries {tail.n_dims} dims"
        )
    if tail.n_samples != profile.n_blend:
        raise SchemaError(
            f"blend window expects {profile.n_blend} samples, tail has {tail.n_samples}"
        )
    x = np.arange(tail.n_samples) / (tail.n_samples - 1)
    alpha = np.asarray(profile.alpha(x))[:, None]
    mixed = (1.0 - alpha) * tail.values + alpha * target
    return Trajectory(
        channels=tail.channels,
        timestamps=tail.timestamps,
        values=mixed,
        frame=tail.frame,
    )
