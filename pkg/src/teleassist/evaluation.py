"""RMS evaluation of adapted primitives against held-out trajectories.

For each test trajectory: recognize the primitive from the initial portion,
condition it on that prefix, then compare the adapted mean against the full
test, sample by sample. Per-sample errors aggregate into one RMS per
channel group (positions reported in centimeters, orientations in
radians), and the report carries mean and standard deviation over tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientObservationError, SchemaError
from .promp import DEFAULT_OBSERVATION_NOISE, ObservationPoint, condition
from .recognition import prefix_buffer, recognize
from .trajectory import ChannelKind, Trajectory, channel_slices


@dataclass(frozen=True)
class RmsRow:
    group: str
    kind: str
    unit: str
    rms_mean: float
    rms_sd: float

    def __post_init__(self):
        if self.rms_mean < 0 or self.rms_sd < 0:
            raise SchemaError("RMS statistics must be non-negative")


@dataclass(frozen=True)
class RmsReport:
    rows: tuple                 # adapted primitive vs test, one row per group
    prior_rows: tuple           # unadapted mean vs test, for comparison
    test_count: int
    excluded: int
    window_fraction: float
    per_test: tuple             # per-test overall diagnostics

    def __post_init__(self):
        if self.test_count < 1:
            raise SchemaError("a report needs at least one evaluated test")

    def to_dict(self) -> dict:
        return {
            "window_fraction": self.window_fraction,
            "test_count": self.test_count,
            "excluded": self.excluded,
            "adapted": [vars(r) for r in self.rows],
            "prior": [vars(r) for r in self.prior_rows],
            "per_test": list(self.per_test),
        }

    def format_text(self) -> str:
        lines = [
            f"RMS error adapted primitive vs test — mean (SD) over {self.test_count} tests",
            "-" * 64,
        ]
        for row in self.rows:
            label = f"{row.group} {row.kind} [{row.unit}]"
            lines.append(f"{label:<42s} {row.rms_mean:.2f} ({row.rms_sd:.2f})")
        lines.append("")
        lines.append("unadapted prior mean vs test, same tests")
        lines.append("-" * 64)
        for row in self.prior_rows:
            label = f"{row.group} {row.kind} [{row.unit}]"
            lines.append(f"{label:<42s} {row.rms_mean:.2f} ({row.rms_sd:.2f})")
        if self.excluded:
            lines.append("")
            lines.append(f"excluded (prefix too short): {self.excluded}")
        return "\n".join(lines)


def _group_rms(errors: np.ndarray, channels) -> dict:
    """Per-(group, kind) RMS of per-sample Euclidean errors."""
    out = {}
    for (name, kind), sl in channel_slices(channels).items():
        norms_sq = np.sum(errors[:, sl] ** 2, axis=1)
        out[(name, kind)] = float(np.sqrt(norms_sq.mean()))
    return out


def evaluate_one(candidates, test: Trajectory, window_fraction: float,
                 observation_noise: float = DEFAULT_OBSERVATION_NOISE):
    """Recognize, condition on the prefix, and score one test trajectory.

    Returns (adapted_rms, prior_rms, diagnostics) keyed per channel group.
    Observation phases map through the test's own duration, which keeps the
    comparison phase-aligned in this offline setting; the live session maps
    through the recognized primitive's mean duration instead.
    """
    duration = test.duration
    shortest = min(c.mean_duration for c in candidates)
    span = window_fraction * max(duration, shortest)
    if span > duration + 1e-12:
        raise InsufficientObservationError(
            "test too short for the recognition window", duration / span
        )
    buf = prefix_buffer(test, span)
    rec = recognize(buf, candidates, window_fraction=window_fraction)
    promp = candidates[rec.task_index]

    t0 = test.timestamps[0]
    prefix_phases = (np.array(buf.timestamps) - t0) / duration
    observations = []
    last = -1.0
    for phase, value in zip(np.clip(prefix_phases, 0.0, 1.0), buf.values):
        if phase <= last:
            continue
        observations.append(ObservationPoint.with_default_noise(
            float(phase), value, noise=observation_noise
        ))
        last = phase
    adapted = condition(promp, observations)

    phases = np.clip((test.timestamps - t0) / duration, 0.0, 1.0)
    adapted_errors = adapted.mean_at(phases) - test.values
    prior_errors = promp.mean_at(phases) - test.values

    n_prefix = len(buf.timestamps)
    diagnostics = {
        "recognized": rec.task_label,
        "overall_adapted": float(np.sqrt(np.mean(adapted_errors ** 2))),
        "overall_prior": float(np.sqrt(np.mean(prior_errors ** 2))),
        "prefix_adapted": float(np.sqrt(np.mean(adapted_errors[:n_prefix] ** 2))),
        "prefix_prior": float(np.sqrt(np.mean(prior_errors[:n_prefix] ** 2))),
    }
    return (
        _group_rms(adapted_errors, test.channels),
        _group_rms(prior_errors, test.channels),
        diagnostics,
    )


def _to_rows(per_test_groups, channels) -> tuple:
    rows = []
    for spec in channels:
        key = (spec.name, spec.kind)
        values = np.array([groups[key] for groups in per_test_groups])
        scale = 100.0 if spec.kind is ChannelKind.POSITION else 1.0
        unit = "cm" if spec.kind is ChannelKind.POSITION else "rad"
        sd = float(values.std(ddof=1)) if len(values) > 1 else 0.0
        rows.append(RmsRow(
            group=spec.name,
            kind="position" if spec.kind is ChannelKind.POSITION else "orientation",
            unit=unit,
            rms_mean=float(values.mean()) * scale,
            rms_sd=sd * scale,
        ))
    return tuple(rows)


def eval_rms(candidates, tests, window_fraction: float = 1.0 / 3.0,
             observation_noise: float = DEFAULT_OBSERVATION_NOISE) -> RmsReport:
    """Run the full evaluation over many tests; short tests are excluded and counted."""
    candidates = list(candidates)
    tests = list(tests)
    if not tests:
        raise SchemaError("at least one test trajectory is required")
    layout = tuple(candidates[0].channels or ())
    adapted_all = []
    prior_all = []
    diagnostics = []
    excluded = 0
    for test in tests:
        if tuple(test.channels) != layout:
            raise SchemaError("test channel layout does not match the candidates")
        try:
            adapted, prior, diag = evaluate_one(
                candidates, test, window_fraction, observation_noise
            )
        except InsufficientObservationError:
            excluded += 1
            continue
        adapted_all.append(adapted)
        prior_all.append(prior)
        diagnostics.append(diag)
    if not adapted_all:
        raise InsufficientObservationError("every test was too short to evaluate", 0.0)
    return RmsReport(
        rows=_to_rows(adapted_all, layout),
        prior_rows=_to_rows(prior_all, layout),
        test_count=len(adapted_all),
        excluded=excluded,
        window_fraction=window_fraction,
        per_test=tuple(diagnostics),
    )
