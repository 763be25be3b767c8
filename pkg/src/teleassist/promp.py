"""Probabilistic movement primitives: weight-space Gaussians over a phase basis.

A primitive is the pair (mu_w, sigma_w) over stacked basis weights, learned
from demonstrations by per-demo ridge regression followed by maximum
likelihood over the weight samples. Conditioning folds operator observations
into the weight distribution with the standard linear-Gaussian update and is
applied sequentially, one observation point at a time.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .basis import BasisConfig, design_matrix, eval_basis
from .errors import (
    ConditioningJitterWarning,
    CovarianceFloorWarning,
    ParseError,
    SchemaError,
    SingularSystemError,
)
from .trajectory import ChannelSpec, PhaseTrajectory, Trajectory, normalize_phase, stacked_dim

DEFAULT_RIDGE_LAMBDA = 1e-12
DEFAULT_OBSERVATION_NOISE = 1e-6
INNOVATION_JITTER = 1e-10

PROMP_SCHEMA_VERSION = 1


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ObservationPoint:
    """One desired pass-through point: phase, stacked value, per-dim noise."""

    phase: float
    value: np.ndarray
    noise: np.ndarray

    def __post_init__(self):
        value = _freeze(np.atleast_1d(self.value))
        noise = _freeze(np.atleast_1d(self.noise))
        if noise.shape != value.shape:
            raise SchemaError("noise diagonal must match the value vector length")
        if np.any(noise < 0):
            raise SchemaError("observation noise variances must be non-negative")
        if not 0.0 <= self.phase <= 1.0:
            raise SchemaError(f"observation phase {self.phase} outside [0, 1]")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "noise", noise)

    @staticmethod
    def with_default_noise(phase: float, value, noise: float = DEFAULT_OBSERVATION_NOISE):
        value = np.atleast_1d(np.asarray(value, dtype=float))
        return ObservationPoint(phase=phase, value=value, noise=np.full(value.shape, noise))


@dataclass(frozen=True)
class ProMP:
    """Gaussian over basis weights plus duration statistics and provenance."""

    basis: BasisConfig
    mu_w: np.ndarray
    sigma_w: np.ndarray
    mean_duration: float
    demo_count: int
    task_label: str
    frame: str
    channels: tuple | None = None

    def __post_init__(self):
        mu = _freeze(np.atleast_1d(self.mu_w))
        sigma = np.array(self.sigma_w, dtype=float)
        size = self.basis.size
        if mu.shape != (size,):
            raise SchemaError(f"mu_w must have length {size}, got {mu.shape}")
        if sigma.shape != (size, size):
            raise SchemaError(f"sigma_w must be {size}x{size}, got {sigma.shape}")
        asym = float(np.abs(sigma - sigma.T).max(initial=0.0))
        scale = float(np.abs(sigma).max(initial=0.0))
        if asym > 1e-9 * max(scale, 1.0):
            raise SchemaError("sigma_w must be symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        trace = float(np.trace(sigma))
        min_eig = float(np.linalg.eigvalsh(sigma)[0])
        if min_eig < -1e-10 * max(trace, 1.0):
            raise SchemaError(
                f"sigma_w is not PSD (min eigenvalue {min_eig:.3e} for trace {trace:.3e})"
            )
        if self.mean_duration <= 0:
            raise SchemaError("mean_duration must be positive")
        if self.demo_count < 1:
            raise SchemaError("demo_count must be at least 1")
        channels = None if self.channels is None else tuple(self.channels)
        if channels is not None and stacked_dim(channels) != self.basis.n:
            raise SchemaError("channel layout does not match the basis stacked dimension")
        object.__setattr__(self, "mu_w", mu)
        object.__setattr__(self, "sigma_w", _freeze(sigma))
        object.__setattr__(self, "channels", channels)

    @property
    def n_dims(self) -> int:
        return self.basis.n

    def weights_by_dim(self) -> np.ndarray:
        """Mean weights reshaped to (n, m), one row per stacked dimension."""
        return self.mu_w.reshape(self.basis.n, self.basis.m)

    def mean_at(self, phases) -> np.ndarray:
        """Mean value vectors at the given phases, shape (T, n)."""
        design = design_matrix(self.basis, np.atleast_1d(phases))
        return design @ self.weights_by_dim().T

    def std_at(self, phases) -> np.ndarray:
        """Per-dimension standard deviation envelope at the given phases, (T, n)."""
        design = design_matrix(self.basis, np.atleast_1d(phases))
        m = self.basis.m
        out = np.empty((design.shape[0], self.basis.n))
        for d in range(self.basis.n):
            block = self.sigma_w[d * m:(d + 1) * m, d * m:(d + 1) * m]
            out[:, d] = np.einsum("ti,ij,tj->t", design, block, design)
        return np.sqrt(np.maximum(out, 0.0))


def floor_covariance(sigma: np.ndarray, warn: bool = True,
                     reference_trace: float | None = None) -> np.ndarray:
    """Symmetrize and clip negative eigenvalues to zero.

    Numerical drift in the posterior subtraction can push eigenvalues
    slightly negative; flooring restores PSD without touching the rest of
    the spectrum. The warning threshold scales with ``reference_trace``
    (the pre-update trace) because an exactly-observed posterior has a
    near-zero trace of its own.
    """
    sym = 0.5 * (sigma + sigma.T)
    eigvals, eigvecs = np.linalg.eigh(sym)
    floored_mass = float(-eigvals[eigvals < 0].sum())
    scale = float(np.trace(sym)) if reference_trace is None else reference_trace
    if warn and scale > 0 and floored_mass >= 1e-8 * scale:
        warnings.warn(
            f"covariance floor removed {floored_mass:.3e} against scale {scale:.3e}",
            CovarianceFloorWarning,
            stacklevel=2,
        )
    eigvals = np.clip(eigvals, 0.0, None)
    return (eigvecs * eigvals) @ eigvecs.T


def fit_weights(phase_traj: PhaseTrajectory, basis: BasisConfig,
                ridge_lambda: float = DEFAULT_RIDGE_LAMBDA) -> np.ndarray:
    """Ridge-regress one trajectory onto the basis, returning stacked weights.

    Solves ``w = (Phi^T Phi + lambda I)^-1 Phi^T xi`` over all phase samples.
    The block-diagonal design shares one Gram matrix across dimensions.
    """
    if phase_traj.n_dims != basis.n:
        raise SchemaError(
            f"trajectory has {phase_traj.n_dims} dims but basis expects {basis.n}"
        )
    n_samples = len(phase_traj.phases)
    if n_samples < basis.m:
        raise SchemaError(
            f"need at least {basis.m} samples per dimension, got {n_samples}"
        )
    design = design_matrix(basis, phase_traj.phases)
    gram = design.T @ design + ridge_lambda * np.eye(basis.m)
    if ridge_lambda == 0.0 and np.linalg.matrix_rank(design) < basis.m:
        raise SingularSystemError(
            "design matrix is rank-deficient and no ridge factor was given"
        )
    rhs = design.T @ phase_traj.values
    try:
        per_dim = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"normal equations are singular: {exc}") from exc
    return per_dim.T.reshape(-1)


def fit_promp(demos, basis: BasisConfig | None = None,
              task_label: str = "", frame: str = "",
              ridge_lambda: float = DEFAULT_RIDGE_LAMBDA,
              basis_count: int | None = None,
              bandwidth: float | None = None) -> ProMP:
    """Learn a primitive from two or more demonstrations.

    The weight covariance uses the biased 1/D estimator, which makes the fit
    invariant to duplicating the demo list.
    """
    demos = list(demos)
    if len(demos) < 2:
        raise SchemaError("fitting a primitive requires at least 2 demonstrations")
    layout = tuple(demos[0].channels)
    frames = {d.frame for d in demos}
    for d in demos[1:]:
        if not d.same_layout(layout):
            raise SchemaError("demonstrations have inconsistent channel layouts")
    if basis is None:
        kwargs = {}
        if basis_count is not None:
            kwargs["m"] = basis_count
        if bandwidth is not None:
            kwargs["bandwidth"] = bandwidth
        basis = BasisConfig.default(n=stacked_dim(layout), **kwargs)
    if not frame:
        frame = demos[0].frame if len(frames) == 1 else ""

    weights = []
    durations = []
    for demo in demos:
        phase_traj = normalize_phase(demo)
        weights.append(fit_weights(phase_traj, basis, ridge_lambda))
        durations.append(phase_traj.source_duration)
    w = np.stack(weights)
    mu = w.mean(axis=0)
    centered = w - mu
    sigma = centered.T @ centered / len(demos)
    sigma = floor_covariance(sigma, warn=False)
    return ProMP(
        basis=basis,
        mu_w=mu,
        sigma_w=sigma,
        mean_duration=float(np.mean(durations)),
        demo_count=len(demos),
        task_label=task_label,
        frame=frame,
        channels=layout,
    )


def mean_trajectory(promp: ProMP, n_samples: int, duration: float | None = None) -> Trajectory:
    """Sample the mean trajectory uniformly in phase over the given duration."""
    if n_samples < 2:
        raise SchemaError("a trajectory needs at least 2 samples")
    if duration is None:
        duration = promp.mean_duration
    if duration <= 0:
        raise SchemaError("duration must be positive")
    if promp.channels is None:
        raise SchemaError("this primitive carries no channel metadata")
    phases = np.linspace(0.0, 1.0, n_samples)
    return Trajectory(
        channels=promp.channels,
        timestamps=phases * duration,
        values=promp.mean_at(phases),
        frame=promp.frame,
    )


def _condition_single(mu: np.ndarray, sigma: np.ndarray, basis: BasisConfig,
                      obs: ObservationPoint):
    phi = eval_basis(basis, obs.phase).T            # (n*m, n)
    sigma_phi = sigma @ phi                         # (n*m, n)
    innovation_cov = np.diag(obs.noise) + phi.T @ sigma_phi
    try:
        np.linalg.cholesky(innovation_cov + 0.0)
    except np.linalg.LinAlgError:
        innovation_cov = innovation_cov + INNOVATION_JITTER * np.eye(len(obs.noise))
        warnings.warn(
            "singular innovation matrix regularized with jitter",
            ConditioningJitterWarning,
            stacklevel=3,
        )
    gain = np.linalg.solve(innovation_cov, sigma_phi.T).T    # (n*m, n)
    residual = obs.value - phi.T @ mu
    mu_new = mu + gain @ residual
    sigma_new = sigma - gain @ sigma_phi.T
    return mu_new, sigma_new


def condition(promp: ProMP, observations) -> ProMP:
    """Return a new primitive whose weights pass near the observed points.

    Observations are applied sequentially in the given order; for independent
    observation noise this equals joint conditioning on all points at once.
    """
    mu = promp.mu_w.copy()
    sigma = np.array(promp.sigma_w)
    prior_trace = float(np.trace(sigma))
    for obs in observations:
        if obs.value.shape != (promp.basis.n,):
            raise SchemaError(
                f"observation has {obs.value.shape[0]} dims, primitive expects {promp.basis.n}"
            )
        mu, sigma = _condition_single(mu, sigma, promp.basis, obs)
    sigma = floor_covariance(sigma, reference_trace=prior_trace)
    return replace(promp, mu_w=mu, sigma_w=sigma)


# --- persistence ---------------------------------------------------------


def promp_to_dict(promp: ProMP) -> dict:
    return {
        "version": PROMP_SCHEMA_VERSION,
        "task_label": promp.task_label,
        "frame": promp.frame,
        "channels": None if promp.channels is None else [c.to_dict() for c in promp.channels],
        "basis": {
            "m": promp.basis.m,
            "centers": promp.basis.centers.tolist(),
            "bandwidth": promp.basis.bandwidth,
        },
        "mu_w": promp.mu_w.tolist(),
        "sigma_w": promp.sigma_w.reshape(-1).tolist(),
        "mean_duration": promp.mean_duration,
        "demo_count": promp.demo_count,
    }


def promp_from_dict(doc: dict, location=None) -> ProMP:
    try:
        version = doc["version"]
        if version != PROMP_SCHEMA_VERSION:
            raise ParseError(f"unsupported primitive schema version {version}", location)
        mu = np.asarray(doc["mu_w"], dtype=float)
        basis_doc = doc["basis"]
        m = int(basis_doc["m"])
        size = len(mu)
        if size % m != 0:
            raise ParseError(f"mu_w length {size} is not a multiple of m={m}", location)
        basis = BasisConfig(
            m=m,
            centers=np.asarray(basis_doc["centers"], dtype=float),
            bandwidth=float(basis_doc["bandwidth"]),
            n=size // m,
        )
        sigma = np.asarray(doc["sigma_w"], dtype=float).reshape(size, size)
        channels_doc = doc.get("channels")
        channels = None if channels_doc is None else tuple(
            ChannelSpec.from_dict(c) for c in channels_doc
        )
        return ProMP(
            basis=basis,
            mu_w=mu,
            sigma_w=sigma,
            mean_duration=float(doc["mean_duration"]),
            demo_count=int(doc["demo_count"]),
            task_label=doc["task_label"],
            frame=doc["frame"],
            channels=channels,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed primitive document: {exc}", location) from exc


def save_promp(promp: ProMP, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(promp_to_dict(promp), fh, indent=1)


def load_promp(path) -> ProMP:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}") from exc
    return promp_from_dict(doc, location=str(path))
