"""Shared test fixtures and independent oracles.

Oracles here deliberately re-derive results through a different route than
the library (explicit stacked matrices, joint-Gaussian block conditioning,
scalar loops) so they can catch implementation mistakes.
"""

import math

import numpy as np

from teleassist.basis import BasisConfig, eval_basis
from teleassist.trajectory import ChannelKind, ChannelSpec, Trajectory

POSITION = ChannelKind.POSITION
ORIENTATION = ChannelKind.ORIENTATION

HAND_LAYOUT = (ChannelSpec("left_hand", POSITION),)
HAND_POSE_LAYOUT = (
    ChannelSpec("left_hand", POSITION),
    ChannelSpec("left_hand", ORIENTATION),
)


def make_trajectory(timestamps, values, channels=HAND_LAYOUT, frame="object"):
    return Trajectory(channels=channels, timestamps=np.asarray(timestamps, float),
                      values=np.asarray(values, float), frame=frame)


def sample_curve(fn, duration=2.0, n_samples=80, channels=HAND_LAYOUT, frame="object", t0=0.0):
    """Trajectory from a vector function of normalized time s in [0, 1]."""
    ts = t0 + np.linspace(0.0, duration, n_samples)
    ss = np.linspace(0.0, 1.0, n_samples)
    values = np.stack([np.asarray(fn(s), dtype=float) for s in ss])
    return make_trajectory(ts, values, channels=channels, frame=frame)


def reference_basis_value(center, bandwidth, phase, centers):
    """Scalar re-derivation of one normalized RBF activation."""
    num = math.exp(-((phase - center) ** 2) / (2.0 * bandwidth ** 2))
    den = sum(math.exp(-((phase - ck) ** 2) / (2.0 * bandwidth ** 2)) for ck in centers)
    return num / den


def stacked_design(basis: BasisConfig, phases):
    """Full (T*n, n*m) block design assembled row by row from eval_basis."""
    rows = []
    for phase in phases:
        rows.append(eval_basis(basis, phase))
    return np.vstack(rows)


def normal_equations_weights(basis: BasisConfig, phases, values, ridge_lambda):
    """Independent ridge solve on the fully stacked system.

    Stacks all samples into one (T*n,) target and solves the dense normal
    equations in one shot, without exploiting the block structure.
    """
    big_phi = stacked_design(basis, phases)
    target = np.asarray(values, dtype=float).reshape(-1)
    gram = big_phi.T @ big_phi + ridge_lambda * np.eye(basis.size)
    return np.linalg.solve(gram, big_phi.T @ target)


def joint_gaussian_condition(mu, sigma, basis: BasisConfig, observations):
    """Condition on all observation points at once via the full joint Gaussian.

    Builds the explicit joint covariance over (weights, stacked observations)
    and applies generic block conditioning. Serves as the ground truth for
    the sequential single-point updates.
    """
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    a_blocks = []
    y_parts = []
    noise_parts = []
    for obs in observations:
        a_blocks.append(eval_basis(basis, obs.phase).T)  # (n*m, n)
        y_parts.append(np.asarray(obs.value, dtype=float))
        noise_parts.append(np.asarray(obs.noise, dtype=float))
    a = np.hstack(a_blocks)                      # (n*m, K*n)
    y_all = np.concatenate(y_parts)
    noise = np.diag(np.concatenate(noise_parts))

    nw = len(mu)
    no = len(y_all)
    joint_mean = np.concatenate([mu, a.T @ mu])
    joint_cov = np.zeros((nw + no, nw + no))
    joint_cov[:nw, :nw] = sigma
    joint_cov[:nw, nw:] = sigma @ a
    joint_cov[nw:, :nw] = a.T @ sigma
    joint_cov[nw:, nw:] = a.T @ sigma @ a + noise

    cov_ww = joint_cov[:nw, :nw]
    cov_wy = joint_cov[:nw, nw:]
    cov_yy = joint_cov[nw:, nw:]
    solve = np.linalg.solve(cov_yy, (y_all - joint_mean[nw:]))
    mu_post = joint_mean[:nw] + cov_wy @ solve
    sigma_post = cov_ww - cov_wy @ np.linalg.solve(cov_yy, cov_wy.T)
    return mu_post, sigma_post


def random_small_promp(rng, max_size=6):
    """Random valid weight-space Gaussian with n*m <= max_size."""
    from teleassist.promp import ProMP

    m = int(rng.integers(2, max_size + 1))
    n = int(rng.integers(1, max_size // m + 1))
    basis = BasisConfig.default(n=n, m=m, bandwidth=float(rng.uniform(0.3, 1.5)))
    size = n * m
    mu = rng.normal(size=size)
    factor = rng.normal(size=(size, size + 2))
    sigma = factor @ factor.T / (size + 2)
    return ProMP(
        basis=basis,
        mu_w=mu,
        sigma_w=sigma,
        mean_duration=float(rng.uniform(0.5, 3.0)),
        demo_count=int(rng.integers(2, 10)),
        task_label="toy",
        frame="object",
    )


def minimum_jerk(s):
    """Classic quintic ease curve used by the synthetic generators."""
    return 10.0 * s**3 - 15.0 * s**4 + 6.0 * s**5
