"""Euler integration of the coupled (X, theta) diffusion and its fixed-scale limit.

The coupled dynamics are

    dX     = (theta^2 / 2) * (psi'/psi)(X) dt + theta dW
    dtheta = theta * (p - theta/sqrt(2*pi) * |psi'|/psi (X)) dt

with no Brownian term on theta (the diffusion matrix has a zero row).  The
fixed-scale variant freezes theta at theta0, which for the normal target is
an Ornstein-Uhlenbeck process with stationary variance 1 for every theta.

For the exponential target the positive half-line is preserved by
reflecting X across zero after each step (the default) or by holding the
previous position when a step would exit the support.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .seeding import stream_rng
from .targets import TargetModel

SQRT_2PI = math.sqrt(2.0 * math.pi)
THETA_FLOOR = 1e-12
BOUNDARY_MODES = ("reflect", "hold")


class SdeState(NamedTuple):
    x: float
    theta: float


@dataclass(frozen=True)
class EulerConfig:
    """Mesh, horizon and drift parameters for an Euler run."""

    h: float
    horizon_t: float
    p: float
    theta0: float
    x0: float = 0.0
    n_paths: int = 1
    seed: int = 0
    adaptive: bool = True
    boundary_mode: str = "reflect"

    def __post_init__(self):
        if self.h <= 0.0:
            raise ValueError("mesh size h must be positive")
        if self.horizon_t <= 0.0:
            raise ValueError("horizon_t must be positive")
        if self.p <= 0.0:
            raise ValueError("drift benchmark p must be positive")
        if self.theta0 <= 0.0:
            raise ValueError("theta0 must be positive")
        if self.n_paths < 1:
            raise ValueError("n_paths must be at least 1")
        if self.boundary_mode not in BOUNDARY_MODES:
            raise ValueError(f"boundary_mode must be one of {BOUNDARY_MODES}")

    @property
    def n_steps(self) -> int:
        return math.ceil(self.horizon_t / self.h)


@dataclass
class EnsembleResult:
    """Terminal values of an ensemble of independent Euler paths."""

    x_t: np.ndarray
    theta_t_all: np.ndarray
    theta_floor_hits: int

    @property
    def theta_t_mean(self) -> float:
        return float(self.theta_t_all.mean())


def drift(target: TargetModel, state: SdeState, p: float):
    """Drift components (b_x, b_theta) of the coupled dynamics at a state."""
    s = target.score(state.x)
    theta = state.theta
    b_x = 0.5 * theta * theta * s
    b_theta = theta * (p - theta * np.abs(s) / SQRT_2PI)
    return b_x, b_theta


def euler_step(target: TargetModel, state: SdeState, config: EulerConfig, z) -> SdeState:
    """One Euler update; `state` fields and `z` may be scalars or arrays.

    The theta update is noiseless.  If it lands at or below zero it is
    clamped to THETA_FLOOR; the true dynamics keep theta positive, so a
    clamp means the mesh is too coarse for the chosen p.
    """
    h = config.h
    sqrt_h = math.sqrt(h)
    s = target.score(state.x)
    if config.adaptive:
        theta = state.theta
        x_new = state.x + h * 0.5 * theta * theta * s + sqrt_h * theta * z
        theta_raw = theta + h * theta * (config.p - theta * np.abs(s) / SQRT_2PI)
        theta_new = np.where(theta_raw <= 0.0, THETA_FLOOR, theta_raw)
    else:
        theta0 = config.theta0
        x_new = state.x + h * 0.5 * theta0 * theta0 * s + sqrt_h * theta0 * z
        theta_new = state.theta

    if target.boundary_policy == "reflect_at_zero":
        if config.boundary_mode == "reflect":
            x_new = np.abs(x_new)
        else:
            x_new = np.where(x_new >= 0.0, x_new, state.x)

    if np.ndim(x_new) == 0:
        return SdeState(float(x_new), float(theta_new))
    return SdeState(np.asarray(x_new, float), np.asarray(theta_new, float))


def run_ensemble(target: TargetModel, config: EulerConfig) -> EnsembleResult:
    """Integrate n_paths independent paths to the horizon.

    Path k draws its Gaussian increments from the stream (seed, k), so the
    result is identical however the paths are scheduled.
    """
    n_steps = config.n_steps
    n_paths = config.n_paths
    z = np.empty((n_paths, n_steps))
    for k in range(n_paths):
        z[k] = stream_rng(config.seed, k).standard_normal(n_steps)

    state = SdeState(np.full(n_paths, config.x0), np.full(n_paths, config.theta0))
    floor_hits = 0
    for i in range(n_steps):
        state = euler_step(target, state, config, z[:, i])
        if config.adaptive:
            floor_hits += int(np.count_nonzero(state.theta == THETA_FLOOR))
    return EnsembleResult(
        x_t=np.asarray(state.x, float),
        theta_t_all=np.asarray(state.theta, float),
        theta_floor_hits=floor_hits,
    )
