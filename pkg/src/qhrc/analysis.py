"""Executable convergence diagnostics for the collision dynamics.

Turns the two defining properties of a usable reservoir into measurable
reports: contractivity (the distance to the canonical state never grows
along a trajectory) and asymptotic stability (trajectories from different
initial states merge under an identical coupling schedule, i.e. the echo
state property).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .homogenizer import HomogenizerConfig, average_state, run_homogenization
from .states import l2_distance, validate_density_matrix

CONTRACTION_TOL = 1e-12
DEFAULT_WASHOUT_EPSILON = 1e-3


@dataclass
class ContractionReport:
    """Distance sequence d_k = ||xi0 - rho_k||_2 along one trajectory."""

    d_sequence: np.ndarray
    monotone: bool
    max_violation: float
    final_distance: float


@dataclass
class StabilityReport:
    """Pairwise distance of two trajectories under a shared schedule.

    ``washout_step`` is the first step with distance below ``epsilon``,
    or None when never reached.
    """

    pairwise_distance: np.ndarray
    washout_step: int | None
    epsilon: float


def check_contractivity(rho0: np.ndarray, config: HomogenizerConfig,
                        *, tol: float = CONTRACTION_TOL) -> ContractionReport:
    """Run one homogenization and report whether d_k <= d_{k-1} + tol held throughout."""
    trajectory = run_homogenization(rho0, config)
    d = trajectory.distances
    increments = np.diff(d)
    max_violation = float(max(np.max(increments, initial=0.0), 0.0))
    return ContractionReport(
        d_sequence=d,
        monotone=bool(max_violation <= tol),
        max_violation=max_violation,
        final_distance=float(d[-1]))


def check_stability(rho_a: np.ndarray, rho_b: np.ndarray, config: HomogenizerConfig,
                    epsilon: float = DEFAULT_WASHOUT_EPSILON) -> StabilityReport:
    """Evolve two initial states under the same schedule and track their distance.

    Both runs share ``config`` (and hence the same deterministic coupling
    draws), so a schedule mismatch between the runs cannot occur by
    construction.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    rho_a = validate_density_matrix(rho_a, name="rho_a")
    rho_b = validate_density_matrix(rho_b, name="rho_b")
    traj_a = run_homogenization(rho_a, config)
    traj_b = run_homogenization(rho_b, config)
    pairwise = np.array([l2_distance(a, b) for a, b in
                         zip(traj_a.input_states, traj_b.input_states)])
    below = np.flatnonzero(pairwise < epsilon)
    washout = int(below[0]) if below.size else None
    return StabilityReport(pairwise_distance=pairwise, washout_step=washout,
                           epsilon=epsilon)


def convergence_curve(rho0: np.ndarray, config: HomogenizerConfig) -> np.ndarray:
    """Per-step fidelity of the evolving input state against the canonical state."""
    return run_homogenization(rho0, config).fidelities


def average_state_convergence(rho0: np.ndarray, config: HomogenizerConfig,
                              n_max: int = None) -> np.ndarray:
    """Distance of the running trajectory average to the canonical state.

    Entry N-1 is ||mean(rho_0 .. rho_N) - xi||_2, computed from prefixes of a
    single trajectory with ``n_max`` collisions (defaults to the configured
    reservoir size).
    """
    if n_max is None:
        n_max = config.n_reservoir
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if n_max > config.n_reservoir:
        raise ValueError(f"n_max={n_max} exceeds configured reservoir size {config.n_reservoir}")
    trajectory = run_homogenization(rho0, config)
    return np.array([
        l2_distance(average_state(trajectory.input_states[: n + 1]), config.xi)
        for n in range(1, n_max + 1)])
