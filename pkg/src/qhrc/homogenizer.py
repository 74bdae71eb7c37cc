"""Partial-SWAP collision dynamics.

A register of identically prepared reservoir qubits drives an injected qubit
toward the reservoir state through repeated two-qubit partial-SWAP collisions
U(theta) = cos(theta) I + i sin(theta) SWAP.  Two evolution modes are
provided: ``exact-joint`` keeps the full (N+1)-qubit density matrix and all
correlations, ``mean-field`` propagates only single-qubit marginals through
the closed-form collision channel.  For a single pass over fresh reservoir
qubits the recorded marginals of both modes coincide exactly, which the test
suite uses as a cross-check of the joint embedding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .states import (
    InvalidStateError,
    is_power_of_two,
    kron,
    l2_distance,
    fidelity,
    partial_trace,
    qubit_marginal,
    validate_density_matrix,
)

DEFAULT_THETA_RANGE = (np.pi / 8, 3 * np.pi / 8)
DEFAULT_MAX_JOINT_QUBITS = 12


def swap_operator() -> np.ndarray:
    """Two-qubit SWAP: exchanges |01> and |10>; involutive and Hermitian."""
    return np.array(
        [[1, 0, 0, 0],
         [0, 0, 1, 0],
         [0, 1, 0, 0],
         [0, 0, 0, 1]], dtype=complex)


def partial_swap_unitary(theta: float) -> np.ndarray:
    """U(theta) = cos(theta) I4 + i sin(theta) SWAP.

    Because SWAP squares to the identity this is the exact exponential of the
    SWAP generator: the identity at theta = 0 and SWAP (up to global phase i)
    at theta = pi/2.
    """
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    return np.cos(theta) * np.eye(4, dtype=complex) + 1j * np.sin(theta) * swap_operator()


def collision_channel_closed_form(rho: np.ndarray, xi: np.ndarray, theta: float):
    """Closed-form marginals of one collision between qubit states rho and xi.

    Returns ``(rho_out, xi_out)`` with

        rho_out = cos^2 rho + sin^2 xi - i sin cos [rho, xi]
        xi_out  = cos^2 xi + sin^2 rho - i sin cos [xi, rho]

    equal to the partial traces of U (rho ox xi) U^dag.  Both outputs are
    validated; a violation indicates an implementation bug and raises.
    """
    rho = validate_density_matrix(rho, name="rho")
    xi = validate_density_matrix(xi, name="xi")
    if rho.shape != (2, 2) or xi.shape != (2, 2):
        raise ValueError("closed-form channel is defined for single-qubit states")
    c, s = np.cos(theta), np.sin(theta)
    comm = rho @ xi - xi @ rho
    rho_out = c * c * rho + s * s * xi - 1j * s * c * comm
    xi_out = c * c * xi + s * s * rho + 1j * s * c * comm
    validate_density_matrix(rho_out, name="rho_out")
    validate_density_matrix(xi_out, name="xi_out")
    return rho_out, xi_out


def apply_two_qubit_unitary(u4: np.ndarray, rho: np.ndarray, n_qubits: int,
                            wire_a: int, wire_b: int) -> np.ndarray:
    """Conjugate an n-qubit density matrix by a two-qubit unitary on (wire_a, wire_b).

    ``u4`` acts on the ordered pair basis |x_a x_b>.  Implemented by tensor
    reshaping, so the cost is O(16 d^2) rather than a dense d^3 product.
    """
    dim = 1 << n_qubits
    if rho.shape != (dim, dim):
        raise ValueError(f"state of shape {rho.shape} is not {n_qubits} qubits")
    if wire_a == wire_b or not (0 <= wire_a < n_qubits) or not (0 <= wire_b < n_qubits):
        raise ValueError(f"bad wire pair ({wire_a}, {wire_b}) for {n_qubits} qubits")
    tensor = rho.reshape((2,) * (2 * n_qubits))
    ket = (wire_a, wire_b)
    bra = (wire_a + n_qubits, wire_b + n_qubits)
    tensor = np.moveaxis(tensor, ket + bra, (0, 1, 2, 3))
    rest = tensor.shape[4:]
    m = dim * dim // 16
    work = tensor.reshape(4, 4, m)
    work = np.einsum("ip,pqm->iqm", u4, work)
    work = np.einsum("iqm,jq->ijm", work, u4.conj())
    tensor = work.reshape((2, 2, 2, 2) + rest)
    tensor = np.moveaxis(tensor, (0, 1, 2, 3), ket + bra)
    return tensor.reshape(dim, dim)


def collide_joint(joint: np.ndarray, input_wire: int, reservoir_wire: int,
                  theta: float, *, max_joint_qubits: int = DEFAULT_MAX_JOINT_QUBITS) -> np.ndarray:
    """One partial-SWAP collision embedded in a joint register state.

    Applies U(theta) on (input_wire, reservoir_wire) tensored with identity on
    the remaining wires.  Trace is preserved; dimension is capped at
    ``max_joint_qubits`` total qubits (a 12-qubit joint state is already a
    256 MB dense matrix).
    """
    joint = np.asarray(joint, dtype=complex)
    dim = joint.shape[0]
    if joint.ndim != 2 or joint.shape[0] != joint.shape[1] or not is_power_of_two(dim):
        raise ValueError(f"joint state must be square with power-of-two dim, got {joint.shape}")
    n_qubits = dim.bit_length() - 1
    if n_qubits > max_joint_qubits:
        raise ValueError(f"{n_qubits} qubits exceeds max_joint_qubits={max_joint_qubits}")
    return apply_two_qubit_unitary(partial_swap_unitary(theta), joint,
                                   n_qubits, input_wire, reservoir_wire)


@dataclass(frozen=True)
class CouplingSchedule:
    """Per-collision effective coupling angles theta_k.

    ``fixed`` mode always returns ``theta_fixed``; ``uniform`` mode draws
    theta_k uniformly from ``theta_range``, deterministically in (seed, k).
    """

    mode: str = "fixed"
    theta_fixed: float = np.pi / 4
    theta_range: tuple = DEFAULT_THETA_RANGE
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("fixed", "uniform"):
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        if self.mode == "fixed" and not np.isfinite(self.theta_fixed):
            raise ValueError("theta_fixed must be finite")
        if self.mode == "uniform":
            lo, hi = self.theta_range
            if not (0 <= lo <= hi):
                raise ValueError(f"theta_range must satisfy 0 <= lo <= hi, got {self.theta_range}")
            if self.seed < 0:
                raise ValueError("seed must be non-negative")

    @classmethod
    def fixed(cls, theta: float) -> "CouplingSchedule":
        return cls(mode="fixed", theta_fixed=theta)

    @classmethod
    def uniform(cls, lo: float, hi: float, seed: int) -> "CouplingSchedule":
        return cls(mode="uniform", theta_range=(lo, hi), seed=seed)

    def sample(self, k: int) -> float:
        """Coupling angle for collision index k (deterministic in (seed, k))."""
        if self.mode == "fixed":
            return float(self.theta_fixed)
        lo, hi = self.theta_range
        return float(np.random.default_rng([self.seed, k]).uniform(lo, hi))

    def thetas(self, count: int, start: int = 1) -> np.ndarray:
        return np.array([self.sample(k) for k in range(start, start + count)])


@dataclass(frozen=True)
class HomogenizerConfig:
    """Static description of one homogenization run."""

    n_reservoir: int
    xi: np.ndarray
    schedule: CouplingSchedule
    mode: str = "mean-field"
    max_joint_qubits: int = DEFAULT_MAX_JOINT_QUBITS

    def __post_init__(self):
        if self.n_reservoir < 1:
            raise ValueError("n_reservoir must be >= 1")
        if self.mode not in ("mean-field", "exact-joint"):
            raise ValueError(f"unknown mode {self.mode!r}")
        xi = validate_density_matrix(self.xi, name="xi")
        if xi.shape != (2, 2):
            raise ValueError("xi must be a single-qubit state")
        object.__setattr__(self, "xi", xi)
        if self.mode == "exact-joint" and self.n_reservoir + 1 > self.max_joint_qubits:
            raise ValueError(
                f"exact-joint with N={self.n_reservoir} needs {self.n_reservoir + 1} qubits "
                f"> max_joint_qubits={self.max_joint_qubits}")


@dataclass
class Trajectory:
    """Per-collision record of a homogenization run (index k = 0 .. N).

    ``input_states[k]`` is the injected qubit's marginal after k collisions,
    ``reservoir_states[k]`` the marginal of the k-th reservoir qubit after its
    collision (entry 0 is the untouched canonical state), ``thetas[k]`` the
    coupling used at step k (NaN at k = 0), and ``distances``/``fidelities``
    are taken against the initial canonical state.
    """

    input_states: list = field(default_factory=list)
    reservoir_states: list = field(default_factory=list)
    thetas: np.ndarray = None
    distances: np.ndarray = None
    fidelities: np.ndarray = None

    def __len__(self):
        return len(self.input_states)

    @property
    def final_state(self) -> np.ndarray:
        return self.input_states[-1]


def run_homogenization(rho0: np.ndarray, config: HomogenizerConfig) -> Trajectory:
    """Collide ``rho0`` once with each of the N reservoir qubits in order.

    Collisions use theta_k = schedule.sample(k) for k = 1..N.  In
    ``exact-joint`` mode the full (N+1)-qubit state is maintained so reservoir
    correlations are kept; in ``mean-field`` mode each collision applies the
    closed-form channel to the current input marginal and a fresh copy of xi.
    Recorded distances d_k = ||xi0 - rho_k||_2 and fidelities f_k are measured
    against the initial canonical state.
    """
    rho0 = validate_density_matrix(rho0, name="rho0")
    if rho0.shape != (2, 2):
        raise ValueError("rho0 must be a single-qubit state")
    xi0 = config.xi
    n = config.n_reservoir
    thetas = np.full(n + 1, np.nan)
    input_states = [rho0]
    reservoir_states = [xi0]

    if config.mode == "exact-joint":
        joint = kron(rho0, *([xi0] * n))
        for k in range(1, n + 1):
            theta = config.schedule.sample(k)
            thetas[k] = theta
            joint = collide_joint(joint, 0, k, theta,
                                  max_joint_qubits=config.max_joint_qubits)
            rho_k = qubit_marginal(joint, n + 1, 0)
            xi_k = qubit_marginal(joint, n + 1, k)
            input_states.append(validate_density_matrix(rho_k, name=f"rho^({k})"))
            reservoir_states.append(validate_density_matrix(xi_k, name=f"xi^({k})"))
    else:
        rho = rho0
        for k in range(1, n + 1):
            theta = config.schedule.sample(k)
            thetas[k] = theta
            rho, xi_k = collision_channel_closed_form(rho, xi0, theta)
            input_states.append(rho)
            reservoir_states.append(xi_k)

    distances = np.array([l2_distance(xi0, s) for s in input_states])
    fidelities = np.array([fidelity(s, xi0) for s in input_states])
    return Trajectory(input_states=input_states, reservoir_states=reservoir_states,
                      thetas=thetas, distances=distances, fidelities=fidelities)


def stochastic_swap_channel(rho: np.ndarray, xi: np.ndarray, p: float) -> np.ndarray:
    """Input marginal of the convex mixture p * identity + (1-p) * SWAP.

    This is the incoherent surrogate of the partial SWAP: it reproduces the
    closed-form channel for commuting states at p = cos^2(theta) but misses
    the commutator cross term otherwise.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rho = validate_density_matrix(rho, name="rho")
    xi = validate_density_matrix(xi, name="xi")
    return p * rho + (1 - p) * xi


def average_state(states) -> np.ndarray:
    """Uniform mixture of a state sequence; valid by convexity."""
    states = list(states)
    if not states:
        raise ValueError("average_state needs at least one state")
    first_shape = np.asarray(states[0]).shape
    if any(np.asarray(s).shape != first_shape for s in states):
        raise ValueError("states must share a dimension")
    avg = sum(np.asarray(s, dtype=complex) for s in states) / len(states)
    return validate_density_matrix(avg, name="average")
