"""Dense density-matrix primitives: validation, tensor algebra, metrics, sampling.

Basis convention used throughout the package: qubit 0 is the most significant
bit, so an n-qubit basis state reads |q0 q1 ... q_{n-1}> and matrices are
stored row-major as complex128 ndarrays.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

# Default validation tolerances.  Double precision accumulates error over
# ~1e3 collisions, so these sit well above machine epsilon.
HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIGENVALUE_FLOOR = -1e-10

ID2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": ID2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

KET0 = np.array([[1, 0], [0, 0]], dtype=complex)       # |0><0|
KET1 = np.array([[0, 0], [0, 1]], dtype=complex)       # |1><1|
PLUS = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)   # |+><+|
MINUS = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)  # |-><-|
MIXED = np.eye(2, dtype=complex) / 2


class InvalidStateError(ValueError):
    """A matrix violated a density-matrix invariant (hermiticity, trace, positivity)."""


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def validate_density_matrix(rho: np.ndarray, *, atol: float = None, name: str = "state") -> np.ndarray:
    """Check hermiticity, unit trace and positive semidefiniteness of ``rho``.

    Returns the matrix as a complex128 array; raises ``InvalidStateError``
    listing the violated invariant otherwise.  ``atol`` overrides all three
    default tolerances at once (the eigenvalue floor becomes ``-atol``).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"{name}: expected a square matrix, got shape {rho.shape}")
    herm_atol = atol if atol is not None else HERMITICITY_ATOL
    trace_atol = atol if atol is not None else TRACE_ATOL
    eig_floor = -atol if atol is not None else EIGENVALUE_FLOOR
    herm_err = np.max(np.abs(rho - rho.conj().T))
    if herm_err > herm_atol:
        raise InvalidStateError(f"{name}: not Hermitian (deviation {herm_err:.3e})")
    trace_err = abs(np.trace(rho) - 1.0)
    if trace_err > trace_atol:
        raise InvalidStateError(f"{name}: trace deviates from 1 by {trace_err:.3e}")
    evals = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if evals[0] < eig_floor:
        raise InvalidStateError(f"{name}: negative eigenvalue {evals[0]:.3e}")
    return rho


def kron(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor most significant."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    return reduce(np.kron, (np.asarray(f, dtype=complex) for f in factors))


def partial_trace(rho: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out all subsystems of ``rho`` except those named in ``keep``.

    ``dims`` lists the subsystem dimensions in tensor order (product must
    equal the matrix dimension); ``keep`` is a subsystem index or an iterable
    of indices.  The returned matrix lives on the kept subsystems in their
    original order.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"dims {dims} do not match matrix shape {rho.shape}")
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    else:
        keep = tuple(sorted(int(k) for k in keep))
    if not keep or any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} subsystems")

    work = rho.reshape(dims + dims)
    remaining = list(range(len(dims)))
    for idx in sorted(set(range(len(dims))) - set(keep), reverse=True):
        pos = remaining.index(idx)
        work = np.trace(work, axis1=pos, axis2=pos + len(remaining))
        remaining.pop(pos)
    kept_dim = int(np.prod([dims[k] for k in keep]))
    return work.reshape(kept_dim, kept_dim)


def trace_out_qubit(rho: np.ndarray, n_qubits: int, wire: int) -> np.ndarray:
    """Remove one qubit from an ``n_qubits`` register state."""
    keep = [i for i in range(n_qubits) if i != wire]
    return partial_trace(rho, (2,) * n_qubits, keep)


def qubit_marginal(rho: np.ndarray, n_qubits: int, wire: int) -> np.ndarray:
    """Single-qubit reduced state of ``wire`` in an ``n_qubits`` register."""
    return partial_trace(rho, (2,) * n_qubits, wire)


def l2_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Frobenius distance ||rho - sigma||_2 = sqrt(sum |rho_ij - sigma_ij|^2)."""
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch: {rho.shape} vs {sigma.shape}")
    return float(np.linalg.norm(rho - sigma))


def _sqrtm_psd(mat: np.ndarray) -> np.ndarray:
    """Square root of a Hermitian PSD matrix.

    Eigenvalues within numerical noise of zero (relative to the largest) are
    zeroed exactly before the square root; otherwise sqrt turns an O(eps)
    rounding error into an O(sqrt(eps)) one on rank-deficient inputs.
    """
    evals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2)
    floor = mat.shape[0] * np.finfo(float).eps * max(evals[-1], 0.0)
    evals = np.where(evals < floor, 0.0, evals)
    return (vecs * np.sqrt(evals)) @ vecs.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray, *, kind: str = "uhlmann") -> float:
    """Fidelity between two density matrices, in [0, 1].

    ``kind="uhlmann"`` computes (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 via
    Hermitian eigendecompositions (only PSD inputs occur here, so no general
    matrix square root is needed).  ``kind="overlap"`` returns the plain
    squared-overlap surrogate Re tr(rho sigma), which coincides with the
    Uhlmann value when either state is pure.
    """
    rho = validate_density_matrix(rho, name="rho")
    sigma = validate_density_matrix(sigma, name="sigma")
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch: {rho.shape} vs {sigma.shape}")
    if kind == "overlap":
        return float(np.clip(np.real(np.trace(rho @ sigma)), 0.0, 1.0))
    if kind != "uhlmann":
        raise ValueError(f"unknown fidelity kind {kind!r}")
    # tr sqrt(sqrt(rho) sigma sqrt(rho)) equals the nuclear norm of
    # sqrt(sigma) sqrt(rho); summing singular values directly sidesteps the
    # precision loss of eigendecomposing the near-singular product.
    singular = np.linalg.svd(_sqrtm_psd(sigma) @ _sqrtm_psd(rho), compute_uv=False)
    return float(np.clip(np.sum(singular) ** 2, 0.0, 1.0))


def random_density(dim: int, seed: int) -> np.ndarray:
    """Hilbert-Schmidt random state: G G^dag / tr(G G^dag) with Ginibre G.

    Deterministic for a given ``seed``; ``dim`` must be a power of two >= 2.
    """
    if dim < 2 or not is_power_of_two(dim):
        raise ValueError(f"dim must be a power of two >= 2, got {dim}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    # symmetrise away the last bits of float noise
    return (rho + rho.conj().T) / 2


def bloch_state(x: float, y: float, z: float) -> np.ndarray:
    """Qubit state (I + x X + y Y + z Z) / 2; the Bloch vector must have norm <= 1."""
    norm = np.sqrt(x * x + y * y + z * z)
    if norm > 1 + 1e-12:
        raise ValueError(f"Bloch vector norm {norm:.6f} exceeds 1")
    return (ID2 + x * PAULI_X + y * PAULI_Y + z * PAULI_Z) / 2


def expectation(op: np.ndarray, rho: np.ndarray) -> float:
    """Real part of tr(op rho) for a Hermitian observable."""
    return float(np.real(np.sum(op * rho.T)))
