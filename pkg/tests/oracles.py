"""Independent brute-force oracles used to pin expected values in the tests.

Everything here is written against plain numpy with explicit index loops or
textbook formulas, deliberately sharing no code path with the package.
"""

import numpy as np


def kron_loops(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise Kronecker product."""
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


def partial_trace_loops(rho: np.ndarray, dim_a: int, dim_b: int, keep: int) -> np.ndarray:
    """Bipartite partial trace by explicit index summation."""
    if keep == 0:
        out = np.zeros((dim_a, dim_a), dtype=complex)
        for i in range(dim_a):
            for j in range(dim_a):
                for k in range(dim_b):
                    out[i, j] += rho[i * dim_b + k, j * dim_b + k]
    else:
        out = np.zeros((dim_b, dim_b), dtype=complex)
        for i in range(dim_b):
            for j in range(dim_b):
                for k in range(dim_a):
                    out[i, j] += rho[k * dim_b + i, k * dim_b + j]
    return out


def joint_collision_marginals(rho: np.ndarray, xi: np.ndarray, theta: float):
    """Collision marginals via explicit 4x4 joint evolution.

    Builds U = cos I + i sin SWAP directly, conjugates the product state and
    partial-traces with the loop oracle.
    """
    swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    u = np.cos(theta) * np.eye(4, dtype=complex) + 1j * np.sin(theta) * swap
    joint = u @ kron_loops(rho, xi) @ u.conj().T
    rho_out = partial_trace_loops(joint, 2, 2, keep=0)
    xi_out = partial_trace_loops(joint, 2, 2, keep=1)
    return rho_out, xi_out


def qubit_fidelity_closed_form(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity for qubits: tr(rho sigma) + 2 sqrt(det rho det sigma)."""
    overlap = np.real(np.trace(rho @ sigma))
    dets = max(np.real(np.linalg.det(rho)), 0.0) * max(np.real(np.linalg.det(sigma)), 0.0)
    return float(overlap + 2 * np.sqrt(dets))


def random_qubit_state(rng: np.random.Generator) -> np.ndarray:
    """Ginibre-sampled qubit state, independent of the package sampler."""
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
