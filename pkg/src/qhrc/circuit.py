"""Gate-level realization of the partial SWAP on two wires.

The available gate set is a fixed family parametrized by a positive integer n
(with eta = -pi/(2n), so that -2*eta = pi/n):

    u1(n)          diag(1, e^{i pi / 2n})
    ry_plus        [[1, -1], [1, 1]] / sqrt(2)
    ry_minus       [[1, 1], [-1, 1]] / sqrt(2)
    rz_eta(n)      diag(e^{-i eta}, e^{i eta})
    rz_2eta(n)     diag(e^{2 i eta}, e^{2 i eta})   (proportional to the
                   identity as printed; a "corrected" variant
                   diag(e^{2 i eta}, e^{-2 i eta}) is also available)
    cnot           on either wire ordering

``verify_decomposition`` checks whether a candidate circuit built from this
set (exactly four CNOTs, at most six single-qubit gates) compiles to a
partial-SWAP unitary up to global phase, and records the swap angle the
candidate realizes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .homogenizer import partial_swap_unitary, swap_operator
from .states import kron, ID2

GATE_UNITARITY_ATOL = 1e-12
BUNDLED_LAYOUT = "partial_swap_layout.json"

_CNOT_01 = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]], dtype=complex)
_CNOT_10 = np.array(
    [[1, 0, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0],
     [0, 1, 0, 0]], dtype=complex)


class GateBudgetError(ValueError):
    """Candidate violates the gate budget or uses a gate outside the fixed set."""


@dataclass(frozen=True)
class Gate:
    """A named gate instance bound to specific wires."""

    name: str
    wires: tuple
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        expected = 2 ** len(self.wires)
        if mat.shape != (expected, expected):
            raise ValueError(f"{self.name}: matrix shape {mat.shape} does not fit wires {self.wires}")
        err = np.max(np.abs(mat @ mat.conj().T - np.eye(expected)))
        if err > GATE_UNITARITY_ATOL:
            raise ValueError(f"{self.name}: matrix is not unitary (deviation {err:.3e})")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))


@dataclass(frozen=True)
class CircuitSpec:
    """Ordered two-wire gate list; compilation multiplies right-to-left."""

    gates: tuple
    n_wires: int = 2

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(w < 0 or w >= self.n_wires for w in g.wires):
                raise ValueError(f"gate {g.name} wires {g.wires} out of range for {self.n_wires} wires")

    def cnot_count(self) -> int:
        return sum(1 for g in self.gates if len(g.wires) == 2)

    def single_qubit_count(self) -> int:
        return sum(1 for g in self.gates if len(g.wires) == 1)


def eta_for(n: int) -> float:
    """The phase parameter eta, fixed by -2 eta = pi / n."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return -np.pi / (2 * n)


def gate_u1(n: int, wire: int = 0) -> Gate:
    if n < 1:
        raise ValueError("n must be a positive integer")
    mat = np.diag([1.0, np.exp(1j * np.pi / (2 * n))])
    return Gate("u1", (wire,), mat)


def gate_ry(angle: float, wire: int = 0) -> Gate:
    """The two quarter-turn rotations; only angle = +/- pi/4 is in the gate set."""
    if np.isclose(angle, np.pi / 4):
        mat = np.array([[1, -1], [1, 1]], dtype=complex) / np.sqrt(2)
        return Gate("ry_plus", (wire,), mat)
    if np.isclose(angle, -np.pi / 4):
        mat = np.array([[1, 1], [-1, 1]], dtype=complex) / np.sqrt(2)
        return Gate("ry_minus", (wire,), mat)
    raise ValueError(f"gate set only contains ry(+/- pi/4), got angle {angle}")


def gate_rz(eta: float, wire: int = 0) -> Gate:
    mat = np.diag([np.exp(-1j * eta), np.exp(1j * eta)])
    return Gate("rz_eta", (wire,), mat)


def gate_rz_2eta(n: int, wire: int = 0, *, corrected: bool = False) -> Gate:
    """The rz(-2 eta) gate.

    As printed this has equal diagonal entries e^{2 i eta}, i.e. it is a pure
    global phase; ``corrected=True`` selects the conventional
    diag(e^{2 i eta}, e^{-2 i eta}) variant instead.
    """
    eta = eta_for(n)
    if corrected:
        mat = np.diag([np.exp(2j * eta), np.exp(-2j * eta)])
    else:
        mat = np.diag([np.exp(2j * eta), np.exp(2j * eta)])
    return Gate("rz_2eta_corrected" if corrected else "rz_2eta", (wire,), mat)


def gate_cnot(control: int = 0, target: int = 1) -> Gate:
    if {control, target} != {0, 1}:
        raise ValueError(f"cnot wires must be (0,1) or (1,0), got ({control}, {target})")
    mat = _CNOT_01 if control == 0 else _CNOT_10
    return Gate("cnot", (control, target), mat)


def _embed(gate: Gate) -> np.ndarray:
    if len(gate.wires) == 2:
        return gate.matrix
    return kron(gate.matrix, ID2) if gate.wires[0] == 0 else kron(ID2, gate.matrix)


def compile_circuit(spec: CircuitSpec) -> np.ndarray:
    """Compile a two-wire circuit to its 4x4 unitary.

    Gates are listed in circuit (time) order, so the matrix product runs
    right-to-left: compile([A, B]) = embed(B) @ embed(A).
    """
    if spec.n_wires != 2:
        raise ValueError("only two-wire circuits are compiled")
    u = np.eye(4, dtype=complex)
    for gate in spec.gates:
        u = _embed(gate) @ u
    return u


def _check_unitary(mat: np.ndarray, name: str, atol: float = 1e-8) -> np.ndarray:
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square")
    err = np.max(np.abs(mat @ mat.conj().T - np.eye(mat.shape[0])))
    if err > atol:
        raise ValueError(f"{name} is not unitary (deviation {err:.3e})")
    return mat


def equivalent_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-10):
    """Decide whether u = e^{i phi} v for some phi within Frobenius tolerance.

    The candidate phase is read off the largest-magnitude entry of ``v``.
    Returns ``(True, phi)`` on success and ``(False, None)`` otherwise.
    """
    u = _check_unitary(u, "u")
    v = _check_unitary(v, "v")
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    idx = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    if abs(u[idx]) < 1e-12:
        return False, None
    phi = float(np.angle(u[idx] / v[idx]))
    if np.linalg.norm(u - np.exp(1j * phi) * v) <= tol:
        return True, phi
    return False, None


def realized_swap_angle(u: np.ndarray):
    """Best-fit (theta, phase, residual) for u ~ e^{i phase} U(theta).

    Projects onto the orthogonal pair P+ = (I + SWAP)/2, P- = (I - SWAP)/2;
    any member of the partial-SWAP family is e^{i(phase+theta)} P+ +
    e^{i(phase-theta)} P-.  ``residual`` is the Frobenius distance to the
    fitted family member; theta is reported in (-pi/2, pi/2].
    """
    u = np.asarray(u, dtype=complex)
    swap = swap_operator()
    p_plus = (np.eye(4) + swap) / 2
    p_minus = (np.eye(4) - swap) / 2
    c_plus = np.trace(p_plus @ u) / 3
    c_minus = np.trace(p_minus @ u)
    residual = float(np.linalg.norm(u - (c_plus * p_plus + c_minus * p_minus)))
    theta = float(np.angle(c_plus * np.conj(c_minus)) / 2)
    phase = float(np.angle(c_plus) - theta)
    return theta, phase, residual


ALLOWED_GATE_NAMES = ("cnot", "u1", "ry_plus", "ry_minus", "rz_eta", "rz_2eta", "rz_2eta_corrected")


def _reference_gate(name: str, n: int, wires: tuple) -> Gate:
    if name == "cnot":
        return gate_cnot(*wires)
    wire = wires[0]
    if name == "u1":
        return gate_u1(n, wire)
    if name == "ry_plus":
        return gate_ry(np.pi / 4, wire)
    if name == "ry_minus":
        return gate_ry(-np.pi / 4, wire)
    if name == "rz_eta":
        return gate_rz(eta_for(n), wire)
    if name == "rz_2eta":
        return gate_rz_2eta(n, wire)
    if name == "rz_2eta_corrected":
        return gate_rz_2eta(n, wire, corrected=True)
    raise GateBudgetError(f"gate {name!r} is not in the fixed set {ALLOWED_GATE_NAMES}")


@dataclass
class DecompositionReport:
    """Result of checking one candidate circuit against the partial-SWAP family."""

    n: int
    cnot_count: int
    single_qubit_count: int
    realized_theta: float
    phase: float
    equivalent: bool
    residual: float
    max_error: float
    notes: tuple = ()


def verify_decomposition(n: int, candidate: CircuitSpec, *, tol: float = 1e-10,
                         enforce_gate_set: bool = True) -> DecompositionReport:
    """Check a candidate circuit against the partial-SWAP family for parameter n.

    The candidate must use exactly four CNOTs and at most six single-qubit
    gates from the fixed set (``GateBudgetError`` otherwise).  The report
    records the swap angle theta the compiled unitary realizes and whether it
    is phase-equivalent to ``partial_swap_unitary(theta)`` within ``tol``.
    """
    cnots = candidate.cnot_count()
    singles = candidate.single_qubit_count()
    if cnots != 4:
        raise GateBudgetError(f"candidate uses {cnots} CNOTs, budget is exactly 4")
    if singles > 6:
        raise GateBudgetError(f"candidate uses {singles} single-qubit gates, budget is 6")
    notes = []
    if enforce_gate_set:
        for g in candidate.gates:
            if g.name not in ALLOWED_GATE_NAMES:
                raise GateBudgetError(f"gate {g.name!r} is not in the fixed set")
            ref = _reference_gate(g.name, n, g.wires)
            if not np.allclose(g.matrix, ref.matrix, atol=1e-12):
                raise GateBudgetError(
                    f"gate {g.name!r} matrix does not match its printed form for n={n}")
            if g.name == "rz_2eta":
                notes.append("rz_2eta is proportional to the identity as printed "
                             "(pure global phase)")
    compiled = compile_circuit(candidate)
    theta, phase, residual = realized_swap_angle(compiled)
    target = partial_swap_unitary(theta)
    equivalent, fitted_phase = equivalent_up_to_phase(compiled, target, tol)
    if equivalent:
        phase = fitted_phase
        max_error = float(np.linalg.norm(compiled - np.exp(1j * phase) * target))
    else:
        max_error = float(np.linalg.norm(compiled - np.exp(1j * phase) * target))
    return DecompositionReport(
        n=n, cnot_count=cnots, single_qubit_count=singles,
        realized_theta=theta, phase=phase, equivalent=equivalent,
        residual=residual, max_error=max_error, notes=tuple(dict.fromkeys(notes)))


# ---------------------------------------------------------------------------
# symbolic layouts: (gate name, wires) pairs, persisted as JSON
# ---------------------------------------------------------------------------

def layout_to_circuit(layout, n: int) -> CircuitSpec:
    """Materialize a symbolic layout (sequence of (name, wires) pairs) for parameter n."""
    gates = [_reference_gate(name, n, tuple(wires)) for name, wires in layout]
    return CircuitSpec(gates=tuple(gates))


def save_layout(path, layout, *, meta=None) -> None:
    """Write a symbolic layout to a JSON file.

    Schema: ``format`` (version tag), ``gates`` (list of ``{"gate": name,
    "wires": [...]}`` in circuit order), plus any entries of ``meta``.
    """
    doc = {"format": "qhrc-layout.v1"}
    if meta:
        doc.update(meta)
    doc["gates"] = [{"gate": name, "wires": list(wires)} for name, wires in layout]
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_layout(path=None):
    """Read a symbolic layout; returns (layout, meta).

    With ``path=None`` the layout bundled with the package is loaded.
    """
    if path is None:
        text = resources.files("qhrc").joinpath("data", BUNDLED_LAYOUT).read_text()
    else:
        text = Path(path).read_text()
    doc = json.loads(text)
    if doc.get("format") != "qhrc-layout.v1":
        raise ValueError(f"unrecognized layout format {doc.get('format')!r}")
    layout = tuple((g["gate"], tuple(g["wires"])) for g in doc["gates"])
    meta = {k: v for k, v in doc.items() if k not in ("format", "gates")}
    return layout, meta
