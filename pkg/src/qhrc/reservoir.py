"""Reservoir-computing harness on top of the collision dynamics.

A scalar input stream drives the register one timestep at a time: each value
is encoded into a fresh qubit, collided once with every reservoir qubit, and
discarded.  Pauli-product expectations of the persisting reservoir state form
the feature matrix; a ridge-regression readout maps features to targets.
Includes the NARMA benchmark family and an sklearn-compatible estimator
wrapper so the pipeline composes with the wider ecosystem.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .homogenizer import CouplingSchedule, HomogenizerConfig, collide_joint
from .states import (
    KET0,
    KET1,
    PAULIS,
    PLUS,
    expectation,
    kron,
    partial_trace,
    validate_density_matrix,
)

DEFAULT_WASHOUT = 50
DEFAULT_RIDGE_LAMBDA = 1e-6


@dataclass(frozen=True)
class InputCoupling:
    """Input-modulated coupling theta_k = theta0 * (offset + gain * s_k).

    The default keeps theta inside (0, pi/2) for any s in [0, 1], straddling
    the pi/4 regime; modulating the coupling by the input is what makes the
    dynamical encoding nonlinear in the drive.
    """

    theta0: float = np.pi / 4
    offset: float = 0.6
    gain: float = 0.8

    def theta(self, s: float) -> float:
        return self.theta0 * (self.offset + self.gain * s)


DEFAULT_INPUT_COUPLING = InputCoupling()


def validate_input_sequence(values) -> np.ndarray:
    """Bounded input stream: a 1-D float array with every value in [0, 1]."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"input sequence must be a non-empty 1-D array, got shape {arr.shape}")
    if np.any(~np.isfinite(arr)) or arr.min() < 0 or arr.max() > 1:
        raise ValueError("input values must lie in [0, 1]")
    return arr


def encode_input(s: float) -> np.ndarray:
    """Computational-basis mixture (1-s)|0><0| + s|1><1| for s in [0, 1]."""
    if not 0 <= s <= 1:
        raise ValueError(f"input value {s} outside [0, 1]")
    return (1 - s) * KET0 + s * KET1


_OBSERVABLE_RE = re.compile(r"([XYZ])(\d+)")


def parse_observable(label: str, n_qubits: int):
    """Parse a Pauli-product label like "Z0" or "Z2Z3" into (letter, qubit) pairs."""
    matched = "".join(f"{p}{q}" for p, q in _OBSERVABLE_RE.findall(label))
    factors = [(p, int(q)) for p, q in _OBSERVABLE_RE.findall(label)]
    if not factors or matched != label:
        raise ValueError(f"bad observable label {label!r}")
    seen = set()
    for pauli, qubit in factors:
        if qubit >= n_qubits or qubit < 0:
            raise ValueError(f"observable {label!r}: qubit {qubit} out of range for {n_qubits}")
        if qubit in seen:
            raise ValueError(f"observable {label!r} repeats qubit {qubit}")
        seen.add(qubit)
    return factors


def build_observable(label: str, n_qubits: int) -> np.ndarray:
    """Dense matrix of a Pauli-product observable on the reservoir register."""
    factors = dict((q, p) for p, q in parse_observable(label, n_qubits))
    return kron(*[PAULIS[factors.get(q, "I")] for q in range(n_qubits)])


def default_observables(n_qubits: int):
    """Single-qubit Z on every reservoir qubit plus adjacent-pair ZZ.

    The full 4^N Pauli basis is intractable; nearest-neighbour pairs are the
    cheapest carriers of the correlation features beyond the marginals.
    """
    labels = [f"Z{q}" for q in range(n_qubits)]
    labels += [f"Z{q}Z{q + 1}" for q in range(n_qubits - 1)]
    return labels


@dataclass
class ReservoirRun:
    """Feature time series produced by one drive of the reservoir."""

    n_reservoir: int
    feature_matrix: np.ndarray          # (T, M) observable expectations
    observables: tuple
    washout: int
    coupling: object                    # InputCoupling or CouplingSchedule
    inputs: np.ndarray
    final_reservoir: np.ndarray = None

    @property
    def trainable_features(self) -> np.ndarray:
        return self.feature_matrix[self.washout:]


def drive(inputs, config: HomogenizerConfig, observables=None, *,
          washout: int = DEFAULT_WASHOUT, input_coupling=DEFAULT_INPUT_COUPLING,
          initial_reservoir=None, reuse_reservoir: bool = True) -> ReservoirRun:
    """Feed an input sequence through the reservoir and record observables.

    Per timestep: encode s_t into a fresh qubit, collide it once with each of
    the N reservoir qubits in order, trace it out, then measure every
    observable on the reservoir state, which persists to the next step.
    Coupling comes from ``input_coupling`` when given (theta constant within
    a pass), otherwise from ``config.schedule.sample(t)``.

    ``reuse_reservoir=False`` resets the register to its initial preparation
    before every input instead (no temporal memory); ``initial_reservoir``
    overrides the default preparation xi^(ox N).  Exact-joint mode is
    required: the inter-qubit correlations are the reservoir's memory.
    """
    if config.mode != "exact-joint":
        raise ValueError("drive requires exact-joint mode (correlations are the memory)")
    inputs = validate_input_sequence(inputs)
    n = config.n_reservoir
    labels = tuple(observables) if observables is not None else tuple(default_observables(n))
    if not labels:
        raise ValueError("need at least one observable")
    if not 0 <= washout < len(inputs):
        raise ValueError(f"washout {washout} out of range for {len(inputs)} steps")
    ops = [build_observable(label, n) for label in labels]

    if initial_reservoir is None:
        reservoir0 = kron(*([config.xi] * n))
    else:
        reservoir0 = validate_density_matrix(np.asarray(initial_reservoir, dtype=complex),
                                             name="initial_reservoir")
        if reservoir0.shape != (2 ** n, 2 ** n):
            raise ValueError(f"initial reservoir must be {n} qubits")

    reservoir = reservoir0
    features = np.empty((len(inputs), len(ops)))
    for t, s in enumerate(inputs):
        if not reuse_reservoir:
            reservoir = reservoir0
        theta = input_coupling.theta(s) if input_coupling is not None \
            else config.schedule.sample(t)
        joint = kron(encode_input(s), reservoir)
        for wire in range(1, n + 1):
            joint = collide_joint(joint, 0, wire, theta,
                                  max_joint_qubits=config.max_joint_qubits)
        reservoir = partial_trace(joint, (2, 2 ** n), 1)
        features[t] = [expectation(op, reservoir) for op in ops]
    validate_density_matrix(reservoir, name="final reservoir")
    coupling = input_coupling if input_coupling is not None else config.schedule
    return ReservoirRun(n_reservoir=n, feature_matrix=features, observables=labels,
                        washout=washout, coupling=coupling, inputs=inputs,
                        final_reservoir=reservoir)


@dataclass
class ReadoutWeights:
    """Trained linear readout; the bias sits in the last slot."""

    weights: np.ndarray
    ridge_lambda: float


def ridge_fit(features: np.ndarray, targets: np.ndarray,
              ridge_lambda: float) -> ReadoutWeights:
    """Ridge regression on bias-augmented features.

    Solves (X^T X + lambda D) w = X^T y with D the identity on feature
    weights and zero on the bias, so in the strong-shrinkage limit the
    predictor degrades to the target mean.  A rank-deficient system with
    lambda = 0 raises ``numpy.linalg.LinAlgError``.
    """
    if ridge_lambda < 0:
        raise ValueError("ridge_lambda must be non-negative")
    x = np.asarray(features, dtype=float)
    y = np.asarray(targets, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if len(x) != len(y):
        raise ValueError(f"{len(x)} feature rows vs {len(y)} targets")
    xa = np.hstack([x, np.ones((len(x), 1))])
    if ridge_lambda == 0 and np.linalg.matrix_rank(xa) < xa.shape[1]:
        raise np.linalg.LinAlgError(
            "feature matrix is singular with ridge_lambda=0; add regularization")
    penalty = np.eye(xa.shape[1])
    penalty[-1, -1] = 0.0
    weights = np.linalg.solve(xa.T @ xa + ridge_lambda * penalty, xa.T @ y)
    if not np.all(np.isfinite(weights)):
        raise np.linalg.LinAlgError("readout weights are not finite")
    return ReadoutWeights(weights=weights, ridge_lambda=float(ridge_lambda))


def train_readout(run: ReservoirRun, targets,
                  ridge_lambda: float = DEFAULT_RIDGE_LAMBDA) -> ReadoutWeights:
    """Fit the readout on the post-washout feature rows of a run.

    ``targets`` must align with the post-washout rows (length T - washout).
    """
    x = run.trainable_features
    targets = np.asarray(targets, dtype=float)
    if len(targets) != len(x):
        raise ValueError(f"expected {len(x)} targets (post-washout rows), got {len(targets)}")
    return ridge_fit(x, targets, ridge_lambda)


def apply_readout(features: np.ndarray, weights: ReadoutWeights) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return np.hstack([x, np.ones((len(x), 1))]) @ weights.weights


def nmse(predictions, targets) -> float:
    """Normalized mean squared error: sum (y_hat - y)^2 / sum (y - mean y)^2."""
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if predictions.shape != targets.shape:
        raise ValueError("prediction/target length mismatch")
    denom = np.sum((targets - targets.mean()) ** 2)
    if denom == 0:
        raise ValueError("targets have zero variance; NMSE undefined")
    return float(np.sum((predictions - targets) ** 2) / denom)


def evaluate(run: ReservoirRun, weights: ReadoutWeights, targets) -> float:
    """NMSE of the trained readout over the post-washout rows of a run."""
    targets = np.asarray(targets, dtype=float)
    x = run.trainable_features
    if len(targets) != len(x):
        raise ValueError(f"expected {len(x)} targets (post-washout rows), got {len(targets)}")
    return nmse(apply_readout(x, weights), targets)


# ---------------------------------------------------------------------------
# NARMA benchmark family
# ---------------------------------------------------------------------------

@dataclass
class NarmaSeries:
    inputs: np.ndarray
    targets: np.ndarray
    order: int
    seed: int
    seed_used: int


def narma_targets(inputs, order: int = 2) -> np.ndarray:
    """NARMA recurrence evaluated on a given input sequence.

    Order 2:  y_k = 0.4 y_{k-1} + 0.4 y_{k-1} y_{k-2} + 0.6 u_k^3 + 0.1
    Order 10: y_k = 0.3 y_{k-1} + 0.05 y_{k-1} sum_{i=1..10} y_{k-i}
                    + 1.5 u_k u_{k-9} + 0.1
    with zero initial history (and zero input padding for the lagged terms).
    """
    u = np.asarray(inputs, dtype=float)
    if order not in (2, 10):
        raise ValueError("supported NARMA orders are 2 and 10")
    t_len = len(u)
    y = np.zeros(t_len + order)
    up = np.concatenate([np.zeros(order), u])
    for k in range(order, t_len + order):
        if order == 2:
            y[k] = 0.4 * y[k - 1] + 0.4 * y[k - 1] * y[k - 2] + 0.6 * up[k] ** 3 + 0.1
        else:
            y[k] = (0.3 * y[k - 1]
                    + 0.05 * y[k - 1] * np.sum(y[k - 10:k])
                    + 1.5 * up[k] * up[k - 9] + 0.1)
        if not np.isfinite(y[k]) or abs(y[k]) > 1e3:
            return np.full(t_len, np.nan)
    return y[order:]


def narma_series(order: int, length: int, seed: int) -> NarmaSeries:
    """Seeded NARMA task: inputs uniform on [0, 0.5] plus recurrence targets.

    Divergent draws (possible at order 10) are resampled with an incremented
    seed; ``seed_used`` reports the seed that produced the returned series.
    """
    if length <= order:
        raise ValueError(f"length must exceed the order, got {length} <= {order}")
    attempt = seed
    while True:
        u = np.random.default_rng(attempt).uniform(0, 0.5, length)
        y = narma_targets(u, order)
        if np.all(np.isfinite(y)):
            return NarmaSeries(inputs=u, targets=y, order=order, seed=seed,
                               seed_used=attempt)
        attempt += 1


# ---------------------------------------------------------------------------
# end-to-end benchmark
# ---------------------------------------------------------------------------

@dataclass
class BenchmarkResult:
    """Reservoir-vs-baseline comparison on one NARMA task."""

    order: int
    n_reservoir: int
    ridge_lambda: float
    washout: int
    train_nmse: float
    test_nmse: float
    baseline_train_nmse: float
    baseline_test_nmse: float
    test_predictions: np.ndarray
    baseline_test_predictions: np.ndarray
    test_targets: np.ndarray
    run: ReservoirRun = field(repr=False, default=None)
    seed_used: int = 0


def narma_benchmark(order: int = 2, length: int = 1200, seed: int = 7, *,
                    n_reservoir: int = 6, observables=None,
                    ridge_lambda: float = DEFAULT_RIDGE_LAMBDA,
                    washout: int = DEFAULT_WASHOUT, train_fraction: float = 0.7,
                    xi=None, input_coupling=DEFAULT_INPUT_COUPLING,
                    reuse_reservoir: bool = True) -> BenchmarkResult:
    """Drive the reservoir on a NARMA task and score it against a memoryless baseline.

    The baseline trains the same ridge readout on the raw input u_k alone,
    with identical washout, chronological 70/30 split, and regularization.
    """
    series = narma_series(order, length, seed)
    xi = PLUS if xi is None else xi
    config = HomogenizerConfig(
        n_reservoir=n_reservoir, xi=xi, mode="exact-joint",
        schedule=CouplingSchedule.fixed(input_coupling.theta0 if input_coupling else np.pi / 4))
    run = drive(series.inputs, config, observables, washout=washout,
                input_coupling=input_coupling, reuse_reservoir=reuse_reservoir)

    features = run.trainable_features
    targets = series.targets[washout:]
    baseline_features = series.inputs[washout:, None]
    split = int(round(train_fraction * len(targets)))
    if split <= 0 or split >= len(targets):
        raise ValueError("train fraction leaves an empty split")

    def fit_and_score(x):
        w = ridge_fit(x[:split], targets[:split], ridge_lambda)
        train = nmse(apply_readout(x[:split], w), targets[:split])
        test_pred = apply_readout(x[split:], w)
        return train, nmse(test_pred, targets[split:]), test_pred

    train_nmse, test_nmse, test_pred = fit_and_score(features)
    base_train, base_test, base_pred = fit_and_score(baseline_features)
    return BenchmarkResult(
        order=order, n_reservoir=n_reservoir, ridge_lambda=ridge_lambda,
        washout=washout, train_nmse=train_nmse, test_nmse=test_nmse,
        baseline_train_nmse=base_train, baseline_test_nmse=base_test,
        test_predictions=test_pred, baseline_test_predictions=base_pred,
        test_targets=targets[split:], run=run, seed_used=series.seed_used)


# ---------------------------------------------------------------------------
# sklearn-style estimator wrapper
# ---------------------------------------------------------------------------

class HomogenizerReservoirRegressor(BaseEstimator, RegressorMixin):
    """Reservoir regressor with the sklearn fit/predict/get_params surface.

    ``X`` is a scalar time series in [0, 1] (1-D array or single column);
    rows are consecutive timesteps, not independent samples, so use
    time-series-aware model selection.  ``fit`` drives the reservoir over X
    and ridge-trains the readout on the post-washout rows of y; ``predict``
    re-drives a fresh reservoir over the given sequence (deterministic) and
    returns one prediction per row, including the washout region.
    """

    def __init__(self, n_reservoir=6, observables=None, theta0=np.pi / 4,
                 coupling_offset=0.6, coupling_gain=0.8, washout=DEFAULT_WASHOUT,
                 ridge_lambda=DEFAULT_RIDGE_LAMBDA, xi=None, reuse_reservoir=True):
        self.n_reservoir = n_reservoir
        self.observables = observables
        self.theta0 = theta0
        self.coupling_offset = coupling_offset
        self.coupling_gain = coupling_gain
        self.washout = washout
        self.ridge_lambda = ridge_lambda
        self.xi = xi
        self.reuse_reservoir = reuse_reservoir

    def _coupling(self) -> InputCoupling:
        return InputCoupling(theta0=self.theta0, offset=self.coupling_offset,
                             gain=self.coupling_gain)

    def _drive(self, x) -> ReservoirRun:
        xi = PLUS if self.xi is None else self.xi
        config = HomogenizerConfig(
            n_reservoir=self.n_reservoir, xi=xi, mode="exact-joint",
            schedule=CouplingSchedule.fixed(self.theta0))
        return drive(x, config, self.observables, washout=self.washout,
                     input_coupling=self._coupling(),
                     reuse_reservoir=self.reuse_reservoir)

    def fit(self, X, y):
        u = validate_input_sequence(X)
        y = np.asarray(y, dtype=float)
        if len(y) != len(u):
            raise ValueError(f"{len(u)} inputs vs {len(y)} targets")
        run = self._drive(u)
        self.readout_ = train_readout(run, y[self.washout:], self.ridge_lambda)
        self.feature_labels_ = run.observables
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        if not hasattr(self, "readout_"):
            raise AttributeError("estimator is not fitted; call fit first")
        run = self._drive(validate_input_sequence(X))
        return apply_readout(run.feature_matrix, self.readout_)
