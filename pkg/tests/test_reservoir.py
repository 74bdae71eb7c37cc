import numpy as np
import pytest
from sklearn.base import clone

from qhrc.homogenizer import CouplingSchedule, HomogenizerConfig
from qhrc.reservoir import (
    HomogenizerReservoirRegressor,
    InputCoupling,
    apply_readout,
    build_observable,
    default_observables,
    drive,
    encode_input,
    evaluate,
    narma_series,
    narma_targets,
    nmse,
    parse_observable,
    ridge_fit,
    train_readout,
    validate_input_sequence,
)
from qhrc.states import KET0, MIXED, PAULI_Z, PLUS, kron


def exact_joint_config(n, xi=PLUS, theta=np.pi / 4):
    return HomogenizerConfig(n_reservoir=n, xi=xi, mode="exact-joint",
                             schedule=CouplingSchedule.fixed(theta))


class TestEncodeInput:
    def test_endpoints(self):
        np.testing.assert_array_equal(encode_input(0.0), KET0)
        np.testing.assert_allclose(encode_input(0.5), MIXED, atol=1e-15)

    def test_direct_substitution(self):
        np.testing.assert_allclose(encode_input(0.3), np.diag([0.7, 0.3]), atol=1e-15)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            encode_input(1.2)


class TestObservables:
    def test_parse_single_and_pair(self):
        assert parse_observable("Z0", 4) == [("Z", 0)]
        assert parse_observable("Z2Z3", 4) == [("Z", 2), ("Z", 3)]

    def test_parse_rejects_garbage(self):
        for label in ("", "Q1", "Z0garbage", "Z9", "Z1Z1"):
            with pytest.raises(ValueError):
                parse_observable(label, 4)

    def test_build_embeds_on_named_qubits(self):
        op = build_observable("Z1", 2)
        np.testing.assert_array_equal(op, kron(np.eye(2), PAULI_Z))

    def test_default_set_size(self):
        labels = default_observables(6)
        assert len(labels) == 11
        assert labels[0] == "Z0" and labels[-1] == "Z4Z5"


class TestDrive:
    def test_requires_exact_joint(self):
        config = HomogenizerConfig(n_reservoir=2, xi=PLUS,
                                   schedule=CouplingSchedule.fixed(0.3))
        with pytest.raises(ValueError, match="exact-joint"):
            drive([0.1, 0.2], config, washout=0)

    def test_zero_coupling_features_constant(self):
        config = exact_joint_config(3, theta=0.0)
        run = drive(np.full(10, 0.4), config, washout=0, input_coupling=None)
        want = [1.0 - 2 * 0.5, 0.0][:1]  # tr(Z |+><+|) = 0 on every qubit
        np.testing.assert_allclose(run.feature_matrix, 0.0, atol=1e-12)

    def test_full_swap_loads_input_pattern(self):
        # constant input, full SWAP: qubit 0 carries rho(s) after the first
        # pass, qubit 1 after the second (hand bookkeeping for N = 2)
        s = 0.2
        config = exact_joint_config(2, theta=np.pi / 2)
        run = drive(np.full(4, s), config, observables=["Z0", "Z1"],
                    washout=0, input_coupling=None)
        want = 1 - 2 * s
        assert abs(run.feature_matrix[0, 0] - want) < 1e-12
        assert abs(run.feature_matrix[1, 1] - want) < 1e-12
        np.testing.assert_allclose(run.feature_matrix[1:, 0], want, atol=1e-12)

    def test_deterministic(self):
        inputs = np.random.default_rng(41).uniform(0, 1, 30)
        runs = [drive(inputs, exact_joint_config(3), washout=5) for _ in range(2)]
        np.testing.assert_array_equal(runs[0].feature_matrix, runs[1].feature_matrix)

    def test_expectations_bounded(self):
        inputs = np.random.default_rng(42).uniform(0, 1, 60)
        run = drive(inputs, exact_joint_config(4), washout=0)
        assert run.feature_matrix.min() >= -1 - 1e-12
        assert run.feature_matrix.max() <= 1 + 1e-12

    def test_input_causal(self):
        inputs = np.random.default_rng(43).uniform(0, 1, 40)
        full = drive(inputs, exact_joint_config(3), washout=0)
        truncated = drive(inputs[:25], exact_joint_config(3), washout=0)
        np.testing.assert_array_equal(full.feature_matrix[:25],
                                      truncated.feature_matrix)

    def test_echo_state_feature_level(self):
        # different initial reservoir preparations, identical drive: rows merge
        inputs = np.random.default_rng(44).uniform(0, 1, 80)
        config = exact_joint_config(3)
        run_default = drive(inputs, config, washout=50)
        cold = kron(*([KET0] * 3))
        run_cold = drive(inputs, config, washout=50, initial_reservoir=cold)
        gap = np.linalg.norm(
            run_default.feature_matrix - run_cold.feature_matrix, axis=1)
        assert gap[0] > 1e-2
        assert np.all(gap[50:] < 1e-3)

    def test_no_reuse_is_memoryless(self):
        inputs = np.array([0.3, 0.8, 0.3, 0.8, 0.3])
        run = drive(inputs, exact_joint_config(3), washout=0, reuse_reservoir=False)
        np.testing.assert_allclose(run.feature_matrix[0], run.feature_matrix[2], atol=1e-13)
        np.testing.assert_allclose(run.feature_matrix[1], run.feature_matrix[3], atol=1e-13)
        assert np.linalg.norm(run.feature_matrix[0] - run.feature_matrix[1]) > 1e-3

    def test_input_validation(self):
        config = exact_joint_config(2)
        with pytest.raises(ValueError):
            drive([0.5, 1.5], config, washout=0)
        with pytest.raises(ValueError):
            drive([0.5, 0.5], config, observables=[], washout=0)
        with pytest.raises(ValueError):
            drive([0.5, 0.5], config, washout=2)

    def test_schedule_fallback_used_when_no_input_coupling(self):
        inputs = np.full(6, 0.5)
        run_sched = drive(inputs, exact_joint_config(2, theta=0.9), washout=0,
                          input_coupling=None)
        run_mod = drive(inputs, exact_joint_config(2, theta=0.9), washout=0,
                        input_coupling=InputCoupling(theta0=0.9, offset=1.0, gain=0.0))
        np.testing.assert_allclose(run_sched.feature_matrix,
                                   run_mod.feature_matrix, atol=1e-12)


class TestReadout:
    def make_run(self, t=60, n=3, washout=10, seed=45):
        inputs = np.random.default_rng(seed).uniform(0, 1, t)
        return drive(inputs, exact_joint_config(n), washout=washout)

    def test_exact_linear_recovery(self):
        run = self.make_run()
        x = run.trainable_features
        true_w = np.arange(1, x.shape[1] + 1, dtype=float)
        targets = x @ true_w + 0.25
        weights = train_readout(run, targets, ridge_lambda=0.0)
        assert evaluate(run, weights, targets) < 1e-10

    def test_strong_shrinkage_gives_mean_predictor(self):
        run = self.make_run()
        targets = np.random.default_rng(46).normal(1.7, 0.3, len(run.trainable_features))
        weights = train_readout(run, targets, ridge_lambda=1e12)
        preds = apply_readout(run.trainable_features, weights)
        np.testing.assert_allclose(preds, targets.mean(), atol=1e-6)

    def test_singular_system_with_zero_lambda(self):
        x = np.ones((20, 3))  # duplicate constant columns collide with the bias
        with pytest.raises(np.linalg.LinAlgError, match="singular"):
            ridge_fit(x, np.arange(20.0), 0.0)

    def test_target_length_checked(self):
        run = self.make_run()
        with pytest.raises(ValueError, match="post-washout"):
            train_readout(run, np.zeros(len(run.feature_matrix)), 1e-6)

    def test_washout_removes_rows_without_leakage(self):
        run = self.make_run(washout=10)
        targets = np.random.default_rng(47).uniform(size=len(run.trainable_features))
        via_run = train_readout(run, targets, 1e-6)
        via_slice = ridge_fit(run.feature_matrix[10:], targets, 1e-6)
        np.testing.assert_array_equal(via_run.weights, via_slice.weights)

    def test_negative_lambda_rejected(self):
        with pytest.raises(ValueError):
            ridge_fit(np.ones((5, 1)), np.ones(5), -1.0)


class TestNmse:
    def test_perfect_prediction(self):
        y = np.array([1.0, 2.0, 3.0])
        assert nmse(y, y) == 0.0

    def test_mean_predictor_is_one(self):
        y = np.array([1.0, 2.0, 3.0])
        assert abs(nmse(np.full(3, y.mean()), y) - 1.0) < 1e-14

    def test_zero_variance_rejected(self):
        with pytest.raises(ValueError, match="variance"):
            nmse(np.zeros(3), np.ones(3))


class TestNarma:
    def test_zero_input_reaches_fixed_point(self):
        y = narma_targets(np.zeros(200), order=2)
        # fixed point of y = 0.4 y + 0.4 y^2 + 0.1
        assert abs(y[-1] - 0.19098300562505255) < 1e-12

    def test_deterministic_per_seed(self):
        a = narma_series(2, 500, seed=9)
        b = narma_series(2, 500, seed=9)
        np.testing.assert_array_equal(a.inputs, b.inputs)
        np.testing.assert_array_equal(a.targets, b.targets)

    def test_pinned_statistics(self):
        series = narma_series(2, 10_000, seed=7)
        assert abs(series.targets.mean() - 0.23532130535908022) < 1e-12
        assert abs(series.targets.var() - 0.0006517658631109635) < 1e-15

    def test_order10_finite_and_seed_reported(self):
        series = narma_series(10, 1500, seed=3)
        assert np.all(np.isfinite(series.targets))
        assert series.seed_used >= series.seed

    def test_length_must_exceed_order(self):
        with pytest.raises(ValueError):
            narma_series(10, 10, seed=0)

    def test_unsupported_order(self):
        with pytest.raises(ValueError):
            narma_targets(np.zeros(5), order=3)


class TestEstimator:
    def test_get_params_roundtrip_and_clone(self):
        est = HomogenizerReservoirRegressor(n_reservoir=3, washout=10, ridge_lambda=1e-4)
        params = est.get_params()
        assert params["n_reservoir"] == 3
        twin = clone(est)
        assert twin.get_params() == params

    def test_fit_predict_beats_mean(self):
        series = narma_series(2, 260, seed=11)
        est = HomogenizerReservoirRegressor(n_reservoir=3, washout=20)
        est.fit(series.inputs, series.targets)
        preds = est.predict(series.inputs)
        assert preds.shape == series.inputs.shape
        post = slice(20, None)
        assert nmse(preds[post], series.targets[post]) < 0.5

    def test_predict_requires_fit(self):
        with pytest.raises(AttributeError, match="not fitted"):
            HomogenizerReservoirRegressor().predict([0.1, 0.2])

    def test_deterministic_predictions(self):
        series = narma_series(2, 150, seed=12)
        preds = []
        for _ in range(2):
            est = HomogenizerReservoirRegressor(n_reservoir=2, washout=10)
            est.fit(series.inputs, series.targets)
            preds.append(est.predict(series.inputs))
        np.testing.assert_array_equal(preds[0], preds[1])

    def test_accepts_column_vector(self):
        series = narma_series(2, 120, seed=13)
        est = HomogenizerReservoirRegressor(n_reservoir=2, washout=10)
        est.fit(series.inputs[:, None], series.targets)
        est.predict(series.inputs[:, None])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            HomogenizerReservoirRegressor(n_reservoir=2, washout=5).fit(
                np.full(20, 0.5), np.zeros(19))


class TestValidateInputSequence:
    def test_accepts_column(self):
        out = validate_input_sequence(np.full((5, 1), 0.3))
        assert out.shape == (5,)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            validate_input_sequence([-0.1, 0.5])
        with pytest.raises(ValueError):
            validate_input_sequence([])
