import numpy as np
import pytest

from qhrc.homogenizer import (
    CouplingSchedule,
    HomogenizerConfig,
    average_state,
    collide_joint,
    collision_channel_closed_form,
    partial_swap_unitary,
    run_homogenization,
    stochastic_swap_channel,
    swap_operator,
)
from qhrc.states import (
    KET0,
    KET1,
    MIXED,
    PLUS,
    InvalidStateError,
    kron,
    l2_distance,
    partial_trace,
    qubit_marginal,
    validate_density_matrix,
)

from oracles import joint_collision_marginals, random_qubit_state


def basis_ket(bits):
    vec = np.zeros(2 ** len(bits), dtype=complex)
    vec[int("".join(map(str, bits)), 2)] = 1
    return vec


class TestSwapOperator:
    def test_defining_action(self):
        s = swap_operator()
        np.testing.assert_allclose(s @ basis_ket([0, 1]), basis_ket([1, 0]), atol=1e-15)

    def test_involution_and_hermiticity(self):
        s = swap_operator()
        np.testing.assert_allclose(s @ s, np.eye(4), atol=1e-15)
        np.testing.assert_allclose(s, s.conj().T, atol=1e-15)

    def test_full_swap_moves_marginal(self):
        rho = np.diag([0.9, 0.1]).astype(complex)
        xi = np.diag([0.2, 0.8]).astype(complex)
        s = swap_operator()
        joint = s @ kron(rho, xi) @ s
        np.testing.assert_allclose(partial_trace(joint, (2, 2), 1), rho, atol=1e-14)
        np.testing.assert_allclose(partial_trace(joint, (2, 2), 0), xi, atol=1e-14)


class TestPartialSwapUnitary:
    def test_identity_at_zero(self):
        np.testing.assert_allclose(partial_swap_unitary(0.0), np.eye(4), atol=1e-15)

    def test_swap_up_to_phase_at_half_pi(self):
        np.testing.assert_allclose(partial_swap_unitary(np.pi / 2), 1j * swap_operator(), atol=1e-15)

    @pytest.mark.parametrize("theta", [np.pi / 4, 0.3, 1.1, -0.7])
    def test_unitarity_by_direct_product(self, theta):
        u = partial_swap_unitary(theta)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            partial_swap_unitary(np.inf)


class TestCollisionChannel:
    def test_identity_at_zero_coupling(self):
        rho_out, xi_out = collision_channel_closed_form(KET0, PLUS, 0.0)
        np.testing.assert_allclose(rho_out, KET0, atol=1e-15)
        np.testing.assert_allclose(xi_out, PLUS, atol=1e-15)

    def test_diagonal_states_at_quarter_pi(self):
        # commutator vanishes, cos^2 = sin^2 = 1/2
        rho_out, _ = collision_channel_closed_form(KET0, KET1, np.pi / 4)
        np.testing.assert_allclose(rho_out, MIXED, atol=1e-15)

    def test_matches_joint_evolution_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(300):
            rho = random_qubit_state(rng)
            xi = random_qubit_state(rng)
            theta = rng.uniform(0, np.pi)
            got_rho, got_xi = collision_channel_closed_form(rho, xi, theta)
            want_rho, want_xi = joint_collision_marginals(rho, xi, theta)
            np.testing.assert_allclose(got_rho, want_rho, atol=1e-12)
            np.testing.assert_allclose(got_xi, want_xi, atol=1e-12)

    def test_role_swap_symmetry(self):
        rng = np.random.default_rng(22)
        rho, xi = random_qubit_state(rng), random_qubit_state(rng)
        a_out, b_out = collision_channel_closed_form(rho, xi, 0.4)
        b_out2, a_out2 = collision_channel_closed_form(xi, rho, 0.4)
        np.testing.assert_array_equal(a_out, a_out2)
        np.testing.assert_array_equal(b_out, b_out2)

    def test_linearity_on_convex_combinations(self):
        rng = np.random.default_rng(23)
        xi = random_qubit_state(rng)
        for _ in range(50):
            a, b = random_qubit_state(rng), random_qubit_state(rng)
            w = rng.uniform()
            theta = rng.uniform(0, np.pi / 2)
            mixed_out, _ = collision_channel_closed_form(w * a + (1 - w) * b, xi, theta)
            a_out, _ = collision_channel_closed_form(a, xi, theta)
            b_out, _ = collision_channel_closed_form(b, xi, theta)
            np.testing.assert_allclose(mixed_out, w * a_out + (1 - w) * b_out, atol=1e-10)

    def test_outputs_are_valid_states(self):
        rng = np.random.default_rng(24)
        for _ in range(1000):
            rho, xi = random_qubit_state(rng), random_qubit_state(rng)
            theta = rng.uniform(-np.pi, np.pi)
            rho_out, xi_out = collision_channel_closed_form(rho, xi, theta)
            validate_density_matrix(rho_out)
            validate_density_matrix(xi_out)


class TestCollideJoint:
    def test_identity_at_zero(self):
        joint = kron(KET0, PLUS, MIXED)
        np.testing.assert_allclose(collide_joint(joint, 0, 2, 0.0), joint, atol=1e-15)

    def test_marginals_match_closed_form(self):
        rng = np.random.default_rng(25)
        rho, xi = random_qubit_state(rng), random_qubit_state(rng)
        out = collide_joint(kron(rho, xi), 0, 1, 0.37)
        want_rho, want_xi = collision_channel_closed_form(rho, xi, 0.37)
        np.testing.assert_allclose(partial_trace(out, (2, 2), 0), want_rho, atol=1e-13)
        np.testing.assert_allclose(partial_trace(out, (2, 2), 1), want_xi, atol=1e-13)

    def test_full_swap_exchanges_wires(self):
        rho, xi, spectator = (random_qubit_state(np.random.default_rng(s)) for s in (1, 2, 3))
        out = collide_joint(kron(rho, xi, spectator), 0, 1, np.pi / 2)
        np.testing.assert_allclose(qubit_marginal(out, 3, 0), xi, atol=1e-13)
        np.testing.assert_allclose(qubit_marginal(out, 3, 1), rho, atol=1e-13)
        np.testing.assert_allclose(qubit_marginal(out, 3, 2), spectator, atol=1e-13)

    def test_acts_on_named_wires_only(self):
        rng = np.random.default_rng(26)
        states = [random_qubit_state(rng) for _ in range(4)]
        out = collide_joint(kron(*states), 1, 3, 0.5)
        np.testing.assert_allclose(qubit_marginal(out, 4, 0), states[0], atol=1e-13)
        np.testing.assert_allclose(qubit_marginal(out, 4, 2), states[2], atol=1e-13)
        want_rho, want_xi = collision_channel_closed_form(states[1], states[3], 0.5)
        np.testing.assert_allclose(qubit_marginal(out, 4, 1), want_rho, atol=1e-13)
        np.testing.assert_allclose(qubit_marginal(out, 4, 3), want_xi, atol=1e-13)

    def test_trace_preserved(self):
        joint = kron(PLUS, MIXED, KET1)
        out = collide_joint(joint, 0, 2, 1.0)
        assert abs(np.trace(out) - 1) < 1e-13

    def test_wire_errors(self):
        joint = kron(KET0, KET1)
        with pytest.raises(ValueError):
            collide_joint(joint, 0, 0, 0.3)
        with pytest.raises(ValueError):
            collide_joint(joint, 0, 2, 0.3)

    def test_qubit_cap(self):
        joint = kron(*([MIXED] * 3))
        with pytest.raises(ValueError, match="max_joint_qubits"):
            collide_joint(joint, 0, 1, 0.3, max_joint_qubits=2)


class TestCouplingSchedule:
    def test_fixed_mode(self):
        sched = CouplingSchedule.fixed(0.9)
        assert sched.sample(1) == sched.sample(100) == 0.9

    def test_uniform_deterministic_per_index(self):
        sched = CouplingSchedule.uniform(0.1, 0.5, seed=7)
        again = CouplingSchedule.uniform(0.1, 0.5, seed=7)
        draws = sched.thetas(20)
        np.testing.assert_array_equal(draws, again.thetas(20))
        assert np.all((draws >= 0.1) & (draws <= 0.5))
        assert len(np.unique(draws)) > 1

    def test_different_seeds_differ(self):
        a = CouplingSchedule.uniform(0, 1, seed=1).thetas(10)
        b = CouplingSchedule.uniform(0, 1, seed=2).thetas(10)
        assert not np.array_equal(a, b)

    def test_validation(self):
        with pytest.raises(ValueError):
            CouplingSchedule(mode="bogus")
        with pytest.raises(ValueError):
            CouplingSchedule.uniform(0.5, 0.1, seed=0)
        with pytest.raises(ValueError):
            CouplingSchedule.fixed(np.nan)


class TestHomogenizerConfig:
    def test_exact_joint_cap(self):
        with pytest.raises(ValueError, match="max_joint_qubits"):
            HomogenizerConfig(n_reservoir=12, xi=PLUS,
                              schedule=CouplingSchedule.fixed(0.3), mode="exact-joint")

    def test_xi_validated(self):
        with pytest.raises(InvalidStateError):
            HomogenizerConfig(n_reservoir=2, xi=np.eye(2),
                              schedule=CouplingSchedule.fixed(0.3))


class TestRunHomogenization:
    def test_zero_coupling_leaves_everything_invariant(self):
        config = HomogenizerConfig(n_reservoir=6, xi=PLUS, schedule=CouplingSchedule.fixed(0.0))
        traj = run_homogenization(KET0, config)
        assert len(traj) == 7
        for state in traj.input_states:
            np.testing.assert_allclose(state, KET0, atol=1e-15)
        assert np.ptp(traj.distances) == 0

    def test_full_swap_reaches_fidelity_one_in_one_step(self):
        config = HomogenizerConfig(n_reservoir=3, xi=PLUS,
                                   schedule=CouplingSchedule.fixed(np.pi / 2))
        traj = run_homogenization(KET0, config)
        assert traj.fidelities[1] > 1 - 1e-12
        assert traj.distances[1] < 1e-12

    def test_figure_curve_dominance_quarter_vs_sixth(self):
        # N = 5, rho0 = |0><0|, xi = |+><+|: the pi/4 curve dominates pi/6 pointwise
        curves = {}
        for theta in (np.pi / 4, np.pi / 6):
            config = HomogenizerConfig(n_reservoir=5, xi=PLUS,
                                       schedule=CouplingSchedule.fixed(theta))
            curves[theta] = run_homogenization(KET0, config).fidelities
        assert np.all(curves[np.pi / 4][1:] > curves[np.pi / 6][1:])
        # analytic values: f_k = 1 - cos(theta)^(2k) / 2 (Bloch-vector recursion)
        for theta, curve in curves.items():
            want = 1 - np.cos(theta) ** (2 * np.arange(6)) / 2
            np.testing.assert_allclose(curve, want, atol=1e-12)

    @pytest.mark.parametrize("mode", ["mean-field", "exact-joint"])
    def test_monotone_contraction(self, mode):
        config = HomogenizerConfig(
            n_reservoir=6, xi=PLUS, mode=mode,
            schedule=CouplingSchedule.uniform(np.pi / 8, 3 * np.pi / 8, seed=5))
        traj = run_homogenization(KET0, config)
        assert np.all(np.diff(traj.distances) <= 1e-12)

    def test_modes_agree_on_recorded_marginals(self):
        # one pass over fresh reservoir qubits: the joint evolution cannot
        # change the input marginal relative to the closed-form channel
        rng = np.random.default_rng(27)
        for seed in range(5):
            xi = random_qubit_state(rng)
            rho0 = random_qubit_state(rng)
            sched = CouplingSchedule.uniform(0.1, 1.2, seed=seed)
            trajs = [
                run_homogenization(rho0, HomogenizerConfig(
                    n_reservoir=5, xi=xi, schedule=sched, mode=mode))
                for mode in ("mean-field", "exact-joint")
            ]
            for a, b in zip(trajs[0].input_states, trajs[1].input_states):
                np.testing.assert_allclose(a, b, atol=1e-12)
            for a, b in zip(trajs[0].reservoir_states, trajs[1].reservoir_states):
                np.testing.assert_allclose(a, b, atol=1e-12)

    def test_thetas_recorded(self):
        sched = CouplingSchedule.uniform(0.2, 0.4, seed=9)
        config = HomogenizerConfig(n_reservoir=4, xi=PLUS, schedule=sched)
        traj = run_homogenization(KET0, config)
        assert np.isnan(traj.thetas[0])
        np.testing.assert_array_equal(traj.thetas[1:], sched.thetas(4))

    def test_fixed_point_preserved(self):
        config = HomogenizerConfig(n_reservoir=8, xi=PLUS,
                                   schedule=CouplingSchedule.uniform(0.1, 1.0, seed=3),
                                   mode="exact-joint")
        traj = run_homogenization(PLUS, config)
        for state in traj.input_states:
            assert l2_distance(state, PLUS) < 1e-12


class TestStochasticSwapChannel:
    def test_identity_branch(self):
        np.testing.assert_array_equal(stochastic_swap_channel(KET0, PLUS, 1.0), KET0)

    def test_swap_branch(self):
        np.testing.assert_array_equal(stochastic_swap_channel(KET0, PLUS, 0.0), PLUS)

    def test_matches_closed_form_for_commuting_states(self):
        rho = np.diag([0.7, 0.3]).astype(complex)
        xi = np.diag([0.2, 0.8]).astype(complex)
        theta = 0.6
        want, _ = collision_channel_closed_form(rho, xi, theta)
        got = stochastic_swap_channel(rho, xi, np.cos(theta) ** 2)
        np.testing.assert_allclose(got, want, atol=1e-14)

    def test_differs_for_noncommuting_witness(self):
        theta = np.pi / 4
        want, _ = collision_channel_closed_form(KET0, PLUS, theta)
        got = stochastic_swap_channel(KET0, PLUS, np.cos(theta) ** 2)
        assert l2_distance(got, want) > 1e-3

    def test_probability_range(self):
        with pytest.raises(ValueError):
            stochastic_swap_channel(KET0, PLUS, 1.5)


class TestAverageState:
    def test_single_state(self):
        np.testing.assert_array_equal(average_state([PLUS]), PLUS)

    def test_symmetric_pair(self):
        np.testing.assert_allclose(average_state([KET0, KET1]), MIXED, atol=1e-15)

    def test_trajectory_average_distance_decreases(self):
        config = HomogenizerConfig(n_reservoir=40, xi=PLUS,
                                   schedule=CouplingSchedule.fixed(np.pi / 4))
        traj = run_homogenization(KET0, config)
        dist = [l2_distance(average_state(traj.input_states[: n + 1]), PLUS)
                for n in range(1, 41)]
        assert np.all(np.diff(dist) < 0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            average_state([])
