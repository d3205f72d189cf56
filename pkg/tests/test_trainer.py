"""State construction, full sweeps, the objective, and prediction."""

import numpy as np
import pytest

from admmnet.admm import (
    ActivationKind,
    DirectSolver,
    HyperParams,
    LsmrSolver,
    NetworkState,
    accuracy,
    evaluate_lagrangian,
    init_state,
    predict,
    relu,
    train_admm,
    train_iteration,
)

RELU = ActivationKind.RELU


def hp_for(n_layers, **kw):
    return HyperParams.uniform(n_layers, **kw)


class TestHyperParams:
    def test_uniform_expansion(self):
        hp = hp_for(3, gamma=10.0, beta=1.0)
        assert hp.gamma == (10.0, 10.0)
        assert hp.beta == (1.0, 1.0, 1.0)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            HyperParams(gamma=(10.0,), beta=(1.0,))

    def test_nonpositive_penalty_rejected(self):
        with pytest.raises(ValueError):
            HyperParams(gamma=(0.0,), beta=(1.0, 1.0))
        with pytest.raises(ValueError):
            HyperParams(gamma=(1.0,), beta=(1.0, -2.0))


class TestInitState:
    def test_determinism(self):
        data = np.random.default_rng(0).normal(size=(4, 10))
        hp = hp_for(2, seed=11)
        s1 = init_state([4, 6, 3], data, hp)
        s2 = init_state([4, 6, 3], data, hp)
        for a, b in zip(s1.weights, s2.weights):
            assert np.array_equal(a, b)
        for a, b in zip(s1.preactivations, s2.preactivations):
            assert np.array_equal(a, b)

    def test_multiplier_starts_at_zero(self):
        data = np.ones((4, 5))
        state = init_state([4, 8, 3], data, hp_for(2, seed=0))
        assert np.array_equal(state.lam, np.zeros((3, 5)))

    def test_shapes(self):
        data = np.zeros((4, 100))
        state = init_state([4, 8, 3], data, hp_for(2, seed=0))
        assert state.weights[0].shape == (8, 4)
        assert state.weights[1].shape == (3, 8)
        assert state.preactivations[0].shape == (8, 100)
        assert state.preactivations[1].shape == (3, 100)
        assert state.activations[0] is not None and state.n_samples == 100

    def test_input_is_first_activation(self):
        data = np.random.default_rng(1).normal(size=(3, 7))
        state = init_state([3, 5, 2], data, hp_for(2, seed=0))
        assert np.array_equal(state.activations[0], data)

    def test_empty_inputs_rejected(self):
        hp = hp_for(2, seed=0)
        with pytest.raises(ValueError):
            init_state([4, 8, 3], np.empty((4, 0)), hp)
        with pytest.raises(ValueError):
            init_state([4], np.ones((4, 3)), hp)


def scalar_state():
    """One-layer 1x1 network with every variable pinned by hand."""
    return NetworkState(
        dims=(1, 1),
        weights=[np.array([[0.5]])],
        activations=[np.array([[2.0]])],
        preactivations=[np.array([[0.3]])],
        lam=np.array([[0.2]]),
    )


class TestEvaluateLagrangian:
    def test_perfect_fit_is_zero(self):
        # consistent variables, exact targets, zero multiplier
        w = np.array([[1.0, 0.0], [0.0, 1.0]])
        x0 = np.array([[1.0, 2.0], [3.0, 4.0]])
        state = NetworkState(
            dims=(2, 2),
            weights=[w],
            activations=[x0],
            preactivations=[x0.copy()],
            lam=np.zeros((2, 2)),
        )
        hp = hp_for(1, beta=1.0)
        assert evaluate_lagrangian(state, x0, hp) == pytest.approx(0.0, abs=1e-15)

    def test_hand_scalar_value(self):
        # loss (0.3-1)^2 + penalty (0.3-1)^2 + multiplier 0.2*(0.3-1)
        hp = hp_for(1, beta=1.0)
        value = evaluate_lagrangian(scalar_state(), np.array([[1.0]]), hp)
        assert value == pytest.approx(0.49 + 0.49 - 0.14, rel=1e-12)

    def test_linear_in_multiplier(self):
        rng = np.random.default_rng(2)
        data = rng.normal(size=(3, 6))
        y = rng.normal(size=(2, 6))
        hp = hp_for(2, seed=4)
        state = init_state([3, 4, 2], data, hp)
        residual = state.preactivations[-1] - state.weights[-1] @ state.activations[-1]
        base = evaluate_lagrangian(state, y, hp)
        c = 0.37
        shifted = NetworkState(
            dims=state.dims,
            weights=state.weights,
            activations=state.activations,
            preactivations=state.preactivations,
            lam=state.lam + c,
        )
        got = evaluate_lagrangian(shifted, y, hp)
        assert got - base == pytest.approx(c * residual.sum(), rel=1e-9)


class TestTrainIteration:
    def test_scalar_hand_trace(self):
        # weight: 0.3*2/4; output: (2*1 + 2*0.3 - 0.2)/4; multiplier ascent
        hp = hp_for(1, beta=1.0)
        after = train_iteration(scalar_state(), np.array([[1.0]]), hp)
        assert after.weights[0][0, 0] == pytest.approx(0.15, rel=1e-12)
        assert after.preactivations[0][0, 0] == pytest.approx(0.6, rel=1e-12)
        assert after.lam[0, 0] == pytest.approx(0.5, rel=1e-12)

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        data = rng.normal(size=(3, 12))
        y = np.eye(2)[:, rng.integers(0, 2, 12)]
        hp = hp_for(2, seed=5)
        state = init_state([3, 4, 2], data, hp)
        a = train_iteration(state, y, hp)
        b = train_iteration(state, y, hp)
        for u, v in zip(a.weights, b.weights):
            assert np.array_equal(u, v)
        assert np.array_equal(a.lam, b.lam)

    def test_input_state_not_mutated(self):
        rng = np.random.default_rng(4)
        data = rng.normal(size=(3, 10))
        y = np.eye(2)[:, rng.integers(0, 2, 10)]
        hp = hp_for(2, seed=6)
        state = init_state([3, 4, 2], data, hp)
        snapshot = [w.copy() for w in state.weights]
        z_snapshot = [z.copy() for z in state.preactivations]
        train_iteration(state, y, hp)
        for u, v in zip(state.weights, snapshot):
            assert np.array_equal(u, v)
        for u, v in zip(state.preactivations, z_snapshot):
            assert np.array_equal(u, v)

    def test_consistent_data_drives_residual_down(self):
        # targets exactly representable by a 2-layer ReLU network
        rng = np.random.default_rng(7)
        w1 = rng.normal(size=(3, 2))
        w2 = rng.normal(size=(2, 3))
        x0 = rng.normal(size=(2, 8))
        y = w2 @ relu(w1 @ x0)
        hp = hp_for(2, gamma=10.0, beta=10.0, seed=0)
        state = init_state([2, 3, 2], x0, hp)
        for _ in range(20):
            state = train_iteration(state, y, hp)
        assert state.constraint_residual() < 1e-3

    def test_prediction_consistent_with_output_variable(self):
        # once the sweeps have converged, recomputing the output by a plain
        # forward pass reproduces the trained output variable
        rng = np.random.default_rng(7)
        w1 = rng.normal(size=(3, 2))
        w2 = rng.normal(size=(2, 3))
        x0 = rng.normal(size=(2, 8))
        y = w2 @ relu(w1 @ x0)
        hp = hp_for(2, gamma=10.0, beta=10.0, seed=0)
        state = init_state([2, 3, 2], x0, hp)
        for _ in range(200):
            state = train_iteration(state, y, hp)
        out = predict(state.weights, x0, RELU)
        z_last = state.preactivations[-1]
        assert np.linalg.norm(out - z_last) <= 0.01 * np.linalg.norm(z_last)


class TestPredict:
    def test_single_layer_identity(self):
        x = np.random.default_rng(9).normal(size=(3, 5))
        assert np.array_equal(predict([np.eye(3)], x, RELU), x)

    def test_relu_kills_negative_path(self):
        # every first-layer pre-activation negative, no biases: output zero
        w1 = -np.ones((4, 2))
        w2 = np.ones((2, 4))
        x = np.ones((2, 6))
        assert np.array_equal(predict([w1, w2], x, RELU), np.zeros((2, 6)))


class TestAccuracy:
    def test_one_hot_scores(self):
        labels = np.array([0, 2, 1])
        scores = np.eye(3)[:, labels]
        assert accuracy(scores, labels) == 1.0

    def test_anti_scores(self):
        labels = np.array([0, 1, 0])
        scores = -np.eye(2)[:, labels]
        assert accuracy(scores, labels) == 0.0

    def test_counting(self):
        scores = np.array(
            [[1.0, 0.0, 1.0, 1.0], [0.0, 1.0, 0.0, 0.0]]
        )
        labels = np.array([0, 1, 0, 1])
        assert accuracy(scores, labels) == 0.75

    def test_tie_goes_to_lowest_row(self):
        scores = np.array([[0.5], [0.5]])
        assert accuracy(scores, np.array([0])) == 1.0
        assert accuracy(scores, np.array([1])) == 0.0


class TestTrainAdmm:
    @pytest.mark.parametrize(
        "solver", [DirectSolver(), LsmrSolver()], ids=lambda s: type(s).__name__
    )
    def test_full_run_is_deterministic(self, solver):
        rng = np.random.default_rng(10)
        data = rng.normal(size=(4, 30))
        labels = rng.integers(0, 3, 30)
        one_hot = np.eye(3)[:, labels]
        hp = hp_for(2, seed=21, admm_iters=5, solver=solver)
        _, r1 = train_admm(data, one_hot, labels, [4, 6, 3], hp)
        _, r2 = train_admm(data, one_hot, labels, [4, 6, 3], hp)
        assert r1.lagrangian == r2.lagrangian
        assert r1.train_accuracy == r2.train_accuracy
        assert r1.constraint_residual == r2.constraint_residual

    def test_report_lengths_match_iterations(self):
        rng = np.random.default_rng(11)
        data = rng.normal(size=(3, 20))
        labels = rng.integers(0, 2, 20)
        one_hot = np.eye(2)[:, labels]
        hp = hp_for(2, seed=1, admm_iters=7)
        _, report = train_admm(
            data, one_hot, labels, [3, 5, 2], hp, test_data=data, test_labels=labels
        )
        assert len(report.lagrangian) == 7
        assert len(report.train_accuracy) == 7
        assert len(report.constraint_residual) == 7
        assert 0.0 <= report.test_accuracy <= 1.0
