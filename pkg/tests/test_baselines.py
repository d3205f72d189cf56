"""Backprop baselines: forward/backward correctness, optimizer steps,
and the mini-batch training loop."""

import numpy as np
import pytest

from admmnet.admm import ActivationKind, init_state, HyperParams, predict
from admmnet.baselines import (
    AdamConfig,
    SgdConfig,
    adam_step,
    backward,
    forward_cache,
    init_mlp,
    mean_squared_loss,
    sgd_step,
    train_baseline,
)


def toy_state(dims, seed=0, optimizer=None):
    return init_mlp(dims, optimizer or SgdConfig(), seed=seed)


class TestForward:
    def test_identity_single_layer(self):
        state = toy_state([3, 3])
        state = state.__class__(
            dims=state.dims, weights=[np.eye(3)], optimizer=state.optimizer
        )
        x = np.random.default_rng(0).normal(size=(3, 4))
        out, caches = forward_cache(state, x)
        assert np.array_equal(out, x)
        assert len(caches) == 1

    def test_zero_weights_zero_output(self):
        state = toy_state([4, 5, 2])
        state = state.__class__(
            dims=state.dims,
            weights=[np.zeros_like(w) for w in state.weights],
            optimizer=state.optimizer,
        )
        out, _ = forward_cache(state, np.ones((4, 3)))
        assert np.array_equal(out, np.zeros((2, 3)))

    def test_matches_admm_predict_bitwise(self):
        state = toy_state([4, 6, 3], seed=9)
        x = np.random.default_rng(1).normal(size=(4, 11))
        out, _ = forward_cache(state, x)
        assert np.array_equal(out, predict(state.weights, x, ActivationKind.RELU))

    def test_shared_init_with_alternating_trainer(self):
        # both trainers draw weights from the same child streams of the seed
        data = np.random.default_rng(2).normal(size=(4, 9))
        hp = HyperParams.uniform(2, seed=33)
        admm_state = init_state([4, 6, 3], data, hp)
        mlp = init_mlp([4, 6, 3], SgdConfig(), seed=33)
        for a, b in zip(admm_state.weights, mlp.weights):
            assert np.array_equal(a, b)


class TestBackward:
    def test_zero_residual_means_zero_gradients(self):
        state = toy_state([3, 4, 2], seed=3)
        x = np.random.default_rng(4).normal(size=(3, 6))
        out, caches = forward_cache(state, x)
        grads = backward(state, caches, out)
        for g in grads:
            np.testing.assert_allclose(g, 0.0, atol=1e-15)

    def test_scalar_hand_gradient(self):
        # single sample, 1x1 net: d/dw (wx - y)^2 = 2 (wx - y) x
        state = toy_state([1, 1])
        w = 0.7
        state = state.__class__(
            dims=state.dims, weights=[np.array([[w]])], optimizer=state.optimizer
        )
        x = np.array([[2.0]])
        y = np.array([[1.0]])
        _, caches = forward_cache(state, x)
        (grad,) = backward(state, caches, y)
        assert grad[0, 0] == pytest.approx(2 * (w * 2.0 - 1.0) * 2.0, rel=1e-12)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        state = toy_state([3, 4, 2], seed=6)
        x = rng.normal(size=(3, 5)) + 0.5
        y = rng.normal(size=(2, 5))
        _, caches = forward_cache(state, x)
        grads = backward(state, caches, y)
        h = 1e-6
        for li, w in enumerate(state.weights):
            for idx in [(0, 0), (w.shape[0] - 1, w.shape[1] - 1)]:
                bumped = [u.copy() for u in state.weights]
                bumped[li][idx] += h
                up = mean_squared_loss(
                    predict(bumped, x, ActivationKind.RELU), y
                )
                bumped[li][idx] -= 2 * h
                down = mean_squared_loss(
                    predict(bumped, x, ActivationKind.RELU), y
                )
                numeric = (up - down) / (2 * h)
                assert grads[li][idx] == pytest.approx(numeric, rel=1e-4, abs=1e-8)


class TestLoss:
    def test_mean_convention(self):
        out = np.array([[1.0, 3.0]])
        y = np.array([[0.0, 1.0]])
        assert mean_squared_loss(out, y) == pytest.approx((1.0 + 4.0) / 2.0)


class TestSgdStep:
    def test_zero_gradients_fixed_point(self):
        state = toy_state([2, 2], optimizer=SgdConfig(lr=0.1))
        after = sgd_step(state, [np.zeros((2, 2))])
        assert np.array_equal(after.weights[0], state.weights[0])

    def test_hand_step(self):
        state = toy_state([1, 1], optimizer=SgdConfig(lr=0.1))
        state = state.__class__(
            dims=state.dims, weights=[np.array([[1.0]])], optimizer=state.optimizer
        )
        after = sgd_step(state, [np.array([[1.0]])])
        assert after.weights[0][0, 0] == pytest.approx(0.9, rel=1e-12)

    def test_steps_compose_additively(self):
        state = toy_state([1, 1], optimizer=SgdConfig(lr=0.05))
        g = [np.array([[2.0]])]
        twice = sgd_step(sgd_step(state, g), g)
        want = state.weights[0][0, 0] - 2 * 0.05 * 2.0
        assert twice.weights[0][0, 0] == pytest.approx(want, rel=1e-12)


class TestAdamStep:
    def test_defaults(self):
        cfg = AdamConfig()
        assert (cfg.lr, cfg.beta1, cfg.beta2, cfg.eps) == (1e-3, 0.9, 0.999, 1e-8)

    def test_first_step_magnitude_is_learning_rate(self):
        state = toy_state([1, 1], optimizer=AdamConfig())
        g = [np.array([[5.0]])]
        after = adam_step(state, g)
        delta = after.weights[0][0, 0] - state.weights[0][0, 0]
        assert abs(delta + 1e-3) <= 1e-3 * 1e-3

    def test_zero_gradients_forever_fixed(self):
        state = toy_state([2, 2], optimizer=AdamConfig())
        g = [np.zeros((2, 2))]
        for _ in range(5):
            after = adam_step(state, g)
            assert np.array_equal(after.weights[0], state.weights[0])
            state = after

    def test_degenerate_betas_reduce_to_sign_step(self):
        # beta1 = beta2 = 0 gives m = g, v = g*g: a signed fixed-size step
        state = toy_state([1, 1], optimizer=AdamConfig(lr=0.01, beta1=0.0, beta2=0.0))
        g = [np.array([[2.0]])]
        after = adam_step(state, g)
        delta = after.weights[0][0, 0] - state.weights[0][0, 0]
        assert abs(delta - (-0.01)) <= 1e-6

    def test_step_count_increments(self):
        state = toy_state([2, 2], optimizer=AdamConfig())
        after = adam_step(state, [np.ones((2, 2))])
        assert after.step_count == state.step_count + 1


def separable_toy():
    rng = np.random.default_rng(12)
    n = 30
    x = np.hstack(
        [rng.normal(size=(2, n)) + 4.0, rng.normal(size=(2, n)) - 4.0]
    )
    labels = np.array([0] * n + [1] * n)
    one_hot = np.eye(2)[:, labels]
    return x, one_hot, labels


class TestTrainBaseline:
    def test_separable_reaches_full_accuracy(self):
        x, one_hot, labels = separable_toy()
        _, trace = train_baseline(
            x, one_hot, labels, [2, 4, 2], AdamConfig(), epochs=200, seed=0
        )
        assert trace[-1] == 1.0

    def test_same_seed_same_trace(self):
        x, one_hot, labels = separable_toy()
        _, t1 = train_baseline(
            x, one_hot, labels, [2, 4, 2], SgdConfig(), epochs=10, seed=5
        )
        _, t2 = train_baseline(
            x, one_hot, labels, [2, 4, 2], SgdConfig(), epochs=10, seed=5
        )
        assert t1 == t2

    def test_zero_epochs_returns_initial_weights(self):
        x, one_hot, labels = separable_toy()
        weights, trace = train_baseline(
            x, one_hot, labels, [2, 4, 2], SgdConfig(), epochs=0, seed=7
        )
        init = init_mlp([2, 4, 2], SgdConfig(), seed=7)
        assert trace == []
        for a, b in zip(weights, init.weights):
            assert np.array_equal(a, b)

    def test_large_batch_clamped_to_full_batch(self):
        x, one_hot, labels = separable_toy()
        a, _ = train_baseline(
            x, one_hot, labels, [2, 3, 2], SgdConfig(), epochs=3, batch_size=10**6,
            seed=1,
        )
        b, _ = train_baseline(
            x, one_hot, labels, [2, 3, 2], SgdConfig(), epochs=3, batch_size=60,
            seed=1,
        )
        for u, v in zip(a, b):
            assert np.array_equal(u, v)

    def test_epoch_log_side_channel(self):
        x, one_hot, labels = separable_toy()
        log = []
        _, trace = train_baseline(
            x, one_hot, labels, [2, 4, 2], AdamConfig(), epochs=4, seed=2,
            epoch_log=log,
        )
        assert len(log) == 4
        assert [e["accuracy"] for e in log] == trace
        assert all(e["loss"] >= 0.0 for e in log)

    def test_negative_epochs_rejected(self):
        x, one_hot, labels = separable_toy()
        with pytest.raises(ValueError):
            train_baseline(x, one_hot, labels, [2, 4, 2], SgdConfig(), epochs=-1)
