# -*- coding: utf-8 -*-

import json
import os
import unittest

import numpy as np

from fedcompare import kernel
from fedcompare.constants import MLP
from fedcompare.exceptions import NumericalError, ParseError, ShapeError
from fedcompare.models import Batch, OptimizerState, PredictorSpec

from .mocks import TemporaryDirectoryMixin


def numerical_gradient(params, spec, batch, eps=1e-6):
    grad = np.zeros(len(params))
    for i in range(len(params)):
        up = params.values.copy()
        down = params.values.copy()
        up[i] += eps
        down[i] -= eps
        loss_up, _ = kernel.loss_and_gradient(params.with_values(up), spec,
                                              batch)
        loss_down, _ = kernel.loss_and_gradient(params.with_values(down),
                                                spec, batch)
        grad[i] = (loss_up - loss_down) / (2 * eps)
    return grad


def random_batch(dim, n=12, seed=0):
    rng = np.random.default_rng(seed)
    return Batch(rng.standard_normal((n, dim)),
                 rng.integers(0, 2, size=n))


class TestInit(unittest.TestCase):
    def test_deterministic_and_bounded(self):
        spec = PredictorSpec(MLP, 4, (8, 3))
        params = kernel.init_params(spec, 5)

        self.assertEqual(params, kernel.init_params(spec, 5))
        self.assertNotEqual(params, kernel.init_params(spec, 6))
        self.assertEqual(len(params), spec.n_params)

        arrays = params.unflatten()
        self.assertTrue(np.all(arrays['hidden0.bias'] == 0.0))
        self.assertLessEqual(np.abs(arrays['hidden0.weight']).max(), 0.5)
        self.assertLessEqual(np.abs(arrays['output.weight']).max(),
                             kernel.OUTPUT_INIT_SCALE / np.sqrt(3))
        self.assertGreater(np.abs(arrays['output.weight']).max(), 0.0)


class TestGradient(unittest.TestCase):
    def check(self, spec, seed):
        rng = np.random.default_rng(seed)
        params = kernel.init_params(spec, seed)
        params = params.with_values(rng.normal(0.0, 0.5, size=len(params)))
        batch = random_batch(spec.input_dim, n=int(rng.integers(4, 33)),
                             seed=seed)
        _, grad = kernel.loss_and_gradient(params, spec, batch)

        expected = numerical_gradient(params, spec, batch)
        error = (np.linalg.norm(grad - expected) /
                 max(np.linalg.norm(expected), 1e-8))
        self.assertLess(error, 1e-5, 'seed {}'.format(seed))

    def test_logistic_gradient(self):
        for seed in range(25):
            self.check(PredictorSpec(input_dim=1 + seed % 9), seed)

    def test_mlp_gradient(self):
        for seed in range(25, 50):
            hidden = (2 + seed % 5,) + ((3,) if seed % 2 else ())
            self.check(PredictorSpec(MLP, 1 + seed % 6, hidden), seed)

    def test_backward_matches(self):
        spec = PredictorSpec(input_dim=2)
        params = kernel.init_params(spec, 0)
        batch = random_batch(2)
        np.testing.assert_array_equal(
            kernel.backward(params, spec, batch),
            kernel.loss_and_gradient(params, spec, batch)[1])

    def test_shape_mismatch(self):
        spec = PredictorSpec(input_dim=3)
        params = kernel.init_params(spec, 0)
        with self.assertRaises(ShapeError):
            kernel.forward_logits(params, spec, random_batch(2))


class TestLoss(unittest.TestCase):
    def test_extreme_logits_stay_finite(self):
        loss, grad = kernel.bce_with_logits([1000.0, -1000.0], [1, 0])
        self.assertTrue(np.isfinite(loss))
        self.assertAlmostEqual(loss, 0.0)
        self.assertTrue(np.all(np.isfinite(grad)))

        loss, _ = kernel.bce_with_logits([1000.0], [0])
        self.assertAlmostEqual(loss, 1000.0)

    def test_probabilities(self):
        spec = PredictorSpec(input_dim=2)
        params = kernel.init_params(spec, 1)
        proba = kernel.predict_proba(params, spec,
                                     np.random.default_rng(0).normal(
                                         size=(20, 2)))
        self.assertTrue(np.all((proba >= 0.0) & (proba <= 1.0)))


class TestAdamW(unittest.TestCase):
    def setUp(self):
        spec = PredictorSpec(input_dim=1)
        self.params = kernel.init_params(spec, 0).with_values([1.0, -2.0])
        self.state = OptimizerState.fresh(2, lr=0.1, weight_decay=0.01)

    def test_first_step(self):
        grad = np.array([0.5, -0.25])
        params, state = kernel.adamw_step(self.state, self.params, grad)

        w = np.array([1.0, -2.0])
        expected = w - 0.1 * grad / (np.abs(grad) + 1e-8) - 0.1 * 0.01 * w
        np.testing.assert_allclose(params.values, expected, rtol=1e-12)
        self.assertEqual(state.t, 1)
        self.assertEqual(self.state.t, 0)

    def test_first_step_reference_values(self):
        params = self.params.with_values([1.0, 1.0])
        state = OptimizerState.fresh(2, lr=1e-3, weight_decay=1e-2)
        params, _ = kernel.adamw_step(state, params, np.array([1.0, 1.0]))

        np.testing.assert_allclose(params.values, [0.998990, 0.998990],
                                   rtol=0, atol=1e-7)

    def test_non_finite_gradient(self):
        with self.assertRaises(NumericalError):
            kernel.adamw_step(self.state, self.params,
                              np.array([np.nan, 0.0]))

    def test_length_mismatch(self):
        with self.assertRaises(ShapeError):
            kernel.adamw_step(self.state, self.params, np.zeros(3))


class TestCheckpoint(TemporaryDirectoryMixin, unittest.TestCase):
    def setUp(self):
        super(TestCheckpoint, self).setUp()
        self.spec = PredictorSpec(MLP, 3, (4,))
        self.params = kernel.init_params(self.spec, 2)

    def test_reload_is_bit_exact(self):
        path = os.path.join(self.tmpdir, 'model.json')
        kernel.save_checkpoint(path, self.params, self.spec)
        params, spec = kernel.load_checkpoint(path)

        self.assertEqual(spec, self.spec)
        self.assertEqual(params.layout, self.params.layout)
        self.assertEqual(params.values.tobytes(),
                         self.params.values.tobytes())

    def test_invalid_checkpoints(self):
        with self.assertRaises(ParseError):
            kernel.loads_checkpoint('{not json')

        text = kernel.dumps_checkpoint(self.params, self.spec)
        with self.assertRaises(ParseError):
            kernel.loads_checkpoint(text.replace('"version": 1',
                                                 '"version": 99'))
        with self.assertRaises(ParseError):
            kernel.loads_checkpoint('{"version": 1}')

    def test_layout_must_match_spec(self):
        data = json.loads(kernel.dumps_checkpoint(self.params, self.spec))
        data['spec']['hidden_sizes'] = [5]
        with self.assertRaises(ParseError):
            kernel.loads_checkpoint(json.dumps(data))
