# -*- coding:utf-8 -*-

import unittest
from collections import OrderedDict

import numpy as np

from fedcompare.constants import MLP
from fedcompare.exceptions import (InvalidConfigurationError,
                                   InvalidInputError, LayoutMismatchError,
                                   ShapeError)
from fedcompare.models import (Batch, OptimizerState, ParamVector,
                               PredictorSpec)

from ..mocks.cohort import make_dataset


class TestPredictorSpec(unittest.TestCase):
    def test_logistic(self):
        spec = PredictorSpec(input_dim=16)
        self.assertEqual(list(spec.layers()), [('output', 16, 1)])
        self.assertEqual(spec.n_params, 17)

    def test_mlp(self):
        spec = PredictorSpec(MLP, 4, (8, 2))
        self.assertEqual(spec.n_params, 4 * 8 + 8 + 8 * 2 + 2 + 2 + 1)
        self.assertEqual([e.name for e in spec.layout()][:2],
                         ['hidden0.weight', 'hidden0.bias'])

    def test_invalid(self):
        for kwargs in ({'kind': 'forest'}, {'activation': 'tanh'},
                       {'input_dim': 0}, {'hidden_sizes': (4,)},
                       {'kind': MLP}, {'kind': MLP, 'hidden_sizes': (0,)}):
            with self.assertRaises(InvalidConfigurationError):
                PredictorSpec(**kwargs)


class TestParamVector(unittest.TestCase):
    def setUp(self):
        self.arrays = OrderedDict((('w', np.arange(6.0).reshape(2, 3)),
                                   ('b', np.array([7.0]))))
        self.params = ParamVector.flatten(self.arrays)

    def test_flatten_unflatten(self):
        self.assertEqual(self.params.values.tolist(),
                         [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 7.0])
        arrays = self.params.unflatten()
        self.assertEqual(list(arrays), ['w', 'b'])
        np.testing.assert_array_equal(arrays['w'], self.arrays['w'])

    def test_values_are_read_only(self):
        with self.assertRaises(ValueError):
            self.params.values[0] = 1.0

    def test_delta(self):
        other = self.params.with_values(np.ones(7))
        np.testing.assert_array_equal(self.params.delta(other),
                                      self.params.values - 1.0)
        with self.assertRaises(LayoutMismatchError):
            self.params.delta(ParamVector([1.0], [('b', (1,), 0)]))

    def test_validation(self):
        with self.assertRaises(ShapeError):
            ParamVector([1.0, 2.0], [('b', (1,), 0)])
        with self.assertRaises(InvalidInputError):
            ParamVector([np.inf], [('b', (1,), 0)])


class TestOptimizerState(unittest.TestCase):
    def test_fresh(self):
        state = OptimizerState.fresh(3, lr=0.01)
        self.assertEqual(state.t, 0)
        self.assertEqual(state.m.tolist(), [0.0, 0.0, 0.0])
        self.assertEqual(state.lr, 0.01)

    def test_invalid(self):
        with self.assertRaises(ShapeError):
            OptimizerState(np.zeros(2), np.zeros(3))
        with self.assertRaises(InvalidInputError):
            OptimizerState(np.zeros(1), -np.ones(1))


class TestBatch(unittest.TestCase):
    def test_from_dataset(self):
        dataset = make_dataset(2, 3)
        batch = Batch.from_dataset(dataset, [0, 4])
        self.assertEqual(len(batch), 2)
        self.assertEqual(batch.labels.tolist(), [1.0, 0.0])

    def test_shape(self):
        with self.assertRaises(ShapeError):
            Batch(np.zeros((3, 2)), np.zeros(2))
