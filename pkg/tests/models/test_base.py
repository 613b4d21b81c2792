# -*- coding:utf-8 -*-

import unittest

import numpy as np

from fedcompare.models import (ClientSpec, ModelDiff, PredictorSpec,
                               RebalancePolicy)
from fedcompare.models.base import Difference, same_value


class TestBaseModel(unittest.TestCase):
    def setUp(self):
        self.obj = ClientSpec(0, 650, 0.123, label_noise_rate=0.02)

    def tearDown(self):
        pass

    def test_fields_follow_the_slots(self):
        self.assertEqual(ClientSpec.fields(), [
            'client_id', 'n_total', 'overlap_fraction', 'feature_shift',
            'label_noise_rate', 'feature_shift_seed'])
        self.assertEqual(self.obj.as_dict()['n_total'], 650)

    def test_models_are_immutable(self):
        with self.assertRaises(AttributeError):
            self.obj.n_total = 10

    def test_replace(self):
        other = self.obj.replace(n_total=700)

        self.assertEqual(other.n_total, 700)
        self.assertEqual(self.obj.n_total, 650)
        with self.assertRaises(TypeError):
            self.obj.replace(size=3)

    def test_diff(self):
        other = self.obj.replace(n_total=700, label_noise_rate=0.1)
        diff = self.obj.diff(other)

        self.assertEqual(len(diff), 2)
        self.assertIn('n_total', diff)
        self.assertEqual(diff[0], Difference('n_total', 650, 700))
        self.assertEqual(diff.differing_fields(),
                         ['n_total', 'label_noise_rate'])

    def test_equality(self):
        self.assertEqual(self.obj, ClientSpec(0, 650, 0.123,
                                              label_noise_rate=0.02))
        self.assertNotEqual(self.obj, self.obj.replace(client_id=1))
        self.assertNotEqual(PredictorSpec(), RebalancePolicy())


class TestModelDiff(unittest.TestCase):
    def test_merge(self):
        diff = ModelDiff(('a', 1, 2), ('b', 3, 3))
        diff.merge(ModelDiff(('c', 'x', 'y')))

        self.assertEqual(diff.differing_fields(), ['a', 'c'])
        self.assertEqual(diff.as_list()[1], Difference('c', 'x', 'y'))

    def test_add_input(self):
        diff = ModelDiff()
        diff.add_input(('a', np.zeros(2), np.zeros(2)),
                       ('b', np.zeros(2), np.ones(2)))
        self.assertEqual(diff.differing_fields(), ['b'])

    def test_same_value(self):
        self.assertTrue(same_value({'a': (1, 2)}, {'a': [1, 2]}))
        self.assertFalse(same_value(np.zeros(2), [0.0, 0.0]))
        self.assertFalse(same_value(np.zeros(2, dtype=np.int64),
                                    np.zeros(2)))
