# -*- coding:utf-8 -*-

import unittest

from fedcompare.constants import CENTRALIZED, DROP, FEDERATED
from fedcompare.exceptions import InvalidConfigurationError, InvalidInputError
from fedcompare.models import (ClientUpdate, EpochRecord, ParamVector,
                               RebalancePolicy, RoundConfig, TrainConfig,
                               TrainingRunRecord)


class TestTrainConfig(unittest.TestCase):
    def test_defaults(self):
        config = TrainConfig()
        self.assertEqual((config.epochs, config.batch_size, config.lr,
                          config.weight_decay), (10, 32, 1e-4, 1e-5))
        self.assertEqual(config.rebalance, RebalancePolicy())

    def test_invalid(self):
        for kwargs in ({'epochs': 0}, {'batch_size': 0}, {'lr': 0},
                       {'weight_decay': -1}, {'beta1': 1.0},
                       {'epsilon': 0}):
            with self.assertRaises(InvalidConfigurationError):
                TrainConfig(**kwargs)


class TestRoundConfig(unittest.TestCase):
    def test_budget(self):
        self.assertEqual(RoundConfig().epoch_budget, 10)
        self.assertEqual(RoundConfig(3, 4, DROP).epoch_budget, 12)

    def test_invalid(self):
        for kwargs in ({'rounds': 0}, {'local_epochs': 0},
                       {'failure_policy': 'retry'}, {'workers': 0}):
            with self.assertRaises(InvalidConfigurationError):
                RoundConfig(**kwargs)


class TestRebalancePolicy(unittest.TestCase):
    def test_regeneration_index(self):
        policy = RebalancePolicy(regenerate_every=2)
        self.assertEqual([policy.regeneration_index(e) for e in range(5)],
                         [0, 0, 1, 1, 2])


class TestRecords(unittest.TestCase):
    def test_update_needs_samples(self):
        params = ParamVector([0.0], [('w', (1,), 0)])
        with self.assertRaises(InvalidInputError):
            ClientUpdate(0, params, 0)

    def test_curve_rows(self):
        record = TrainingRunRecord(
            FEDERATED,
            curves={0: (EpochRecord(0, 1.0, 1.1, 0.5),)},
            pooled_curve=(EpochRecord(0, 0.9, 1.0, 0.6),))
        self.assertEqual([client for client, _ in record.curve_rows()],
                         [0, 'pooled'])

    def test_unknown_paradigm(self):
        with self.assertRaises(InvalidInputError):
            TrainingRunRecord('XX')
        self.assertEqual(TrainingRunRecord(CENTRALIZED).models, {})
