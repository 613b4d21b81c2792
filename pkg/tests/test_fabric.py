# -*- coding: utf-8 -*-

import os
import unittest

import numpy as np

from fedcompare import fabric
from fedcompare.exceptions import (InvalidConfigurationError, ParseError,
                                   RebalanceInfeasibleError,
                                   StratificationInfeasibleError,
                                   ValidationInfeasibleError)
from fedcompare.models import ClientSpec, LabeledDataset, RebalancePolicy

from .mocks import TemporaryDirectoryMixin
from .mocks.cohort import make_dataset, tiny_layout, tiny_specs


class TestGenerateCohort(unittest.TestCase):
    def test_class_counts_follow_the_overlap_fraction(self):
        spec = ClientSpec(0, 650, 0.123, label_noise_rate=0.02)
        dataset = fabric.generate_cohort([spec], 16, seed=1)[0]

        self.assertEqual(len(dataset), 650)
        self.assertEqual(dataset.n_pos, 80)
        self.assertEqual(dataset.n_neg, 570)

    def test_capped_label_noise_warns(self):
        spec = ClientSpec(4, 20, 0.05, label_noise_rate=0.4)
        with self.assertLogs('fedcompare.fabric', 'WARNING') as logs:
            dataset = fabric.generate_cohort([spec], 4, seed=2)[4]

        self.assertIn('client 4: label noise capped at 1 swaps per class, '
                      '4 requested', logs.output[0])
        self.assertEqual(dataset.n_pos, 1)

    def test_same_seed_same_cohort(self):
        first = fabric.generate_cohort(tiny_specs(), 4, seed=3)
        second = fabric.generate_cohort(tiny_specs(), 4, seed=3)
        other = fabric.generate_cohort(tiny_specs(), 4, seed=4)

        self.assertEqual(list(first), list(second))
        for client_id in first:
            self.assertEqual(first[client_id], second[client_id])
        self.assertNotEqual(first[0], other[0])

    def test_ids_are_sequential_and_origins_tagged(self):
        cohort = fabric.generate_cohort(tiny_specs(3, 50), 2, seed=0)
        ids = np.concatenate([cohort[c].ids for c in cohort])

        np.testing.assert_array_equal(ids, np.arange(150))
        for client_id, dataset in cohort.items():
            self.assertTrue(np.all(dataset.origins == client_id))

    def test_feature_shift_moves_the_client(self):
        shift = (5.0, -5.0)
        plain = fabric.generate_cohort([ClientSpec(0, 200, 0.5)], 2, 0)[0]
        shifted = fabric.generate_cohort(
            [ClientSpec(0, 200, 0.5, feature_shift=shift)], 2, 0)[0]

        np.testing.assert_allclose(shifted.features - plain.features,
                                   np.tile(shift, (200, 1)))

    def test_invalid_cohorts(self):
        with self.assertRaises(InvalidConfigurationError):
            fabric.generate_cohort([], 4, 0)
        with self.assertRaises(InvalidConfigurationError):
            fabric.generate_cohort(tiny_specs(), 1, 0)
        with self.assertRaises(InvalidConfigurationError):
            fabric.generate_cohort([ClientSpec(0, 10, .5),
                                    ClientSpec(0, 10, .5)], 2, 0)
        with self.assertRaises(InvalidConfigurationError):
            fabric.generate_cohort(
                [ClientSpec(0, 10, .5, feature_shift=(1.0, 2.0, 3.0))], 2, 0)

    def test_shift_vector_is_confined(self):
        shift = fabric.shift_vector(9, 6, shift_dims=3, scale=2.0)
        self.assertEqual(shift[3:], (0.0, 0.0, 0.0))
        self.assertTrue(any(x != 0.0 for x in shift[:3]))


class TestTestSplit(unittest.TestCase):
    def test_per_class_counts_and_disjointness(self):
        pooled = make_dataset(72, 108)
        test, remainder = fabric.stratified_test_split(pooled, 0.1, seed=2)

        self.assertEqual(test.n_pos, 7)
        self.assertEqual(test.n_neg, 11)
        self.assertEqual(len(test) + len(remainder), len(pooled))
        self.assertFalse(set(test.ids.tolist()) & set(remainder.ids.tolist()))

    def test_tiny_class_is_infeasible(self):
        pooled = make_dataset(4, 100)
        with self.assertRaises(StratificationInfeasibleError):
            fabric.stratified_test_split(pooled, 0.1, seed=0)

    def test_unstratified_fallback(self):
        pooled = make_dataset(4, 100)
        test, _ = fabric.stratified_test_split(pooled, 0.1, seed=0,
                                               allow_unstratified=True)
        self.assertEqual(len(test), 10)


class TestValidationSplit(unittest.TestCase):
    def test_class_preserving_counts(self):
        remainder = {0: make_dataset(30, 60)}
        layout = fabric.per_client_validation_split(remainder, 0.1, seed=0)
        split = layout[0]

        self.assertEqual(split.validation.n_neg, 7)
        self.assertEqual(split.validation.n_pos, 3)
        self.assertEqual(len(split.train), 80)

    def test_floor_keeps_one_of_each_class(self):
        layout = fabric.per_client_validation_split(
            {0: make_dataset(2, 40)}, 0.1, seed=0)
        self.assertEqual(layout[0].validation.n_pos, 1)
        self.assertEqual(layout[0].train.n_pos, 1)

    def test_single_positive_is_infeasible(self):
        with self.assertRaises(ValidationInfeasibleError):
            fabric.per_client_validation_split({0: make_dataset(1, 40)},
                                               0.1, seed=0)

    def test_protocol_conserves_examples(self):
        layout = tiny_layout(n_clients=3, n_total=60)
        seen = list(layout.test.ids)
        for client_id in layout.client_ids:
            split = layout[client_id]
            self.assertTrue(np.all(split.train.origins == client_id))
            self.assertTrue(np.all(split.validation.origins == client_id))
            seen.extend(split.train.ids)
            seen.extend(split.validation.ids)

        self.assertEqual(sorted(seen), list(range(180)))

    def test_protocol_is_deterministic(self):
        first = tiny_layout(seed=4)
        second = tiny_layout(seed=4)
        self.assertEqual([d.fingerprint for _, d in first.parts()],
                         [d.fingerprint for _, d in second.parts()])


class TestRebalance(unittest.TestCase):
    def setUp(self):
        self.train = make_dataset(80, 570, dim=3)
        self.policy = RebalancePolicy(regenerate_every=2, jitter_scale=0.1)

    def test_minority_reaches_the_majority(self):
        balanced = fabric.rebalance_minority(self.train, self.policy, 0, 1)

        self.assertEqual(balanced.n_pos, 570)
        self.assertEqual(balanced.n_neg, 570)
        self.assertEqual(balanced.take(np.arange(650)), self.train)

    def test_regeneration_window(self):
        epoch0 = fabric.rebalance_minority(self.train, self.policy, 0, 1)
        epoch1 = fabric.rebalance_minority(self.train, self.policy, 1, 1)
        epoch2 = fabric.rebalance_minority(self.train, self.policy, 2, 1)

        self.assertEqual(epoch0, epoch1)
        self.assertNotEqual(epoch0, epoch2)

    def test_added_examples_stay_close_to_their_source(self):
        balanced = fabric.rebalance_minority(self.train, self.policy, 0, 1)
        added = balanced.take(np.arange(650, 1140))
        by_id = dict((int(i), row) for i, row in
                     zip(self.train.ids, self.train.features))

        self.assertTrue(np.all(added.labels == 1))
        for example in added:
            offset = example.features - by_id[example.id]
            self.assertLess(np.abs(offset).max(), 1.0)

    def test_disabled_and_balanced_pass_through(self):
        disabled = RebalancePolicy(enabled=False)
        self.assertIs(fabric.rebalance_minority(self.train, disabled, 0, 1),
                      self.train)

        even = make_dataset(10, 10)
        self.assertIs(fabric.rebalance_minority(even, self.policy, 0, 1),
                      even)

    def test_single_class_is_infeasible(self):
        with self.assertRaises(RebalanceInfeasibleError):
            fabric.rebalance_minority(make_dataset(0, 10), self.policy, 0, 1)


class TestFiles(TemporaryDirectoryMixin, unittest.TestCase):
    def write(self, name, text):
        path = os.path.join(self.tmpdir, name)
        with open(path, 'w') as stream:
            stream.write(text)
        return path

    def test_load_scores_with_header(self):
        path = self.write('model_a.csv', 'score,label\n0.2,0\n0.9,1\n')
        scores, labels, tag = fabric.load_predictions(path)

        np.testing.assert_array_equal(scores, [0.2, 0.9])
        np.testing.assert_array_equal(labels, [0, 1])
        self.assertEqual(tag, 'model_a')

    def test_load_logits(self):
        path = self.write('logits.csv', 'logit,label\n0.0,0\n')
        scores, _, _ = fabric.load_predictions(path)
        self.assertEqual(scores[0], 0.5)

    def test_parse_errors_carry_the_line(self):
        path = self.write('bad.csv', 'score,label\n0.2,0\n0.3,2\n')
        with self.assertRaises(ParseError) as ctx:
            fabric.load_predictions(path)
        self.assertEqual(ctx.exception.kind, 'line 3')

        path = self.write('bad2.csv', '0.2,0\nabc,1\n')
        with self.assertRaises(ParseError) as ctx:
            fabric.load_predictions(path)
        self.assertEqual(ctx.exception.kind, 'line 2')

    def test_out_of_range_and_empty(self):
        with self.assertRaises(ParseError):
            fabric.load_predictions(self.write('range.csv', '1.5,1\n'))
        with self.assertRaises(ParseError):
            fabric.load_predictions(self.write('empty.csv', ''))

    def test_out_of_range_reports_the_file_line(self):
        path = self.write('gaps.csv', 'score,label\n0.2,0\n\n0.4,1\n1.5,0\n')
        with self.assertRaises(ParseError) as ctx:
            fabric.load_predictions(path)
        self.assertEqual(ctx.exception.kind, 'line 5')
        self.assertEqual(ctx.exception.details, '1.5')

    def test_dataset_file_is_exact(self):
        dataset = make_dataset(5, 7, dim=3, seed=8, origin=2, start_id=40)
        path = os.path.join(self.tmpdir, 'client.csv')
        fabric.write_dataset(path, dataset)

        self.assertEqual(fabric.read_dataset(path), dataset)

    def test_read_dataset_rejects_bad_header(self):
        with self.assertRaises(ParseError):
            fabric.read_dataset(self.write('x.csv', 'a,b,c\n'))


class TestLabeledDataset(unittest.TestCase):
    def test_counts_and_views(self):
        dataset = make_dataset(3, 5, dim=2)
        self.assertEqual((dataset.n_pos, dataset.n_neg, dataset.dim),
                         (3, 5, 2))
        self.assertEqual(len(list(dataset)), 8)
        self.assertEqual(len(dataset.where(dataset.labels == 1)), 3)

    def test_arrays_are_read_only(self):
        dataset = make_dataset(3, 5)
        with self.assertRaises(ValueError):
            dataset.features[0, 0] = 1.0

    def test_concat_keeps_order(self):
        first = make_dataset(2, 2, origin=0)
        second = make_dataset(1, 1, origin=1, start_id=4)
        joined = LabeledDataset.concat([first, second])

        self.assertEqual(list(joined.ids), [0, 1, 2, 3, 4, 5])
        self.assertEqual(list(joined.by_origin()), [0, 1])
