# -*- coding: utf-8 -*-

import json
import unittest

import numpy as np

from fedcompare import monitor
from fedcompare.constants import MEAN, MEDIAN, WORST_CASE
from fedcompare.evaluation import youden_at
from fedcompare.exceptions import (GridMismatchError, InvalidInputError,
                                   NotEnoughDataError)
from fedcompare.kernel import init_params, predict_proba
from fedcompare.models import (ClientUpdate, JCurve, OutlierPolicy,
                               ParamVector)

from .mocks.cohort import make_dataset, tiny_spec


LAYOUT = [('w', (2,), 0)]
ORIGIN = ParamVector([0.0, 0.0], LAYOUT)


def update(client_id, delta, accuracy=0.9, round_index=0):
    return ClientUpdate(client_id, ParamVector(delta, LAYOUT), 10,
                        train_loss=0.3, val_loss=0.4, val_accuracy=accuracy,
                        round_index=round_index)


def round_summary(round_index, bad_client=None, n_clients=8):
    updates = []
    for client_id in range(n_clients):
        if client_id == bad_client:
            updates.append(update(client_id, [-1.0, 0.0], 0.5, round_index))
        else:
            updates.append(update(client_id, [1.0, 0.0], 0.9, round_index))
    return monitor.summarize_round(ORIGIN, updates)


class TestSummaries(unittest.TestCase):
    def test_norms_and_cosines(self):
        summaries, matrix = monitor.summarize_round(ORIGIN, [
            update(2, [0.0, 1.0]), update(0, [1.0, 0.0]),
            update(1, [2.0, 0.0])])

        self.assertEqual([s.client_id for s in summaries], [0, 1, 2])
        self.assertEqual([s.update_norm for s in summaries], [1.0, 2.0, 1.0])
        self.assertEqual(matrix.client_ids, (0, 1, 2))
        np.testing.assert_allclose(matrix.values, [[1, 1, 0], [1, 1, 0],
                                                   [0, 0, 1]])

    def test_null_update(self):
        with self.assertLogs('fedcompare.monitor', 'WARNING'):
            _, matrix = monitor.summarize_round(ORIGIN, [
                update(0, [0.0, 0.0]), update(1, [1.0, 1.0])])

        self.assertEqual(matrix.zero_norm, (0,))
        self.assertEqual(matrix.values[0].tolist(), [0.0, 0.0])

    def test_norm_dispersion(self):
        history = [round_summary(0), round_summary(1)]
        dispersion = monitor.norm_dispersion(history)
        self.assertEqual(dispersion[0]['mean'], 1.0)
        self.assertEqual(dispersion[0]['variance'], 0.0)


class TestOutliers(unittest.TestCase):
    def test_opposite_client_is_flagged(self):
        history = [round_summary(r, bad_client=3) for r in range(3)]
        flags = monitor.flag_outlier_clients(history, OutlierPolicy())

        self.assertEqual([(f.client_id, f.reason) for f in flags],
                         [(3, monitor.LOW_SIMILARITY),
                          (3, monitor.LOW_ACCURACY)])
        self.assertTrue(all(f.score < -3.0 for f in flags))

    def test_homogeneous_clients_are_not_flagged(self):
        history = [round_summary(r) for r in range(3)]
        self.assertEqual(
            monitor.flag_outlier_clients(history, OutlierPolicy()), [])

    def test_not_enough_rounds_or_clients(self):
        with self.assertRaises(NotEnoughDataError):
            monitor.flag_outlier_clients([round_summary(0)], OutlierPolicy())
        with self.assertRaises(NotEnoughDataError):
            monitor.flag_outlier_clients(
                [round_summary(r, n_clients=2) for r in range(2)],
                OutlierPolicy())

    def test_robust_z(self):
        self.assertEqual(monitor.robust_z({'a': 1.0, 'b': 1.0}),
                         {'a': 0.0, 'b': 0.0})
        z = monitor.robust_z({'a': 0.0, 'b': 1.0, 'c': 2.0})
        self.assertAlmostEqual(z['c'], 1.0 / 1.4826)


def curve(client_id, j_values, version='v1'):
    return JCurve(client_id, version, [0.0, 0.5, 1.0], j_values)


class TestThresholds(unittest.TestCase):
    def setUp(self):
        self.curves = [curve(0, [0.2, 0.9, 0.3]),
                       curve(1, [0.3, 0.1, 0.4]),
                       curve(2, [0.3, 0.5, 0.35])]

    def test_rules(self):
        threshold, j = monitor.aggregate_thresholds(self.curves, MEAN)
        self.assertEqual(threshold, 0.5)
        self.assertAlmostEqual(j, 0.5)

        threshold, j = monitor.aggregate_thresholds(self.curves, MEDIAN)
        self.assertEqual(threshold, 0.5)
        self.assertAlmostEqual(j, 0.5)

        threshold, j = monitor.aggregate_thresholds(self.curves, WORST_CASE)
        self.assertEqual(threshold, 1.0)
        self.assertAlmostEqual(j, 0.3)

    def test_ties_pick_the_smallest_threshold(self):
        flat = [curve(0, [0.4, 0.4, 0.1]), curve(1, [0.4, 0.4, 0.1])]
        self.assertEqual(monitor.aggregate_thresholds(flat, MEAN)[0], 0.0)

    def test_grid_mismatch(self):
        with self.assertRaises(GridMismatchError):
            monitor.aggregate_thresholds(
                [curve(0, [0, 0, 0]), curve(1, [0, 0, 0], version='v2')],
                MEAN)

    def test_unknown_rule_and_no_curve(self):
        with self.assertRaises(InvalidInputError):
            monitor.aggregate_thresholds(self.curves, 'trimmed')
        with self.assertRaises(InvalidInputError):
            monitor.aggregate_thresholds([], MEAN)

    def test_j_curve_matches_youden(self):
        spec = tiny_spec()
        params = init_params(spec, 3)
        validation = make_dataset(10, 15)
        grid = monitor.default_grid(11)
        result = monitor.compute_j_curve(params, spec, validation, grid,
                                         client_id=4)

        expected = youden_at(predict_proba(params, spec,
                                           validation.features),
                             validation.labels, grid)
        np.testing.assert_array_equal(result.j_values, expected)
        self.assertEqual(result.grid_version, monitor.grid_id(grid))
        self.assertEqual(set(result.as_record()),
                         {'client_id', 'grid_version', 'j_values'})

    def test_grids(self):
        self.assertEqual(monitor.default_grid(1).tolist(), [0.5])
        self.assertNotEqual(monitor.grid_id(monitor.default_grid(11)),
                            monitor.grid_id(monitor.default_grid(21)))
        with self.assertRaises(InvalidInputError):
            monitor.default_grid(0)


class TestReport(unittest.TestCase):
    def test_report_is_json(self):
        history = [round_summary(r, bad_client=3) for r in range(2)]
        flags = monitor.flag_outlier_clients(history, OutlierPolicy())
        thresholds = {MEAN: (0.5, 0.4), WORST_CASE: (0.3, 0.1)}
        report = monitor.diagnostics_report(history, flags, thresholds,
                                            grid_version='v1')
        data = json.loads(monitor.dumps_report(report))

        self.assertEqual(len(data['rounds']), 2)
        self.assertEqual(list(data['thresholds']), [MEAN, WORST_CASE])
        self.assertEqual(data['flags'][0]['client_id'], 3)
        self.assertEqual(data['grid_version'], 'v1')
