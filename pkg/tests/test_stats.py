# -*- coding: utf-8 -*-

import itertools
import os
import unittest
from collections import OrderedDict

import numpy as np
from hypothesis import assume, given, settings, strategies as st

from fedcompare import stats
from fedcompare.constants import (CENTRALIZED, DELONG, FEDERATED, LINEAR,
                                  LOCAL, PAIRED, PRIMARY, QUADRATIC,
                                  ROBUSTNESS, UNWEIGHTED, WILCOXON)
from fedcompare.evaluation import auc_score, two_level_evaluate
from fedcompare.exceptions import (InvalidInputError, NoInformationError,
                                   NotEnoughDataError, ParseError, PlanError)
from fedcompare.kernel import init_params
from fedcompare.models import PairedAucSamples, RaterLabels, TestResult

from .mocks import TemporaryDirectoryMixin
from .mocks.cohort import tiny_layout, tiny_spec


def mid_ranks(values):
    ordered = sorted(values)
    ranks = []
    for value in values:
        below = sum(1 for v in ordered if v < value)
        equal = sum(1 for v in ordered if v == value)
        ranks.append(below + (equal + 1) / 2.0)
    return ranks


def enumerated_p_value(differences):
    nonzero = [d for d in differences if d != 0.0]
    ranks = mid_ranks([abs(d) for d in nonzero])
    w_plus = sum(r for r, d in zip(ranks, nonzero) if d > 0)
    w_minus = sum(r for r, d in zip(ranks, nonzero) if d < 0)
    w = min(w_plus, w_minus)

    count = 0
    for signs in itertools.product((0, 1), repeat=len(ranks)):
        if sum(r for r, s in zip(ranks, signs) if s) <= w:
            count += 1
    return w, min(1.0, 2.0 * count / 2 ** len(ranks))


def delong_by_definition(scores_a, scores_b, labels):
    labels = np.asarray(labels)

    v10, v01, aucs = [], [], []
    for scores in (np.asarray(scores_a), np.asarray(scores_b)):
        pos, neg = scores[labels == 1], scores[labels == 0]
        psi = ((pos[:, None] > neg[None, :]) +
               0.5 * (pos[:, None] == neg[None, :]))
        v10.append(psi.mean(axis=1))
        v01.append(psi.mean(axis=0))
        aucs.append(np.mean(v10[-1]))

    s = (np.cov(np.asarray(v10)) / len(v10[0]) +
         np.cov(np.asarray(v01)) / len(v01[0]))
    variance = s[0, 0] + s[1, 1] - 2 * s[0, 1]
    return (aucs[0] - aucs[1]) / np.sqrt(variance)


def correlated_scores(seed, m=8, n=10, decimals=None):
    rng = np.random.default_rng(seed)
    labels = np.array([1] * m + [0] * n)
    base = rng.normal(size=m + n) + labels
    a = base + 0.5 * rng.normal(size=m + n)
    b = base + 0.5 * rng.normal(size=m + n)
    if decimals is not None:
        a, b = np.round(a, decimals), np.round(b, decimals)
    return a, b, labels


class TestWilcoxon(unittest.TestCase):
    def test_all_positive_differences(self):
        pairs = PairedAucSamples(range(8), [0.9] * 8, [0.8] * 8)
        result = stats.wilcoxon_signed_rank(pairs)

        self.assertEqual(result.p_value, 0.0078125)
        self.assertEqual(result.statistic, 0.0)
        self.assertEqual(result.test_name, WILCOXON)
        self.assertTrue(result.significant)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(min_value=-4, max_value=4), min_size=2,
                    max_size=12))
    def test_exact_p_value_matches_enumeration(self, steps):
        pairs = PairedAucSamples(range(len(steps)),
                                 [0.5 + s / 10.0 for s in steps],
                                 [0.5] * len(steps))
        differences = pairs.differences().tolist()
        assume(sum(1 for d in differences if d != 0.0) >= 2)

        result = stats.wilcoxon_signed_rank(pairs, method=stats.EXACT)
        w, p_value = enumerated_p_value(differences)
        self.assertEqual(result.statistic, w)
        self.assertEqual(result.p_value, p_value)

    def test_normal_approximation(self):
        rng = np.random.default_rng(0)
        a = np.clip(0.7 + rng.normal(0, 0.05, 30), 0, 1)
        b = np.clip(0.6 + rng.normal(0, 0.05, 30), 0, 1)
        result = stats.wilcoxon_signed_rank(PairedAucSamples(range(30), a, b))

        self.assertTrue(0.0 < result.p_value < 0.01)

    def test_zero_differences(self):
        with self.assertRaises(NoInformationError):
            stats.wilcoxon_signed_rank(
                PairedAucSamples(range(3), [0.7] * 3, [0.7] * 3))
        with self.assertRaises(NotEnoughDataError):
            stats.wilcoxon_signed_rank(
                PairedAucSamples(range(3), [0.7, 0.7, 0.8], [0.7] * 3))

    def test_unknown_method(self):
        pairs = PairedAucSamples(range(3), [0.9, 0.8, 0.7], [0.5] * 3)
        with self.assertRaises(InvalidInputError):
            stats.wilcoxon_signed_rank(pairs, method='bootstrap')


class TestDeLong(unittest.TestCase):
    def test_placements_give_the_auc(self):
        scores, _, labels = correlated_scores(1)
        auc, _, _ = stats.delong_placements(scores, labels)
        self.assertAlmostEqual(auc, auc_score(scores, labels), places=12)

    def test_statistic_matches_the_definition(self):
        sizes = np.random.default_rng(2024).integers(10, 151, size=(50, 2))
        for seed, (m, n) in enumerate(sizes):
            a, b, labels = correlated_scores(seed, int(m), int(n),
                                             decimals=1 if seed % 2 else None)
            result = stats.delong_test(a, b, labels)
            self.assertLess(abs(result.statistic -
                                delong_by_definition(a, b, labels)), 1e-10,
                            'seed {}'.format(seed))

    def test_swapping_models_negates_the_statistic(self):
        a, b, labels = correlated_scores(4)
        forward = stats.delong_test(a, b, labels)
        backward = stats.delong_test(b, a, labels)

        self.assertEqual(forward.statistic, -backward.statistic)
        self.assertEqual(forward.p_value, backward.p_value)

    def test_identical_scores(self):
        a, _, labels = correlated_scores(2)
        result = stats.delong_test(a, a.copy(), labels)

        self.assertEqual((result.statistic, result.p_value), (0.0, 1.0))
        self.assertTrue(result.degenerate)
        self.assertFalse(result.significant)

    def test_family_size_tightens_alpha(self):
        a, b, labels = correlated_scores(3)
        result = stats.delong_test(a, b, labels, family_size=8)
        self.assertTrue(result.corrected)
        self.assertEqual(result.effective_alpha, 0.05 / 8)

    def test_length_mismatch(self):
        with self.assertRaises(InvalidInputError):
            stats.delong_test([0.1, 0.2], [0.1], [0, 1])


class TestCorrection(unittest.TestCase):
    def test_bonferroni(self):
        results = [TestResult(DELONG, 2.0, 0.01), TestResult(DELONG, 1.0, 0.2)]
        corrected = stats.bonferroni(results, 8)

        self.assertEqual([r.p_value for r in corrected], [0.01, 0.2])
        self.assertEqual([r.significant for r in corrected], [False, False])
        self.assertTrue(results[0].significant)
        with self.assertRaises(InvalidInputError):
            stats.bonferroni(results, 0)

    def test_plan(self):
        plan = stats.comparison_plan(range(8))

        self.assertEqual(len(plan), 20)
        self.assertEqual([c.footnote for c in plan].count(PAIRED), 3)
        self.assertEqual([c.footnote for c in plan].count(PRIMARY), 1)
        self.assertEqual([c.footnote for c in plan].count(ROBUSTNESS), 16)
        self.assertEqual(plan[3].label, 'CL vs FL')
        self.assertEqual(plan[3].family_size, 1)
        self.assertEqual(plan[4].label, 'CL vs LL_0')
        self.assertEqual(plan[4].family_size, 8)
        self.assertEqual(plan[0].family_size, 3)

    def test_p_value_format(self):
        self.assertEqual(stats.format_p_value(0.0001234), '1.234e-04')


class TestSignificanceTable(TemporaryDirectoryMixin, unittest.TestCase):
    def setUp(self):
        super(TestSignificanceTable, self).setUp()
        self.layout = tiny_layout(n_clients=3, n_total=300)
        self.spec = tiny_spec()
        base = init_params(self.spec, 0)
        # aligned, orthogonal and reversed scoring directions
        self.models = {
            CENTRALIZED: base.with_values([1.0, 1.0, 0.0]),
            FEDERATED: base.with_values([1.0, -1.0, 0.0]),
            LOCAL: dict((c, base.with_values([-1.0, -1.0, 0.0]))
                        for c in self.layout.client_ids),
        }

    def test_full_plan(self):
        evaluations = two_level_evaluate(self.models, self.layout, self.spec)
        rows = stats.build_significance_table(
            evaluations, stats.comparison_plan(self.layout.client_ids))

        self.assertEqual(len(rows), 10)
        self.assertEqual([r.result.test_name for r in rows[:3]],
                         [WILCOXON] * 3)
        self.assertTrue(all(r.result.test_name == DELONG for r in rows[3:]))

        path = os.path.join(self.tmpdir, 'significance.csv')
        stats.write_significance_table(path, rows)
        with open(path) as stream:
            lines = stream.read().splitlines()
        self.assertEqual(lines[0], ','.join(stats.SIGNIFICANCE_COLUMNS))
        self.assertEqual(len(lines), 11)

    def test_missing_paradigm(self):
        del self.models[FEDERATED]
        evaluations = two_level_evaluate(self.models, self.layout, self.spec)
        with self.assertRaises(PlanError):
            stats.build_significance_table(
                evaluations, stats.comparison_plan(self.layout.client_ids))


class TestKappa(TemporaryDirectoryMixin, unittest.TestCase):
    def test_perfect_agreement(self):
        labels = [0, 1, 2, 3, 1, 2]
        result = stats.weighted_kappa(RaterLabels(labels, labels, 4))
        self.assertEqual(result.kappa, 1.0)
        self.assertFalse(result.degenerate)

    def test_worked_example(self):
        raters = RaterLabels([0, 1, 2, 2], [0, 1, 2, 1], 3)
        self.assertAlmostEqual(stats.weighted_kappa(raters, QUADRATIC).kappa,
                               0.8, places=12)
        self.assertAlmostEqual(stats.weighted_kappa(raters, LINEAR).kappa,
                               5.0 / 7.0, places=12)
        self.assertAlmostEqual(stats.weighted_kappa(raters, UNWEIGHTED).kappa,
                               7.0 / 11.0, places=12)

    def test_unknown_weighting(self):
        with self.assertRaises(InvalidInputError):
            stats.weighted_kappa(RaterLabels([0, 1], [1, 0], 2), 'cubic')

    def test_two_categories_ignore_the_weighting(self):
        rng = np.random.default_rng(0)
        first = rng.integers(0, 2, 50)
        second = np.where(rng.random(50) < 0.8, first, 1 - first)
        raters = RaterLabels(first, second, 2)

        self.assertAlmostEqual(
            stats.weighted_kappa(raters, QUADRATIC).kappa,
            stats.weighted_kappa(raters, UNWEIGHTED).kappa, places=12)
        self.assertAlmostEqual(
            stats.weighted_kappa(raters, LINEAR).kappa,
            stats.weighted_kappa(raters, UNWEIGHTED).kappa, places=12)

    def test_independent_raters(self):
        rng = np.random.default_rng(1)
        raters = RaterLabels(rng.integers(0, 3, 10000),
                             rng.integers(0, 3, 10000), 3)
        self.assertLess(abs(stats.weighted_kappa(raters).kappa), 0.05)

    def test_constant_equal_raters(self):
        result = stats.weighted_kappa(RaterLabels([1, 1, 1], [1, 1, 1], 3))
        self.assertEqual(result.kappa, 1.0)
        self.assertTrue(result.degenerate)

    def test_pairwise_matrix(self):
        labels = {'a': [0, 1, 2, 2], 'b': [0, 1, 2, 1], 'c': [2, 1, 0, 0]}
        matrix, summary = stats.pairwise_kappa(
            OrderedDict(sorted(labels.items())), 3)

        np.testing.assert_array_equal(matrix, matrix.T)
        np.testing.assert_array_equal(np.diag(matrix), [1.0, 1.0, 1.0])
        self.assertEqual(list(summary), ['mean', 'median', 'min', 'max'])
        self.assertLessEqual(summary['min'], summary['max'])

        with self.assertRaises(NotEnoughDataError):
            stats.pairwise_kappa({'a': [0, 1]}, 2)

    def test_rater_file(self):
        path = os.path.join(self.tmpdir, 'raters.csv')
        with open(path, 'w') as stream:
            stream.write('alice,bob\n0,1\n2,2\n')
        labels = stats.load_rater_labels(path)

        self.assertEqual(list(labels), ['alice', 'bob'])
        self.assertEqual(labels['bob'].tolist(), [1, 2])

        with open(path, 'w') as stream:
            stream.write('0,1\n2,x\n')
        with self.assertRaises(ParseError) as ctx:
            stats.load_rater_labels(path)
        self.assertEqual(ctx.exception.kind, 'line 2')

    def test_category_out_of_range(self):
        with self.assertRaises(InvalidInputError):
            RaterLabels([0, 3], [0, 1], 3)
