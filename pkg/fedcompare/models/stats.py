# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

import numpy as np

from fedcompare.constants import DELONG, WILCOXON
from fedcompare.exceptions import InvalidInputError
from fedcompare.models.base import BaseModel
from fedcompare.utils import immutable


@immutable
class PairedAucSamples(BaseModel):
    """Per-client AUC pairs of two models

    :param  client_ids: clients, in pairing order
    :param  auc_a: AUC of the first model on each client
    :param  auc_b: AUC of the second model on each client
    """
    __slots__ = [
        'client_ids',
        'auc_a',
        'auc_b',
    ]

    def __init__(self, client_ids, auc_a, auc_b):
        auc_a = tuple(float(x) for x in auc_a)
        auc_b = tuple(float(x) for x in auc_b)
        client_ids = tuple(client_ids)

        if not (len(client_ids) == len(auc_a) == len(auc_b)):
            raise InvalidInputError('paired samples differ in length',
                                    'lengths: {}, {}, {}'.format(
                                        len(client_ids), len(auc_a),
                                        len(auc_b)))
        if not client_ids:
            raise InvalidInputError('at least one pair is required')
        if any(not 0.0 <= x <= 1.0 for x in auc_a + auc_b):
            raise InvalidInputError('AUC values must lie in [0, 1]')

        self.client_ids = client_ids
        self.auc_a = auc_a
        self.auc_b = auc_b

    @classmethod
    def from_tables(cls, first, second):
        """Pairs two client_id -> auc mappings on their common clients"""
        common = [k for k in first if k in second]
        return cls(common, [first[k] for k in common],
                   [second[k] for k in common])

    def differences(self):
        return np.asarray(self.auc_a) - np.asarray(self.auc_b)


@immutable
class TestResult(BaseModel):
    """Outcome of one significance test

    ``significant`` holds iff ``p_value`` is below ``alpha / family_size``.
    """
    __test__ = False

    __slots__ = [
        'test_name',
        'statistic',
        'p_value',
        'alpha',
        'corrected',
        'significant',
        'family_size',
        'degenerate',
    ]

    def __init__(self, test_name, statistic, p_value, alpha=0.05,
                 corrected=False, significant=None, family_size=1,
                 degenerate=False):
        p_value = float(p_value)
        if not 0.0 <= p_value <= 1.0:
            raise InvalidInputError('p-value must lie in [0, 1]',
                                    'p_value: {}'.format(p_value))
        if int(family_size) < 1:
            raise InvalidInputError('family size must be at least 1',
                                    'family_size: {}'.format(family_size))

        self.test_name = test_name
        self.statistic = float(statistic)
        self.p_value = p_value
        self.alpha = float(alpha)
        self.corrected = bool(corrected)
        self.family_size = int(family_size)
        self.degenerate = bool(degenerate)
        self.significant = p_value < self.alpha / self.family_size

    @property
    def effective_alpha(self):
        return self.alpha / self.family_size


@immutable
class RaterLabels(BaseModel):
    """Ordinal labels given by two raters to the same cases"""
    __slots__ = [
        'first',
        'second',
        'n_categories',
    ]

    def __init__(self, first, second, n_categories):
        first = np.asarray(first, dtype=np.int64).reshape(-1)
        second = np.asarray(second, dtype=np.int64).reshape(-1)
        n_categories = int(n_categories)

        if first.shape != second.shape:
            raise InvalidInputError('raters labelled different case counts',
                                    'lengths: {} != {}'.format(
                                        first.shape[0], second.shape[0]))
        if first.shape[0] == 0:
            raise InvalidInputError('no cases to compare')
        if n_categories < 2:
            raise InvalidInputError('at least two categories are required',
                                    'n_categories: {}'.format(n_categories))
        for labels in (first, second):
            if labels.min() < 0 or labels.max() >= n_categories:
                raise InvalidInputError(
                    'category index out of range',
                    'range: [0, {})'.format(n_categories))

        first.setflags(write=False)
        second.setflags(write=False)
        self.first = first
        self.second = second
        self.n_categories = n_categories


@immutable
class KappaResult(BaseModel):
    __slots__ = [
        'kappa',
        'weighting',
        'degenerate',
    ]

    def __init__(self, kappa, weighting, degenerate=False):
        self.kappa = float(kappa)
        self.weighting = weighting
        self.degenerate = bool(degenerate)


@immutable
class Comparison(BaseModel):
    """One planned significance test

    :param  test: ``delong`` on pooled test scores, or ``wilcoxon`` on
                  per-client validation AUCs
    :param  first: model (DeLong) or paradigm (Wilcoxon) name
    :param  second: idem
    :param  family_size: Bonferroni family the row belongs to
    :param  footnote: footnote class printed in the table
    """
    __slots__ = [
        'test',
        'first',
        'second',
        'family_size',
        'footnote',
    ]

    def __init__(self, test, first, second, family_size=1, footnote=''):
        if test not in (DELONG, WILCOXON):
            raise InvalidInputError('unknown test', 'test: {}'.format(test))
        self.test = test
        self.first = first
        self.second = second
        self.family_size = int(family_size)
        self.footnote = footnote

    @property
    def label(self):
        return '{} vs {}'.format(self.first, self.second)


@immutable
class SignificanceRow(BaseModel):
    __slots__ = [
        'comparison',
        'result',
    ]

    def __init__(self, comparison, result):
        self.comparison = comparison
        self.result = result
