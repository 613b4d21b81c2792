# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

from collections import OrderedDict

import numpy as np

from fedcompare.exceptions import DoesNotExistError, InvalidInputError
from fedcompare.models.base import BaseModel
from fedcompare.utils import immutable


@immutable
class ConfusionCounts(BaseModel):
    __slots__ = [
        'tp',
        'fp',
        'tn',
        'fn',
    ]

    def __init__(self, tp, fp, tn, fn):
        values = [int(x) for x in (tp, fp, tn, fn)]
        if any(x < 0 for x in values):
            raise InvalidInputError('confusion counts must be non-negative',
                                    'counts: {}'.format(values))
        self.tp, self.fp, self.tn, self.fn = values

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    @property
    def n_pos(self):
        return self.tp + self.fn

    @property
    def n_neg(self):
        return self.tn + self.fp


@immutable
class MetricReport(BaseModel):
    """Metric suite at one operating threshold

    ``degenerate`` names every metric whose denominator was zero; those
    metrics are reported as 0.
    """
    __slots__ = [
        'accuracy',
        'sensitivity',
        'specificity',
        'precision',
        'f1',
        'balanced_accuracy',
        'youden_j',
        'auc',
        'threshold',
        'n_pos',
        'n_neg',
        'counts',
        'degenerate',
    ]

    def __init__(self, accuracy, sensitivity, specificity, precision, f1,
                 balanced_accuracy, youden_j, auc=None, threshold=None,
                 n_pos=0, n_neg=0, counts=None, degenerate=()):
        self.accuracy = float(accuracy)
        self.sensitivity = float(sensitivity)
        self.specificity = float(specificity)
        self.precision = float(precision)
        self.f1 = float(f1)
        self.balanced_accuracy = float(balanced_accuracy)
        self.youden_j = float(youden_j)
        self.auc = None if auc is None else float(auc)
        self.threshold = None if threshold is None else float(threshold)
        self.n_pos = int(n_pos)
        self.n_neg = int(n_neg)
        self.counts = counts
        self.degenerate = tuple(degenerate)

    @property
    def is_degenerate(self):
        return bool(self.degenerate)


class RocCurve(object):
    """Threshold sweep from (0, 0) to (1, 1)

    ``thresholds[i]`` is the decision threshold giving (fpr[i], tpr[i])
    under the ``score >= threshold`` rule; the first point uses +inf.
    """
    def __init__(self, thresholds, fpr, tpr):
        self.thresholds = np.asarray(thresholds, dtype=np.float64)
        self.fpr = np.asarray(fpr, dtype=np.float64)
        self.tpr = np.asarray(tpr, dtype=np.float64)

        if not (self.thresholds.shape == self.fpr.shape == self.tpr.shape):
            raise InvalidInputError('roc columns differ in length')

    def __len__(self):
        return self.fpr.shape[0]

    def __iter__(self):
        return iter(zip(self.thresholds.tolist(), self.fpr.tolist(),
                        self.tpr.tolist()))

    def __repr__(self):
        return '<RocCurve points={}>'.format(len(self))

    def __eq__(self, other):
        if not isinstance(other, RocCurve):
            return NotImplemented
        return (np.array_equal(self.thresholds, other.thresholds) and
                np.array_equal(self.fpr, other.fpr) and
                np.array_equal(self.tpr, other.tpr))

    __hash__ = None


@immutable
class ThresholdChoice(BaseModel):
    """Operating threshold and the data it was calibrated on

    :param  achieved_j: Youden's J at ``threshold`` on the source data
    """
    __slots__ = [
        'threshold',
        'source',
        'achieved_j',
    ]

    def __init__(self, threshold, source, achieved_j):
        self.threshold = float(threshold)
        self.source = source
        self.achieved_j = float(achieved_j)


@immutable
class EvaluationRow(BaseModel):
    """One table row: a model scored on one evaluation set"""
    __slots__ = [
        'model',
        'client_id',
        'choice',
        'report',
    ]

    def __init__(self, model, client_id, choice, report):
        self.model = model
        self.client_id = None if client_id is None else int(client_id)
        self.choice = choice
        self.report = report


class EvaluationTable(object):
    """Ordered rows of one evaluation table

    :param  name: table name, e.g. ``local_CL`` or ``pooled_test``
    """
    def __init__(self, name, rows=()):
        self.name = name
        self.rows = list(rows)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, index):
        return self.rows[index]

    def __repr__(self):
        return '<EvaluationTable {} rows={}>'.format(self.name, len(self))

    def append(self, row):
        self.rows.append(row)

    def filter(self, **kwargs):
        return [row for row in self.rows
                if all(getattr(row, k) == v for k, v in kwargs.items())]

    def get(self, model, client_id=None):
        for row in self.rows:
            if row.model == model and row.client_id == client_id:
                return row
        raise DoesNotExistError('no such row in {}'.format(self.name),
                                'model {}: client {}'.format(model, client_id))

    def aucs(self):
        """client_id -> auc, in row order

        :rtype: OrderedDict
        """
        return OrderedDict((row.client_id, row.report.auc)
                           for row in self.rows)


class EvaluationSet(object):
    """Every product of the two-level evaluation

    :param  local: paradigm -> EvaluationTable on per-client validation sets
    :param  pooled: EvaluationTable on the pooled test set
    :param  roc: model -> RocCurve on the pooled test set
    :param  test_scores: model -> probabilities on the pooled test set
    :param  test_labels: labels of the pooled test set
    """
    def __init__(self, local, pooled, roc, test_scores, test_labels):
        self.local = OrderedDict(local)
        self.pooled = pooled
        self.roc = OrderedDict(roc)
        self.test_scores = OrderedDict(test_scores)
        self.test_labels = np.asarray(test_labels)

    def __repr__(self):
        return '<EvaluationSet local={} pooled={}>'.format(
            list(self.local), len(self.pooled))

    def local_aucs(self, paradigm):
        return self.local[paradigm].aucs()
