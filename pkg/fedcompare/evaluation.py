# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

"""Metric suite, ROC/AUC, Youden-J thresholds and the two-level
evaluation protocol"""

import csv
import logging
import os
from collections import OrderedDict

import numpy as np
from sklearn.metrics import confusion_matrix

from fedcompare import kernel
from fedcompare.constants import (CENTRALIZED, FEDERATED, LOCAL, LOCAL_TRAIN,
                                  LOCAL_TRAIN_VALIDATION, OVERLAP,
                                  POOLED_TRAIN_VALIDATION)
from fedcompare.exceptions import (InvalidInputError, ParseError,
                                   UndefinedMetricError)
from fedcompare.models import (ConfusionCounts, EvaluationRow,
                               EvaluationSet, EvaluationTable, LabeledDataset,
                               MetricReport, RocCurve, ThresholdChoice)
from fedcompare.utils import format_float


logger = logging.getLogger(__name__)

POOLED_TEST = 'pooled_test'

TABLE_COLUMNS = (
    'model', 'client', 'n_pos', 'n_neg', 'threshold', 'threshold_source',
    'achieved_j', 'accuracy', 'sensitivity', 'specificity', 'precision',
    'f1', 'auc', 'youden_j', 'balanced_accuracy', 'tp', 'fp', 'tn', 'fn',
    'degenerate',
)


def _as_arrays(scores, labels):
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels).reshape(-1)
    if scores.shape != labels.shape:
        raise InvalidInputError('scores and labels differ in length',
                                'lengths: {} != {}'.format(scores.shape[0],
                                                           labels.shape[0]))
    if scores.shape[0] == 0:
        raise InvalidInputError('nothing to evaluate')
    return scores, labels == OVERLAP


def _require_both_classes(positives, what):
    n_pos = int(np.count_nonzero(positives))
    n_neg = positives.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError(
            '{} is undefined on a single class'.format(what),
            'classes: {} positives, {} negatives'.format(n_pos, n_neg))
    return n_pos, n_neg


def confusion_at(scores, labels, threshold):
    """Counts at *threshold*, ``score >= threshold`` being positive

    >>> dict(confusion_at([0.9, 0.2, 0.6, 0.4], [1, 0, 1, 1], 0.5).as_dict())
    {'tp': 2, 'fp': 0, 'tn': 1, 'fn': 1}

    :rtype: fedcompare.models.ConfusionCounts
    """
    scores, positives = _as_arrays(scores, labels)
    tn, fp, fn, tp = confusion_matrix(positives, scores >= threshold,
                                      labels=[False, True]).ravel()
    return ConfusionCounts(tp=int(tp), fp=int(fp), tn=int(tn), fn=int(fn))


def _ratio(numerator, denominator, name, degenerate):
    if denominator == 0:
        degenerate.append(name)
        return 0.0
    return numerator / denominator


def metrics_from(counts, threshold=None, auc=None):
    """Metric suite from confusion counts

    A metric with a zero denominator is reported as 0 and named in
    ``degenerate``.

    :type   counts: fedcompare.models.ConfusionCounts
    :rtype: fedcompare.models.MetricReport
    """
    degenerate = []
    accuracy = _ratio(counts.tp + counts.tn, counts.total, 'accuracy',
                      degenerate)
    sensitivity = _ratio(counts.tp, counts.tp + counts.fn, 'sensitivity',
                         degenerate)
    specificity = _ratio(counts.tn, counts.tn + counts.fp, 'specificity',
                         degenerate)
    precision = _ratio(counts.tp, counts.tp + counts.fp, 'precision',
                       degenerate)
    f1 = _ratio(2.0 * precision * sensitivity, precision + sensitivity, 'f1',
                degenerate)

    return MetricReport(
        accuracy=accuracy,
        sensitivity=sensitivity,
        specificity=specificity,
        precision=precision,
        f1=f1,
        balanced_accuracy=(sensitivity + specificity) / 2.0,
        youden_j=sensitivity + specificity - 1.0,
        auc=auc,
        threshold=threshold,
        n_pos=counts.n_pos,
        n_neg=counts.n_neg,
        counts=counts,
        degenerate=degenerate,
    )


def _sweep(scores, positives):
    """Cumulative (TP, FP) counts at every unique score, descending"""
    order = np.argsort(-scores, kind='mergesort')
    sorted_scores = scores[order]
    sorted_pos = positives[order]
    # last index of every run of equal scores
    ends = np.flatnonzero(np.diff(sorted_scores) != 0)
    ends = np.concatenate([ends, [sorted_scores.shape[0] - 1]])
    tp = np.cumsum(sorted_pos)[ends]
    fp = np.cumsum(~sorted_pos)[ends]
    return sorted_scores[ends], tp.astype(np.int64), fp.astype(np.int64)


def roc_and_auc(scores, labels):
    """ROC sweep over unique scores and its trapezoidal area

    The area is accumulated on integer counts, so it equals the
    Mann-Whitney statistic with ties counted as halves exactly.

    >>> _, auc = roc_and_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1])
    >>> auc
    0.75

    :rtype: (fedcompare.models.RocCurve, float)
    """
    scores, positives = _as_arrays(scores, labels)
    n_pos, n_neg = _require_both_classes(positives, 'AUC')

    thresholds, tp, fp = _sweep(scores, positives)
    tp = np.concatenate([[0], tp])
    fp = np.concatenate([[0], fp])
    thresholds = np.concatenate([[np.inf], thresholds])

    numerator = int(np.sum(np.diff(fp) * (tp[1:] + tp[:-1])))
    auc = numerator / (2.0 * n_pos * n_neg)
    return RocCurve(thresholds, fp / n_neg, tp / n_pos), auc


def auc_score(scores, labels):
    return roc_and_auc(scores, labels)[1]


def youden_at(scores, labels, thresholds):
    """Youden's J at each threshold, ``sensitivity + specificity - 1``

    :rtype: numpy.ndarray
    """
    scores, positives = _as_arrays(scores, labels)
    n_pos, n_neg = _require_both_classes(positives, "Youden's J")
    thresholds = np.asarray(thresholds, dtype=np.float64).reshape(-1)

    pos_sorted = np.sort(scores[positives])
    neg_sorted = np.sort(scores[~positives])
    tp = n_pos - np.searchsorted(pos_sorted, thresholds, side='left')
    tn = np.searchsorted(neg_sorted, thresholds, side='left')
    return tp / n_pos + tn / n_neg - 1.0


def candidate_thresholds(scores):
    """Below-min, midpoints of consecutive unique scores, above-max

    A midpoint that rounds onto the lower score is replaced by the upper
    one, which keeps every candidate between its two neighbours under the
    ``>=`` rule.
    """
    unique = np.unique(np.asarray(scores, dtype=np.float64))
    lower, upper = unique[:-1], unique[1:]
    middle = lower + (upper - lower) / 2.0
    middle = np.where(middle > lower, middle, upper)
    return np.concatenate([[np.nextafter(unique[0], -np.inf)], middle,
                           [np.nextafter(unique[-1], np.inf)]])


def optimize_threshold(scores, labels, source=LOCAL_TRAIN):
    """Threshold maximizing Youden's J, the smallest one on ties

    :param  source: name of the calibration data, stored in the choice
    :rtype: fedcompare.models.ThresholdChoice
    """
    scores, positives = _as_arrays(scores, labels)
    _require_both_classes(positives, 'the optimal threshold')

    candidates = candidate_thresholds(scores)
    j_values = youden_at(scores, positives.astype(np.int64), candidates)
    best = int(np.argmax(j_values))
    return ThresholdChoice(candidates[best], source, j_values[best])


def evaluate_scores(scores, labels, choice):
    """Metric report at a calibrated threshold, AUC included"""
    report = metrics_from(confusion_at(scores, labels, choice.threshold),
                          threshold=choice.threshold,
                          auc=auc_score(scores, labels))
    if report.is_degenerate:
        logger.warning('degenerate metrics: {}'.format(
            ', '.join(report.degenerate)))
    return report


def _scores(params, spec, dataset):
    return kernel.predict_proba(params, spec, dataset.features)


def model_names(models):
    """Model names in table order: CL, FL, then every LL model"""
    from fedcompare.paradigms import local_model_name

    names = [p for p in (CENTRALIZED, FEDERATED) if p in models]
    names += [local_model_name(c) for c in models.get(LOCAL, {})]
    return names


def two_level_evaluate(models, layout, spec, test=None):
    """Local-validation tables per paradigm plus the pooled-test table

    Local tables score each paradigm's model for client k on k's
    validation set, at a threshold calibrated on k's training set (the
    LL model of client k for LL). The pooled-test table scores CL and FL
    at one threshold calibrated on pooled train+validation data, and each
    LL_k at a threshold calibrated on k's train+validation data.

    :param  models: ``LL`` -> {client_id: ParamVector}, ``CL`` and ``FL``
                    -> ParamVector; absent paradigms are skipped
    :type   layout: fedcompare.models.SplitLayout
    :param  test: pooled test set, ``layout.test`` by default
    :rtype: fedcompare.models.EvaluationSet
    """
    from fedcompare.paradigms import local_model_name

    test = test if test is not None else layout.test
    if test is None:
        raise InvalidInputError('no pooled test set to evaluate on')

    def model_for(paradigm, client_id):
        if paradigm == LOCAL:
            return models[LOCAL][client_id]
        return models[paradigm]

    local = OrderedDict()
    for paradigm in (LOCAL, CENTRALIZED, FEDERATED):
        if paradigm not in models:
            continue
        table = EvaluationTable('local_{}'.format(paradigm))
        for client_id in layout.client_ids:
            split = layout[client_id]
            params = model_for(paradigm, client_id)
            choice = optimize_threshold(_scores(params, spec, split.train),
                                        split.train.labels, LOCAL_TRAIN)
            report = evaluate_scores(_scores(params, spec, split.validation),
                                     split.validation.labels, choice)
            name = (local_model_name(client_id) if paradigm == LOCAL else
                    paradigm)
            table.append(EvaluationRow(name, client_id, choice, report))
        local[paradigm] = table

    pooled = EvaluationTable(POOLED_TEST)
    roc = OrderedDict()
    test_scores = OrderedDict()

    def score_on_test(name, params, calibration, source):
        choice = optimize_threshold(_scores(params, spec, calibration),
                                    calibration.labels, source)
        scores = _scores(params, spec, test)
        pooled.append(EvaluationRow(name, None, choice,
                                    evaluate_scores(scores, test.labels,
                                                    choice)))
        roc[name], _ = roc_and_auc(scores, test.labels)
        test_scores[name] = scores

    calibration = LabeledDataset.concat((layout.pooled_train(),
                                         layout.pooled_validation()))
    for paradigm in (CENTRALIZED, FEDERATED):
        if paradigm in models:
            score_on_test(paradigm, models[paradigm], calibration,
                          POOLED_TRAIN_VALIDATION)
    for client_id, params in models.get(LOCAL, {}).items():
        split = layout[client_id]
        score_on_test(local_model_name(client_id), params,
                      LabeledDataset.concat((split.train, split.validation)),
                      LOCAL_TRAIN_VALIDATION)

    logger.info('evaluated {} models on {} test examples'.format(
        len(pooled), len(test)))
    return EvaluationSet(local, pooled, roc, test_scores, test.labels)


def _format(value):
    return '' if value is None else format_float(value)


def write_table(path, table):
    with open(path, 'w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(TABLE_COLUMNS)
        for row in table:
            report, counts = row.report, row.report.counts
            writer.writerow([
                row.model,
                '' if row.client_id is None else row.client_id,
                report.n_pos, report.n_neg,
                _format(row.choice.threshold), row.choice.source,
                _format(row.choice.achieved_j),
                _format(report.accuracy), _format(report.sensitivity),
                _format(report.specificity), _format(report.precision),
                _format(report.f1), _format(report.auc),
                _format(report.youden_j), _format(report.balanced_accuracy),
                counts.tp, counts.fp, counts.tn, counts.fn,
                ';'.join(report.degenerate),
            ])


def read_table(path, name=None):
    """Reads a table written by :func:`write_table`

    :rtype: fedcompare.models.EvaluationTable
    """
    name = name or os.path.splitext(os.path.basename(path))[0]
    table = EvaluationTable(name)
    with open(path, newline='', encoding='utf-8') as stream:
        reader = csv.DictReader(stream)
        if tuple(reader.fieldnames or ()) != TABLE_COLUMNS:
            raise ParseError('not an evaluation table',
                             'line 1: unexpected columns')
        for record in reader:
            try:
                counts = ConfusionCounts(record['tp'], record['fp'],
                                         record['tn'], record['fn'])
                threshold = float(record['threshold'])
                report = MetricReport(
                    *[float(record[k]) for k in (
                        'accuracy', 'sensitivity', 'specificity',
                        'precision', 'f1', 'balanced_accuracy', 'youden_j')],
                    auc=float(record['auc']) if record['auc'] else None,
                    threshold=threshold,
                    n_pos=int(record['n_pos']), n_neg=int(record['n_neg']),
                    counts=counts,
                    degenerate=[d for d in record['degenerate'].split(';')
                                if d])
            except ValueError as err:
                raise ParseError('cannot parse evaluation table',
                                 'line {}: {}'.format(reader.line_num, err))
            choice = ThresholdChoice(threshold, record['threshold_source'],
                                     float(record['achieved_j']))
            client_id = int(record['client']) if record['client'] else None
            table.append(EvaluationRow(record['model'], client_id, choice,
                                       report))
    return table


def write_roc(path, curve):
    with open(path, 'w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(('fpr', 'tpr', 'threshold'))
        for threshold, fpr, tpr in curve:
            writer.writerow((format_float(fpr), format_float(tpr),
                             format_float(threshold)))
