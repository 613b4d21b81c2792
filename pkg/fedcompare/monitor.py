# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

"""Server-side diagnostics built from weight deltas and client scalars

Nothing in here reads an example: inputs are parameter vectors, losses,
accuracies and J-curves. :func:`compute_j_curve` is the one exception and
runs on the client holding the data.
"""

import json
import logging
from collections import OrderedDict

import numpy as np

from fedcompare import kernel
from fedcompare.constants import AGGREGATION_RULES, MEAN, MEDIAN
from fedcompare.exceptions import (GridMismatchError, InvalidInputError,
                                   NotEnoughDataError)
from fedcompare.models import (AggregationRule, ClientFlag, JCurve,
                               SimilarityMatrix, UpdateSummary)
from fedcompare.utils import sha256_bytes


logger = logging.getLogger(__name__)

LOW_SIMILARITY = 'low update similarity'
LOW_ACCURACY = 'low validation accuracy'

# scale of the MAD of a normal sample
MAD_SCALE = 1.4826


def summarize_round(global_before, updates, round_index=None):
    """Update norms and pairwise cosine similarities of one round

    A null update has cosine 0 with every client, itself included.

    :type   global_before: fedcompare.models.ParamVector
    :type   updates: sequence of fedcompare.models.ClientUpdate
    :rtype: (list of UpdateSummary, SimilarityMatrix)
    """
    updates = sorted(updates, key=lambda u: u.client_id)
    if not updates:
        raise InvalidInputError('no update to summarize')
    if round_index is None:
        round_index = updates[0].round_index

    deltas = [u.params.delta(global_before) for u in updates]
    norms = [float(np.linalg.norm(d)) for d in deltas]
    summaries = [UpdateSummary(round_index, u.client_id, norm, u.train_loss,
                               u.val_loss, u.val_accuracy)
                 for u, norm in zip(updates, norms)]

    k = len(updates)
    values = np.zeros((k, k))
    for i in range(k):
        if norms[i] == 0.0:
            continue
        values[i, i] = 1.0
        for j in range(i + 1, k):
            if norms[j] == 0.0:
                continue
            cosine = float(np.dot(deltas[i], deltas[j])) / (norms[i] *
                                                            norms[j])
            values[i, j] = values[j, i] = min(1.0, max(-1.0, cosine))

    zero_norm = [u.client_id for u, norm in zip(updates, norms)
                 if norm == 0.0]
    if zero_norm:
        logger.warning('round {}: null updates from clients {}'.format(
            round_index, zero_norm))
    return summaries, SimilarityMatrix(round_index,
                                       [u.client_id for u in updates],
                                       values, zero_norm)


def robust_z(values, min_scale=0.0):
    """(x - median) / max(1.4826 * MAD, min_scale)

    :type   values: dict key -> float
    :rtype: dict key -> float
    """
    keys = list(values)
    array = np.asarray([values[k] for k in keys], dtype=np.float64)
    median = np.median(array)
    scale = max(MAD_SCALE * float(np.median(np.abs(array - median))),
                min_scale)
    if scale == 0.0:
        return dict((k, 0.0) for k in keys)
    return dict(zip(keys, ((array - median) / scale).tolist()))


def flag_outlier_clients(history, policy):
    """Clients lagging far behind the others

    A client is flagged when its mean off-diagonal cosine similarity,
    averaged over rounds, or its validation accuracy averaged over
    rounds, lies more than ``policy.z_threshold`` robust standard
    deviations below the client median.

    :param  history: per-round (summaries, SimilarityMatrix)
    :type   policy: fedcompare.models.OutlierPolicy
    :rtype: list of fedcompare.models.ClientFlag
    """
    history = list(history)
    if len(history) < 2:
        raise NotEnoughDataError('outlier detection needs two rounds',
                                 'rounds: {}'.format(len(history)))

    similarity = OrderedDict()
    accuracy = OrderedDict()
    for summaries, matrix in history:
        for client_id, value in matrix.mean_off_diagonal().items():
            similarity.setdefault(client_id, []).append(value)
        for summary in summaries:
            accuracy.setdefault(summary.client_id, []).append(
                summary.val_accuracy)

    if len(similarity) < 3:
        raise NotEnoughDataError('outlier detection needs three clients',
                                 'clients: {}'.format(len(similarity)))

    flags = []
    for reason, signal in ((LOW_SIMILARITY, similarity),
                           (LOW_ACCURACY, accuracy)):
        means = dict((c, float(np.mean(v))) for c, v in signal.items())
        for client_id, z in sorted(robust_z(means,
                                            policy.min_scale).items()):
            if z < -policy.z_threshold:
                flags.append(ClientFlag(client_id, reason, z))

    for flag in flags:
        logger.warning('client {} flagged: {} (z = {:.2f})'.format(
            flag.client_id, flag.reason, flag.score))
    return sorted(flags, key=lambda f: (f.client_id, f.reason))


def norm_dispersion(history):
    """Mean and variance of every client's update norm across rounds

    :rtype: OrderedDict client_id -> OrderedDict(mean, variance)
    """
    norms = OrderedDict()
    for summaries, _ in history:
        for summary in summaries:
            norms.setdefault(summary.client_id, []).append(
                summary.update_norm)
    return OrderedDict(
        (client_id, OrderedDict((('mean', float(np.mean(values))),
                                 ('variance', float(np.var(values))))))
        for client_id, values in sorted(norms.items()))


def grid_id(grid):
    """Identifier of a threshold grid, shared by every client"""
    grid = np.asarray(grid, dtype=np.float64)
    return 'grid-{}-{}'.format(grid.shape[0],
                               sha256_bytes(grid.tobytes())[:12])


def default_grid(size=101):
    """Evenly spaced thresholds on [0, 1]

    >>> default_grid(5).tolist()
    [0.0, 0.25, 0.5, 0.75, 1.0]

    """
    if int(size) < 1:
        raise InvalidInputError('grid size must be at least 1',
                                'size: {}'.format(size))
    if int(size) == 1:
        return np.asarray([0.5])
    return np.linspace(0.0, 1.0, int(size))


def compute_j_curve(params, spec, validation, grid, client_id=0,
                    grid_version=None):
    """Youden's J of a model at every grid threshold

    Runs where *validation* lives; only the resulting scalars leave.

    :rtype: fedcompare.models.JCurve
    """
    from fedcompare.evaluation import youden_at

    grid = np.asarray(grid, dtype=np.float64).reshape(-1)
    if grid.shape[0] == 0 or np.any(np.diff(grid) < 0):
        raise InvalidInputError('threshold grid must be non-empty and '
                                'ordered')

    scores = kernel.predict_proba(params, spec, validation.features)
    j_values = youden_at(scores, validation.labels, grid)
    if grid_version is None:
        grid_version = grid_id(grid)
    return JCurve(client_id, grid_version, grid, j_values)


def aggregate_thresholds(curves, rule):
    """Global threshold from client J-curves

    J is aggregated point-wise across clients (mean, median or minimum)
    and the grid threshold maximizing the aggregate is returned, the
    smallest one on ties.

    :param  rule: AggregationRule or its kind
    :rtype: (float, float)
    """
    if not isinstance(rule, AggregationRule):
        rule = AggregationRule(rule)
    kind = rule.kind
    curves = sorted(curves, key=lambda c: c.client_id)
    if not curves:
        raise InvalidInputError('no J-curve to aggregate')

    reference = curves[0]
    for curve in curves[1:]:
        if (curve.grid_version != reference.grid_version or
                not np.array_equal(curve.thresholds, reference.thresholds)):
            raise GridMismatchError(
                'J-curves use different grids',
                'client {}: {} != {}'.format(curve.client_id,
                                             curve.grid_version,
                                             reference.grid_version))

    stacked = np.vstack([c.j_values for c in curves])
    if kind == MEAN:
        aggregate = stacked.mean(axis=0)
    elif kind == MEDIAN:
        aggregate = np.median(stacked, axis=0)
    else:
        aggregate = stacked.min(axis=0)

    best = int(np.argmax(aggregate))
    return float(reference.thresholds[best]), float(aggregate[best])


def diagnostics_report(history, flags, thresholds, grid_version=None):
    """Structured diagnostics report

    :param  history: per-round (summaries, SimilarityMatrix)
    :param  thresholds: rule -> (threshold, aggregate J)
    :rtype: OrderedDict
    """
    history = list(history)
    rounds = []
    for summaries, matrix in history:
        rounds.append(OrderedDict((
            ('round', matrix.round),
            ('norms', OrderedDict((str(s.client_id), s.update_norm)
                                  for s in summaries)),
            ('client_ids', list(matrix.client_ids)),
            ('similarity', matrix.values.tolist()),
            ('zero_norm', list(matrix.zero_norm)),
        )))

    return OrderedDict((
        ('rounds', rounds),
        ('norm_dispersion', OrderedDict(
            (str(c), v) for c, v in norm_dispersion(history).items())),
        ('flags', [OrderedDict((('client_id', f.client_id),
                                ('reason', f.reason),
                                ('score', f.score))) for f in flags]),
        ('grid_version', grid_version),
        ('thresholds', OrderedDict(
            (kind, OrderedDict((('threshold', thresholds[kind][0]),
                                ('aggregate_j', thresholds[kind][1]))))
            for kind in AGGREGATION_RULES if kind in thresholds)),
    ))


def dumps_report(report):
    return json.dumps(report, indent=2) + '\n'
