# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

import math

import numpy as np

from fedcompare.constants import AGGREGATION_RULES
from fedcompare.exceptions import (InvalidConfigurationError,
                                   InvalidInputError, ShapeError)
from fedcompare.models.base import BaseModel
from fedcompare.utils import immutable


@immutable
class UpdateSummary(BaseModel):
    """Scalar signals of one client in one round

    :param  update_norm: Euclidean norm of the client's weight change
    """
    __slots__ = [
        'round',
        'client_id',
        'update_norm',
        'train_loss_end',
        'val_loss',
        'val_accuracy',
    ]

    def __init__(self, round, client_id, update_norm, train_loss_end,
                 val_loss, val_accuracy):
        values = [float(x) for x in (update_norm, train_loss_end, val_loss,
                                     val_accuracy)]
        if not all(math.isfinite(x) for x in values):
            raise InvalidInputError('update summary values must be finite',
                                    'client {}: round {}'.format(client_id,
                                                                 round))
        if values[0] < 0:
            raise InvalidInputError('update norm must be non-negative')

        self.round = int(round)
        self.client_id = int(client_id)
        (self.update_norm, self.train_loss_end, self.val_loss,
         self.val_accuracy) = values


@immutable
class SimilarityMatrix(BaseModel):
    """Pairwise cosine similarities of client updates in one round

    :param  client_ids: row/column order
    :param  values: symmetric K x K matrix
    :param  zero_norm: clients whose update was null (cosines set to 0)
    """
    __slots__ = [
        'round',
        'client_ids',
        'values',
        'zero_norm',
    ]

    def __init__(self, round, client_ids, values, zero_norm=()):
        values = np.array(values, dtype=np.float64, copy=True)
        client_ids = tuple(int(c) for c in client_ids)
        k = len(client_ids)
        if values.shape != (k, k):
            raise ShapeError('similarity matrix does not match the clients',
                             'shape: {}'.format(values.shape))
        values.setflags(write=False)

        self.round = int(round)
        self.client_ids = client_ids
        self.values = values
        self.zero_norm = tuple(int(c) for c in zero_norm)

    def mean_off_diagonal(self):
        """client_id -> mean cosine with the other clients"""
        k = len(self.client_ids)
        if k < 2:
            return dict((c, 0.0) for c in self.client_ids)
        sums = self.values.sum(axis=1) - np.diag(self.values)
        return dict(zip(self.client_ids, (sums / (k - 1)).tolist()))


@immutable
class JCurve(BaseModel):
    """Youden's J of one client's model over a shared threshold grid

    Only scalars travel to the server: no example-level field exists.
    """
    __slots__ = [
        'client_id',
        'grid_version',
        'thresholds',
        'j_values',
    ]

    def __init__(self, client_id, grid_version, thresholds, j_values):
        thresholds = np.array(thresholds, dtype=np.float64, copy=True)
        j_values = np.array(j_values, dtype=np.float64, copy=True)
        if thresholds.shape != j_values.shape or thresholds.ndim != 1:
            raise ShapeError('grid and J values differ in length')
        if np.any(j_values < -1.0) or np.any(j_values > 1.0):
            raise InvalidInputError('J values must lie in [-1, 1]')
        thresholds.setflags(write=False)
        j_values.setflags(write=False)

        self.client_id = int(client_id)
        self.grid_version = grid_version
        self.thresholds = thresholds
        self.j_values = j_values

    def as_record(self):
        """Wire representation sent to the server"""
        return {
            'client_id': self.client_id,
            'grid_version': self.grid_version,
            'j_values': self.j_values.tolist(),
        }


@immutable
class AggregationRule(BaseModel):
    __slots__ = [
        'kind',
    ]

    def __init__(self, kind):
        if kind not in AGGREGATION_RULES:
            raise InvalidInputError('unknown aggregation rule',
                                    'kind: {}'.format(kind))
        self.kind = kind


@immutable
class OutlierPolicy(BaseModel):
    """Robust z-score rule for flagging clients

    :param  z_threshold: robust standard deviations below the median
    :param  min_scale: floor of the robust scale, so that near-identical
                       clients do not produce huge z-scores
    """
    __slots__ = [
        'z_threshold',
        'min_scale',
    ]

    def __init__(self, z_threshold=3.0, min_scale=0.01):
        if float(z_threshold) <= 0:
            raise InvalidConfigurationError(
                'z_threshold must be positive',
                'z_threshold: {}'.format(z_threshold))
        if float(min_scale) < 0:
            raise InvalidConfigurationError(
                'min_scale must be non-negative',
                'min_scale: {}'.format(min_scale))
        self.z_threshold = float(z_threshold)
        self.min_scale = float(min_scale)


@immutable
class ClientFlag(BaseModel):
    __slots__ = [
        'client_id',
        'reason',
        'score',
    ]

    def __init__(self, client_id, reason, score):
        self.client_id = int(client_id)
        self.reason = reason
        self.score = float(score)


@immutable
class RoundLogRecord(BaseModel):
    """One line of the federated round log"""
    __slots__ = [
        'round',
        'client_id',
        'n_samples',
        'train_loss',
        'val_loss',
        'val_accuracy',
        'update_norm',
    ]

    def __init__(self, round, client_id, n_samples, train_loss, val_loss,
                 val_accuracy, update_norm):
        self.round = int(round)
        self.client_id = int(client_id)
        self.n_samples = int(n_samples)
        self.train_loss = float(train_loss)
        self.val_loss = float(val_loss)
        self.val_accuracy = float(val_accuracy)
        self.update_norm = float(update_norm)
