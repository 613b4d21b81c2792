# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

from collections import namedtuple, OrderedDict

import numpy as np

from fedcompare.constants import NO_OVERLAP, OVERLAP
from fedcompare.exceptions import (InvalidConfigurationError,
                                   InvalidInputError, ShapeError)
from fedcompare.models.base import BaseModel
from fedcompare.utils import cached_property, immutable, sha256_bytes


Example = namedtuple('Example', ('id', 'origin', 'features', 'label'))


def _frozen(array, dtype):
    array = np.array(array, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


class LabeledDataset(object):
    """Immutable set of feature-vector examples with binary labels

    Every example carries a stable integer ``id`` and the ``origin`` client
    it was generated for, so that splits can be checked for disjointness
    and redistributed to their owners.

    :param  features: (n, d) matrix
    :param  labels: n binary labels
    :param  ids: n integer identifiers
    :param  origins: n client ids
    """
    def __init__(self, features, labels, ids=None, origins=None):
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2:
            raise ShapeError('features must be a matrix',
                             'ndim: {}'.format(features.ndim))

        n = features.shape[0]
        labels = np.asarray(labels).reshape(-1)
        ids = np.arange(n) if ids is None else np.asarray(ids).reshape(-1)
        origins = (np.zeros(n, dtype=np.int64) if origins is None else
                   np.asarray(origins).reshape(-1))

        for name, column in (('labels', labels), ('ids', ids),
                             ('origins', origins)):
            if column.shape[0] != n:
                raise ShapeError(
                    '{} length does not match the feature rows'.format(name),
                    'lengths: {} != {}'.format(column.shape[0], n))

        if n and not np.all(np.isfinite(features)):
            raise InvalidInputError('features must be finite')
        if n and not np.all((labels == NO_OVERLAP) | (labels == OVERLAP)):
            raise InvalidInputError('labels must be 0 or 1')

        self.features = _frozen(features, np.float64)
        self.labels = _frozen(labels, np.int64)
        self.ids = _frozen(ids, np.int64)
        self.origins = _frozen(origins, np.int64)

    @classmethod
    def empty(cls, dim):
        return cls(np.zeros((0, dim)), np.zeros(0, dtype=np.int64))

    @classmethod
    def concat(cls, datasets):
        """Stacks *datasets* in order

        :type   datasets: sequence of LabeledDataset
        :rtype: LabeledDataset
        """
        datasets = list(datasets)
        if not datasets:
            raise InvalidInputError('nothing to concatenate')

        dims = set(d.dim for d in datasets)
        if len(dims) != 1:
            raise ShapeError('datasets differ in dimension',
                             'dims: {}'.format(sorted(dims)))

        return cls(
            np.vstack([d.features for d in datasets]),
            np.concatenate([d.labels for d in datasets]),
            ids=np.concatenate([d.ids for d in datasets]),
            origins=np.concatenate([d.origins for d in datasets]),
        )

    def __len__(self):
        return self.labels.shape[0]

    def __iter__(self):
        for i in range(len(self)):
            yield Example(int(self.ids[i]), int(self.origins[i]),
                          self.features[i], int(self.labels[i]))

    def __eq__(self, other):
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return self.fingerprint == other.fingerprint

    __hash__ = None

    def __repr__(self):
        return '<LabeledDataset n={} dim={} pos={} neg={}>'.format(
            len(self), self.dim, self.n_pos, self.n_neg)

    @property
    def dim(self):
        return self.features.shape[1]

    @cached_property
    def n_pos(self):
        return int(np.count_nonzero(self.labels == OVERLAP))

    @cached_property
    def n_neg(self):
        return int(np.count_nonzero(self.labels == NO_OVERLAP))

    @property
    def has_both_classes(self):
        return self.n_pos > 0 and self.n_neg > 0

    @cached_property
    def fingerprint(self):
        """Content hash of every column, order included"""
        return sha256_bytes(b''.join((
            np.asarray(self.features.shape, dtype=np.int64).tobytes(),
            self.features.tobytes(),
            self.labels.tobytes(),
            self.ids.tobytes(),
            self.origins.tobytes(),
        )))

    def take(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.features[indices], self.labels[indices],
                              ids=self.ids[indices],
                              origins=self.origins[indices])

    def where(self, mask):
        return self.take(np.flatnonzero(mask))

    def class_indices(self, label):
        return np.flatnonzero(self.labels == label)

    def by_origin(self):
        """Splits the dataset back into its clients

        :rtype: OrderedDict client_id -> LabeledDataset
        """
        return OrderedDict(
            (int(origin), self.where(self.origins == origin))
            for origin in np.unique(self.origins)
        )


@immutable
class ClientSpec(BaseModel):
    """Generation parameters of one synthetic client

    :param  client_id: small integer identifier
    :param  n_total: number of examples
    :param  overlap_fraction: target share of positive examples
    :param  feature_shift: per-client additive offset, one entry per feature
    :param  label_noise_rate: share of labels swapped between the classes
    :param  feature_shift_seed: seed the shift was drawn from, if any
    """
    __slots__ = [
        'client_id',
        'n_total',
        'overlap_fraction',
        'feature_shift',
        'label_noise_rate',
        'feature_shift_seed',
    ]

    def __init__(self, client_id, n_total, overlap_fraction,
                 feature_shift=None, label_noise_rate=0.0,
                 feature_shift_seed=None):
        if int(n_total) <= 0:
            raise InvalidConfigurationError(
                'client {}: n_total must be positive'.format(client_id),
                'n_total: {}'.format(n_total))
        if not 0.0 <= float(overlap_fraction) <= 1.0:
            raise InvalidConfigurationError(
                'client {}: overlap_fraction must lie in [0, 1]'.format(
                    client_id),
                'overlap_fraction: {}'.format(overlap_fraction))
        if not 0.0 <= float(label_noise_rate) < 0.5:
            raise InvalidConfigurationError(
                'client {}: label_noise_rate must lie in [0, 0.5)'.format(
                    client_id),
                'label_noise_rate: {}'.format(label_noise_rate))

        self.client_id = int(client_id)
        self.n_total = int(n_total)
        self.overlap_fraction = float(overlap_fraction)
        self.feature_shift = (None if feature_shift is None else
                              tuple(float(x) for x in feature_shift))
        self.label_noise_rate = float(label_noise_rate)
        self.feature_shift_seed = (None if feature_shift_seed is None else
                                   int(feature_shift_seed))


@immutable
class ClientSplit(BaseModel):
    __slots__ = [
        'train',
        'validation',
    ]

    def __init__(self, train, validation):
        self.train = train
        self.validation = validation


class SplitLayout(object):
    """Pooled test set plus per-client train/validation splits

    :param  test: pooled, class-stratified test set
    :type   test: LabeledDataset

    :param  per_client: client_id -> ClientSplit, in client order
    :type   per_client: OrderedDict
    """
    def __init__(self, test, per_client):
        self.test = test
        self.per_client = OrderedDict(sorted(per_client.items()))

    def __repr__(self):
        return '<SplitLayout test={} clients={}>'.format(
            len(self.test) if self.test is not None else None,
            list(self.per_client))

    def __len__(self):
        return len(self.per_client)

    def __getitem__(self, client_id):
        return self.per_client[client_id]

    @property
    def client_ids(self):
        return list(self.per_client)

    def pooled_train(self):
        return LabeledDataset.concat(s.train for s in self.per_client.values())

    def pooled_validation(self):
        return LabeledDataset.concat(s.validation for s in
                                     self.per_client.values())

    def parts(self):
        """Yields (name, dataset) for every part of the layout"""
        if self.test is not None:
            yield 'test', self.test
        for client_id, split in self.per_client.items():
            yield 'client{}/train'.format(client_id), split.train
            yield 'client{}/validation'.format(client_id), split.validation


@immutable
class RebalancePolicy(BaseModel):
    """Minority upsampling schedule

    :param  regenerate_every: epochs an augmented set is reused for
    :param  jitter_scale: standard deviation of the additive jitter
    :param  enabled: disabled policies pass training sets through
    """
    __slots__ = [
        'regenerate_every',
        'jitter_scale',
        'enabled',
    ]

    def __init__(self, regenerate_every=2, jitter_scale=0.1, enabled=True):
        if int(regenerate_every) < 1:
            raise InvalidConfigurationError(
                'regenerate_every must be at least 1',
                'regenerate_every: {}'.format(regenerate_every))
        if float(jitter_scale) < 0:
            raise InvalidConfigurationError(
                'jitter_scale must be non-negative',
                'jitter_scale: {}'.format(jitter_scale))

        self.regenerate_every = int(regenerate_every)
        self.jitter_scale = float(jitter_scale)
        self.enabled = bool(enabled)

    def regeneration_index(self, epoch_index):
        return int(epoch_index) // self.regenerate_every
