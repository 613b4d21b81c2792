# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

from collections import namedtuple, OrderedDict

import numpy as np

from fedcompare.constants import LOGISTIC, MLP, RELU
from fedcompare.exceptions import (InvalidConfigurationError,
                                   InvalidInputError, LayoutMismatchError,
                                   ShapeError)
from fedcompare.models.base import BaseModel
from fedcompare.utils import immutable


LayoutEntry = namedtuple('LayoutEntry', ('name', 'shape', 'offset'))


def _readonly(values):
    values = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    values.setflags(write=False)
    return values


@immutable
class PredictorSpec(BaseModel):
    """Architecture of the binary classifier

    A ``logistic`` predictor has no hidden layer; an ``mlp`` stacks relu
    hidden layers of ``hidden_sizes`` units before a single output logit.
    """
    __slots__ = [
        'kind',
        'input_dim',
        'hidden_sizes',
        'activation',
    ]

    def __init__(self, kind=LOGISTIC, input_dim=2, hidden_sizes=(),
                 activation=RELU):
        hidden_sizes = tuple(int(h) for h in hidden_sizes)

        if kind not in (LOGISTIC, MLP):
            raise InvalidConfigurationError('unknown predictor kind',
                                            'kind: {}'.format(kind))
        if activation != RELU:
            raise InvalidConfigurationError('unknown activation',
                                            'activation: {}'.format(activation))
        if int(input_dim) < 1:
            raise InvalidConfigurationError('input_dim must be at least 1',
                                            'input_dim: {}'.format(input_dim))
        if kind == LOGISTIC and hidden_sizes:
            raise InvalidConfigurationError(
                'a logistic predictor has no hidden layer',
                'hidden_sizes: {}'.format(hidden_sizes))
        if kind == MLP and not hidden_sizes:
            raise InvalidConfigurationError(
                'an mlp predictor needs at least one hidden layer')
        if any(h < 1 for h in hidden_sizes):
            raise InvalidConfigurationError(
                'hidden sizes must be at least 1',
                'hidden_sizes: {}'.format(hidden_sizes))

        self.kind = kind
        self.input_dim = int(input_dim)
        self.hidden_sizes = hidden_sizes
        self.activation = activation

    def layers(self):
        """Yields (prefix, fan_in, fan_out) for every dense layer"""
        widths = (self.input_dim,) + self.hidden_sizes
        for index, (fan_in, fan_out) in enumerate(zip(widths, widths[1:])):
            yield 'hidden{}'.format(index), fan_in, fan_out
        yield 'output', widths[-1], 1

    def layout(self):
        """Flat parameter layout

        >>> spec = PredictorSpec(MLP, input_dim=4, hidden_sizes=(8,))
        >>> [(e.name, e.shape, e.offset) for e in spec.layout()]  # doctest: +NORMALIZE_WHITESPACE
        [('hidden0.weight', (4, 8), 0), ('hidden0.bias', (8,), 32),
         ('output.weight', (8, 1), 40), ('output.bias', (1,), 48)]

        :rtype: tuple of LayoutEntry
        """
        entries = []
        offset = 0
        for prefix, fan_in, fan_out in self.layers():
            for name, shape in (('weight', (fan_in, fan_out)),
                                ('bias', (fan_out,))):
                entries.append(LayoutEntry('{}.{}'.format(prefix, name),
                                           shape, offset))
                offset += int(np.prod(shape))
        return tuple(entries)

    @property
    def n_params(self):
        last = self.layout()[-1]
        return last.offset + int(np.prod(last.shape))


@immutable
class ParamVector(BaseModel):
    """Flat model parameters plus the layout describing them

    :param  values: flat float64 vector
    :param  layout: sequence of LayoutEntry, or of (name, shape, offset)
    """
    __slots__ = [
        'values',
        'layout',
    ]

    def __init__(self, values, layout):
        values = _readonly(values)
        layout = tuple(LayoutEntry(str(name), tuple(int(s) for s in shape),
                                   int(offset))
                       for name, shape, offset in layout)

        expected = sum(int(np.prod(entry.shape)) for entry in layout)
        if expected != values.shape[0]:
            raise ShapeError('layout does not describe the vector',
                             'sizes: {} != {}'.format(expected,
                                                      values.shape[0]))
        if not np.all(np.isfinite(values)):
            raise InvalidInputError('parameters must be finite')

        self.values = values
        self.layout = layout

    def __len__(self):
        return self.values.shape[0]

    @classmethod
    def flatten(cls, arrays):
        """Builds a vector from named arrays, in the given order

        :type   arrays: OrderedDict name -> array
        """
        layout = []
        chunks = []
        offset = 0
        for name, array in arrays.items():
            array = np.asarray(array, dtype=np.float64)
            layout.append(LayoutEntry(name, array.shape, offset))
            chunks.append(array.reshape(-1))
            offset += array.size
        values = np.concatenate(chunks) if chunks else np.zeros(0)
        return cls(values, layout)

    def unflatten(self):
        """Read-only views of every named array

        :rtype: OrderedDict name -> array
        """
        arrays = OrderedDict()
        for entry in self.layout:
            size = int(np.prod(entry.shape))
            arrays[entry.name] = self.values[
                entry.offset:entry.offset + size].reshape(entry.shape)
        return arrays

    def with_values(self, values):
        return ParamVector(values, self.layout)

    def same_layout(self, other):
        return self.layout == other.layout

    def delta(self, other):
        """``self - other`` as a plain vector"""
        if not self.same_layout(other):
            raise LayoutMismatchError('cannot subtract parameter vectors',
                                      'layouts differ')
        return self.values - other.values


@immutable
class OptimizerState(BaseModel):
    """Moments and constants of the decoupled-weight-decay optimizer"""
    __slots__ = [
        'm',
        'v',
        't',
        'lr',
        'weight_decay',
        'beta1',
        'beta2',
        'epsilon',
    ]

    def __init__(self, m, v, t=0, lr=1e-4, weight_decay=1e-5, beta1=0.9,
                 beta2=0.999, epsilon=1e-8):
        m = _readonly(m)
        v = _readonly(v)
        if m.shape != v.shape:
            raise ShapeError('moments differ in length',
                             'lengths: {} != {}'.format(m.shape[0],
                                                        v.shape[0]))
        if np.any(v < 0):
            raise InvalidInputError('second moments must be non-negative')
        if int(t) < 0:
            raise InvalidInputError('step count must be non-negative',
                                    't: {}'.format(t))

        self.m = m
        self.v = v
        self.t = int(t)
        self.lr = float(lr)
        self.weight_decay = float(weight_decay)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.epsilon = float(epsilon)

    @classmethod
    def fresh(cls, size, lr=1e-4, weight_decay=1e-5, beta1=0.9, beta2=0.999,
              epsilon=1e-8):
        return cls(np.zeros(size), np.zeros(size), 0, lr=lr,
                   weight_decay=weight_decay, beta1=beta1, beta2=beta2,
                   epsilon=epsilon)


@immutable
class Batch(BaseModel):
    __slots__ = [
        'features',
        'labels',
    ]

    def __init__(self, features, labels):
        features = np.asarray(features, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.float64).reshape(-1)
        if features.ndim != 2:
            raise ShapeError('batch features must be a matrix',
                             'ndim: {}'.format(features.ndim))
        if features.shape[0] != labels.shape[0]:
            raise ShapeError('batch rows do not match labels',
                             'lengths: {} != {}'.format(features.shape[0],
                                                        labels.shape[0]))
        self.features = features
        self.labels = labels

    @classmethod
    def from_dataset(cls, dataset, indices=None):
        if indices is None:
            return cls(dataset.features, dataset.labels)
        return cls(dataset.features[indices], dataset.labels[indices])

    def __len__(self):
        return self.labels.shape[0]
