# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

from collections import namedtuple, OrderedDict

import numpy as np


Difference = namedtuple('Difference', ('attr', 'local', 'other'))


def same_value(left, right):
    """Equality that also works for numpy arrays and nested tuples

    >>> same_value((1, 2), (1, 2))
    True
    >>> same_value(np.zeros(2), np.zeros(3))
    False

    """
    if isinstance(left, np.ndarray) or isinstance(right, np.ndarray):
        return (isinstance(left, np.ndarray) and
                isinstance(right, np.ndarray) and
                left.shape == right.shape and
                left.dtype.kind == right.dtype.kind and
                bool(np.array_equal(left, right)))

    if (isinstance(left, (tuple, list)) and
            isinstance(right, (tuple, list))):
        return (len(left) == len(right) and
                all(same_value(a, b) for a, b in zip(left, right)))

    if isinstance(left, dict) and isinstance(right, dict):
        return (list(left.keys()) == list(right.keys()) and
                all(same_value(left[k], right[k]) for k in left))

    return bool(left == right)


class ModelDiff(object):
    """Holds differences between two versions of a model.

    :param  input: triples (tuples) storing in order: compared attribute name,
                   local model attribute value, other model attribute value.
    :type   input: *args
    """
    def __init__(self, *input):
        self.container = self._process_input(input)

    def __contains__(self, attr):
        return attr in self.container

    def __len__(self):
        return len(self.container)

    def __getitem__(self, index):
        attr, (local, other) = list(self.container.items())[index]
        return Difference(attr, local, other)

    def _process_input(self, input):
        return OrderedDict((attr, (local, other)) for
                           attr, local, other in input if
                           not same_value(local, other))

    def add_input(self, *input):
        """Adds input differing data into ModelDiff instance"""
        self.container.update(self._process_input(input))

    def merge(self, model_diff):
        """Merges another ModelDiff instance into the current one"""
        self.container.update(model_diff.container)

    def differing_fields(self):
        """Returns the name of fields differing between both versions"""
        return list(self.container.keys())

    def as_list(self):
        """Outputs models differences as a list of
        fedcompare.models.base.Difference namedtuple
        """
        return [
            Difference(k, v[0], v[1]) for k, v
            in self.container.items()
        ]


class BaseModel(object):
    """Value object base class

    Fields are the ``__slots__`` declared along the class hierarchy.
    Two models are equal when they share a type and every field holds the
    same value.
    """
    __slots__ = ()

    @classmethod
    def fields(cls):
        names = []
        for klass in reversed(cls.__mro__):
            for name in getattr(klass, '__slots__', ()):
                if name not in names:
                    names.append(name)
        return names

    def as_dict(self):
        return OrderedDict((name, getattr(self, name))
                           for name in self.fields())

    def replace(self, **changes):
        """Returns a copy of the model with *changes* applied"""
        values = self.as_dict()
        unknown = set(changes) - set(values)
        if unknown:
            raise TypeError('unknown fields: {}'.format(
                ', '.join(sorted(unknown))))
        values.update(changes)
        return type(self)(**values)

    def diff(self, other):
        """Compares the current instance with *other*

        :rtype: fedcompare.models.base.ModelDiff
        """
        return ModelDiff(*[
            (name, getattr(self, name), getattr(other, name, None))
            for name in self.fields()
        ])

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return len(self.diff(other)) == 0

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    __hash__ = None

    def __repr__(self):
        return '<{} {}>'.format(
            self.__class__.__name__,
            ' '.join('{}={!r}'.format(k, v) for k, v in self.as_dict().items()
                     if not isinstance(v, np.ndarray)))
