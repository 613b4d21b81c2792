# -*- coding: utf-8 -*-

# See the file LICENSE for copying permission.

import hashlib
import math
from functools import wraps

import numpy as np


class _CachedProperty(property):
    """A property cache mechanism.

    The cache is stored on the instance as a protected attribute, so
    derived values of immutable objects (class counts, fingerprints)
    are computed once.
    """

    def __init__(self, fget, fset=None, fdel=None, doc=None):
        self._cache_name = "_{name}_cache".format(
            name=fget.__name__,
        )
        fget = self._wrap_fget(fget)
        super(_CachedProperty, self).__init__(fget, fset, fdel, doc)

    def _wrap_fget(self, fget):
        @wraps(fget)
        def do_fget(obj):
            if hasattr(obj, self._cache_name):
                return getattr(obj, self._cache_name)
            value = fget(obj)
            setattr(obj, self._cache_name, value)
            return value
        return do_fget
cached_property = _CachedProperty


def immutable(mutableclass):
    """Decorator for making a slot-based class immutable

    Slots assigned in ``__init__`` become read-only afterwards.

    Source: http://code.activestate.com/recipes/578233-immutable-class-decorator/
    """
    if not isinstance(type(mutableclass), type):
        raise TypeError('@immutable: must be applied to a new-style class')
    if not hasattr(mutableclass, '__slots__'):
        raise TypeError('@immutable: class must have __slots__')

    class immutableclass(mutableclass):
        __slots__ = ()

        def __new__(cls, *args, **kw):
            new = mutableclass(*args, **kw)  # __init__ runs while mutable
            new.__class__ = immutableclass
            return new

        def __init__(self, *args, **kw):
            pass

    immutableclass.__name__ = mutableclass.__name__
    immutableclass.__qualname__ = mutableclass.__qualname__
    immutableclass.__module__ = mutableclass.__module__
    immutableclass.__doc__ = mutableclass.__doc__

    for name, member in list(mutableclass.__dict__.items()):
        if hasattr(member, '__set__') and not isinstance(member, property):
            setattr(immutableclass, name, property(member.__get__))

    return immutableclass


def round_half_away(value):
    """Rounds half away from zero.

    >>> round_half_away(2.5)
    3
    >>> round_half_away(-2.5)
    -3
    >>> round_half_away(185.5)
    186
    >>> round_half_away(79.95)
    80

    """
    magnitude = int(math.floor(abs(value) + 0.5))
    return -magnitude if value < 0 else magnitude


def _entropy(keys):
    return [int(key) % (1 << 64) for key in keys]


def rng_for(*keys):
    """Returns a numpy generator keyed by a tuple of integers

    Streams keyed by distinct tuples are independent, which makes every
    client, round and epoch reproducible regardless of execution order.

    :rtype: numpy.random.Generator
    """
    return np.random.default_rng(np.random.SeedSequence(_entropy(keys)))


def seed_for(*keys):
    """Derives a single integer seed from a tuple of integer keys

    >>> seed_for(7, 1) == seed_for(7, 1)
    True
    >>> seed_for(7, 1) == seed_for(7, 2)
    False

    """
    state = np.random.SeedSequence(_entropy(keys)).generate_state(2, np.uint32)
    return (int(state[0]) << 32) | int(state[1])


def format_float(value):
    """Shortest text representation that parses back to the same float

    >>> format_float(0.1)
    '0.1'
    >>> format_float(float('inf'))
    'inf'

    """
    return repr(float(value))


def sha256_bytes(data):
    return hashlib.sha256(data).hexdigest()


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as stream:
        for chunk in iter(lambda: stream.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()
