# -*- coding: utf-8 -*-

# See the file LICENSE for copying permission.

import collections.abc
from functools import wraps


class FedCompareError(Exception):
    def __init__(self, message, raw_error='', *args, **kwargs):
        """
        Examples:

        >>> error = FedCompareError('message')
        >>> error.message
        'message'
        >>> error.details
        ''
        >>> error = FedCompareError('message', 'kind')
        >>> error.kind
        'kind'
        >>> error.details
        ''
        >>> error = FedCompareError('message', 'line 3:  non-numeric cell ')
        >>> error.kind
        'line 3'
        >>> error.details
        'non-numeric cell'

        """
        Exception.__init__(self, message, *args, **kwargs)
        self.message = message

        values = raw_error.split(':', 1)

        if len(values) == 2:
            self.details = values[1].strip()
        else:
            self.details = ''

        self.kind = values[0].strip()
        self.type_ = (self.kind.lower().strip().replace(' ', '_') if
                      self.kind else None)

    def __repr__(self):
        return '{}({!r})'.format(self.__class__.__name__, str(self))

    def __str__(self):
        msg = self.message

        if self.kind and self.details:
            msg += '\nReason: {}, {}'.format(self.kind, self.details)
        elif self.kind:
            msg += '\nReason: {}'.format(self.kind)

        return msg


class InvalidConfigurationError(FedCompareError):
    pass


class InvalidInputError(FedCompareError):
    pass


class ShapeError(InvalidInputError):
    pass


class ParseError(FedCompareError):
    pass


class DoesNotExistError(FedCompareError):
    pass


class InfeasibleError(FedCompareError):
    pass


class StratificationInfeasibleError(InfeasibleError):
    pass


class ValidationInfeasibleError(InfeasibleError):
    pass


class RebalanceInfeasibleError(InfeasibleError):
    pass


class NumericalError(FedCompareError):
    pass


class DivergenceError(NumericalError):
    def __init__(self, message, epoch=None, client_id=None, *args, **kwargs):
        super(DivergenceError, self).__init__(message, *args, **kwargs)
        self.epoch = epoch
        self.client_id = client_id


class AggregationError(FedCompareError):
    pass


class LayoutMismatchError(AggregationError):
    pass


class ClientFailureError(FedCompareError):
    def __init__(self, message, client_id=None, round_index=None,
                 *args, **kwargs):
        super(ClientFailureError, self).__init__(message, *args, **kwargs)
        self.client_id = client_id
        self.round_index = round_index


class UndefinedMetricError(FedCompareError):
    pass


class DegenerateVarianceError(FedCompareError):
    pass


class NoInformationError(FedCompareError):
    pass


class NotEnoughDataError(FedCompareError):
    pass


class PlanError(FedCompareError):
    pass


class GridMismatchError(FedCompareError):
    pass


def translate(exceptions, to):
    """
    Catches an exception among *exceptions* and raise *to* instead.

    :param exceptions: exception class or sequence of classes to catch.
    :param to: FedCompareError subclass raised in their place, chained to
               the original error.

    >>> @translate(FloatingPointError, to=NumericalError)
    ... def explode():
    ...     raise FloatingPointError('invalid value encountered')
    >>> explode()
    Traceback (most recent call last):
        ...
    fedcompare.exceptions.NumericalError: invalid value encountered

    """
    if not isinstance(exceptions, collections.abc.Sequence):
        exceptions = tuple([exceptions])
    elif not isinstance(exceptions, tuple):
        exceptions = tuple(exceptions)

    def wrap(func):
        @wraps(func)
        def decorated(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except exceptions as err:
                raise to(str(err)) from err

        return decorated

    return wrap
