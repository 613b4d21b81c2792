# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor


Outcome = namedtuple('Outcome', ('value', 'error'))


def _capture(func, item):
    try:
        return Outcome(func(item), None)
    except Exception as err:
        return Outcome(None, err)


def dispatch(func, items, workers=1):
    """Calls ``func(item)`` for every item, possibly in threads

    Results come back in *items* order whatever the completion order, and
    an exception raised by one call is captured in its Outcome instead of
    cancelling the others.

    :param  workers: threads; 1 runs everything in the calling thread
    :rtype: list of Outcome
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [_capture(func, item) for item in items]

    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(lambda item: _capture(func, item), items))


def unwrap(outcome):
    """Returns the outcome's value or raises its error"""
    if outcome.error is not None:
        raise outcome.error
    return outcome.value
