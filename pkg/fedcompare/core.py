# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

from . import settings


SETTINGS = settings.get()


class ConfiguredObject(object):
    """Runtime-configured object interface

    Provides the instance attributes:

    - `workers`: number of threads used to run independent client tasks
    - `output_dir`: default root of persisted run artifacts

    Explicit keyword arguments win over the process-wide ``SETTINGS``.

    """
    __slots__ = [
        'workers',
        'output_dir',
    ]

    def __init__(self, *args, **kwargs):
        workers = kwargs.pop('workers', None) or SETTINGS.get('workers') or 1
        self.workers = max(1, int(workers))
        self.output_dir = (kwargs.pop('output_dir', None) or
                           SETTINGS.get('output_dir'))
