# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

import os

from fedcompare.core import ConfiguredObject
from fedcompare.exceptions import DoesNotExistError


class BaseQuerySet(ConfiguredObject):
    """Access to the artifacts persisted under an output directory

    :param  output_dir: run directory, ``SETTINGS['output_dir']`` or
                        ``output`` by default
    :type   output_dir: string
    """
    subdir = ''

    def __init__(self, *args, **kwargs):
        super(BaseQuerySet, self).__init__(*args, **kwargs)
        self.output_dir = self.output_dir or 'output'

    @property
    def root(self):
        return os.path.join(self.output_dir, self.subdir)

    def path(self, *parts):
        return os.path.join(self.root, *parts)

    def _existing(self, path, what):
        if not os.path.isfile(path):
            raise DoesNotExistError('No such {}: {}'.format(what, path))
        return path

    def _writable(self, path):
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        return path

    def get(self, *args, **kwargs):
        raise NotImplementedError

    def filter(self, *args, **kwargs):
        raise NotImplementedError

    def all(self, *args, **kwargs):
        raise NotImplementedError

    def create(self, *args, **kwargs):
        raise NotImplementedError
