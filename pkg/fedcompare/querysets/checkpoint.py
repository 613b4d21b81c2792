# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

import logging
import os
import re
from collections import OrderedDict

from fedcompare.constants import CENTRALIZED, FEDERATED, LOCAL
from fedcompare.exceptions import InvalidInputError
from fedcompare.kernel import load_checkpoint, save_checkpoint
from fedcompare.querysets.base import BaseQuerySet


logger = logging.getLogger(__name__)

LOCAL_NAME = re.compile(r'^{}_(\d+)$'.format(LOCAL))
CLIENT_FILE = re.compile(r'^client_(\d+)\.json$')
ROUND_DIR = re.compile(r'^round_(\d+)$')

GLOBAL_BEFORE = 'global_before'


class CheckpointQuerySet(BaseQuerySet):
    """Model checkpoints of a run

    Layout under ``<output_dir>/checkpoints``::

        ll/client_<k>.json          local model of client k (LL_k)
        cl.json                     centralized model
        fl.json                     final global model
        fl/round_<r>/global_before.json
        fl/round_<r>/client_<k>.json

    Every file reloads to bit-identical weights.
    """
    subdir = 'checkpoints'

    def _model_path(self, name):
        if name == CENTRALIZED:
            return self.path('cl.json')
        if name == FEDERATED:
            return self.path('fl.json')
        match = LOCAL_NAME.match(name)
        if match:
            return self.path('ll', 'client_{}.json'.format(match.group(1)))
        raise InvalidInputError('unknown model name', 'name: {}'.format(name))

    def get(self, name, *args, **kwargs):
        """Loads the checkpoint of model *name* (``CL``, ``FL`` or
        ``LL_<k>``)

        :raises: DoesNotExistError, ParseError
        :rtype: (ParamVector, PredictorSpec)
        """
        path = self._existing(self._model_path(name),
                              'checkpoint for {}'.format(name))
        return load_checkpoint(path)

    def create(self, name, params, spec, *args, **kwargs):
        path = self._writable(self._model_path(name))
        save_checkpoint(path, params, spec)
        logger.debug('saved {} to {}'.format(name, path))
        return path

    def names(self):
        """Stored model names, CL and FL first"""
        names = [n for n in (CENTRALIZED, FEDERATED)
                 if os.path.isfile(self._model_path(n))]
        local_dir = self.path('ll')
        if os.path.isdir(local_dir):
            matches = (CLIENT_FILE.match(f) for f in os.listdir(local_dir))
            names.extend('{}_{}'.format(LOCAL, k) for k in
                         sorted(int(m.group(1)) for m in matches if m))
        return names

    def all(self, *args, **kwargs):
        """name -> (ParamVector, PredictorSpec)

        :rtype: OrderedDict
        """
        return OrderedDict((name, self.get(name)) for name in self.names())

    def filter(self, paradigm=None, *args, **kwargs):
        """Checkpoints of one paradigm only"""
        def keep(name):
            if paradigm is None:
                return True
            if paradigm == LOCAL:
                return LOCAL_NAME.match(name) is not None
            return name == paradigm

        return OrderedDict((name, self.get(name)) for name in self.names()
                           if keep(name))

    def _round_path(self, round_index, member):
        return self.path(FEDERATED.lower(), 'round_{}'.format(round_index),
                         '{}.json'.format(member))

    def create_round(self, round_, spec):
        """Stores the weights a round started from and every update"""
        paths = [self._writable(self._round_path(round_.index,
                                                 GLOBAL_BEFORE))]
        save_checkpoint(paths[0], round_.global_before, spec)
        for update in round_.updates:
            path = self._round_path(round_.index,
                                    'client_{}'.format(update.client_id))
            save_checkpoint(path, update.params, spec)
            paths.append(path)
        return paths

    def rounds(self):
        root = self.path(FEDERATED.lower())
        if not os.path.isdir(root):
            return []
        matches = (ROUND_DIR.match(name) for name in os.listdir(root))
        return sorted(int(m.group(1)) for m in matches if m)

    def get_round(self, round_index):
        """Weights of one stored round

        :returns: (global_before, OrderedDict client_id -> ParamVector)
        """
        before, _ = load_checkpoint(self._existing(
            self._round_path(round_index, GLOBAL_BEFORE),
            'round {}'.format(round_index)))
        directory = os.path.dirname(self._round_path(round_index,
                                                     GLOBAL_BEFORE))
        matches = (CLIENT_FILE.match(f) for f in os.listdir(directory))
        updates = OrderedDict()
        for client_id in sorted(int(m.group(1)) for m in matches if m):
            updates[client_id], _ = load_checkpoint(
                self._round_path(round_index, 'client_{}'.format(client_id)))
        return before, updates
