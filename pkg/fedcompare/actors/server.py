# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

import logging
from collections import OrderedDict

import numpy as np

from fedcompare.actors.core import Actor
from fedcompare.actors.helpers import dispatch
from fedcompare.constants import ABORT, FEDERATED
from fedcompare.exceptions import ClientFailureError, InvalidInputError
from fedcompare.models import (EpochRecord, FederatedRound, RoundHistory,
                               RoundLogRecord, TrainingRunRecord)


logger = logging.getLogger(__name__)


class AggregationServer(Actor):
    """Owner of the global weights

    The server drives every round through its state machine: broadcast
    the current weights, collect one update per client, aggregate them
    with FedAvg. Rounds are kept in ``history``.

    :param  clients: federation members
    :type   clients: sequence of fedcompare.actors.ClientWorker

    :param  round_config: schedule and client failure policy
    :type   round_config: fedcompare.models.RoundConfig

    :param  init: starting global weights, shared initialization by default
    :type   init: fedcompare.models.ParamVector
    """
    def __init__(self, clients, spec, train_config, round_config, init=None,
                 *args, **kwargs):
        kwargs.setdefault('workers', round_config.workers)
        super(AggregationServer, self).__init__(spec, train_config, *args,
                                                **kwargs)

        from fedcompare.paradigms import initial_params

        self.clients = sorted(clients, key=lambda c: c.client_id)
        if not self.clients:
            raise InvalidInputError('a federation needs at least one client')
        if len(self.clients) == 1:
            logger.warning('federation with a single client degenerates to '
                           'local learning')

        self.round_config = round_config
        self.global_params = (init if init is not None else
                              initial_params(spec, train_config))
        self.history = RoundHistory()
        self.curves = OrderedDict((c.client_id, []) for c in self.clients)
        self.pooled_curve = []
        self.round_log = []

    def __repr__(self):
        return '<AggregationServer clients={} rounds={}>'.format(
            [c.client_id for c in self.clients], len(self.history))

    def _collect(self, round_):
        local_epochs = self.round_config.local_epochs

        def task(client):
            return client.train_round(round_.global_before, round_.index,
                                      local_epochs)

        outcomes = dispatch(task, self.clients, workers=self.workers)
        updates = []
        failures = []
        for client, outcome in zip(self.clients, outcomes):
            if outcome.error is None:
                updates.append(outcome.value)
                continue

            failures.append((client.client_id, outcome.error))
            if self.round_config.failure_policy == ABORT:
                round_.abort('client {}: {}'.format(client.client_id,
                                                    outcome.error))
                raise ClientFailureError(
                    'round {} aborted'.format(round_.index),
                    client_id=client.client_id, round_index=round_.index,
                    raw_error='client {}: {}'.format(
                        client.client_id,
                        getattr(outcome.error, 'message', outcome.error)),
                ) from outcome.error
            logger.warning('round {}: dropping client {} ({})'.format(
                round_.index, client.client_id, outcome.error))

        if not updates:
            client_id, error = failures[0]
            round_.abort('no surviving client')
            raise ClientFailureError(
                'round {} aborted: every client failed'.format(round_.index),
                client_id=client_id, round_index=round_.index,
                raw_error='clients: {}'.format([c for c, _ in failures]),
            ) from error

        round_.collect(updates, failures)

    def _record(self, round_):
        """Evaluates the aggregated weights on every surviving client"""
        by_id = dict((c.client_id, c) for c in self.clients)
        totals = {'n_val': 0, 'n_train': 0, 'train': 0.0, 'loss': 0.0,
                  'accuracy': 0.0}

        for update in round_.updates:
            client = by_id[update.client_id]
            val_loss, val_accuracy = client.evaluate(round_.global_after)
            self.curves[update.client_id].append(EpochRecord(
                round_.index, update.train_loss, val_loss, val_accuracy))

            delta = update.params.delta(round_.global_before)
            self.round_log.append(RoundLogRecord(
                round_.index, update.client_id, update.n_samples,
                update.train_loss, update.val_loss, update.val_accuracy,
                float(np.linalg.norm(delta))))

            totals['n_val'] += client.n_validation
            totals['n_train'] += update.n_samples
            totals['train'] += update.n_samples * update.train_loss
            totals['loss'] += client.n_validation * val_loss
            totals['accuracy'] += client.n_validation * val_accuracy

        self.pooled_curve.append(EpochRecord(
            round_.index, totals['train'] / totals['n_train'],
            totals['loss'] / totals['n_val'],
            totals['accuracy'] / totals['n_val']))
        logger.debug('round {}: pooled validation accuracy {:.4f}'.format(
            round_.index, self.pooled_curve[-1].val_accuracy))

    def run_round(self, index):
        """Runs one full round and moves the global weights forward

        :rtype: fedcompare.models.FederatedRound
        """
        from fedcompare.paradigms import fedavg_aggregate

        round_ = FederatedRound(index, self.global_params)
        self.history.append(round_)

        round_.distribute()
        self._collect(round_)
        round_.aggregate(fedavg_aggregate)
        self.global_params = round_.global_after
        self._record(round_)
        return round_

    def run(self):
        """Runs every configured round

        :returns: final global weights
        :rtype: fedcompare.models.ParamVector
        """
        for index in range(self.round_config.rounds):
            self.run_round(index)

        logger.info('federated training finished after {} rounds'.format(
            len(self.history)))
        return self.global_params

    def record(self):
        """Curves of the run so far

        :rtype: fedcompare.models.TrainingRunRecord
        """
        curves = OrderedDict((k, tuple(v)) for k, v in self.curves.items())
        return TrainingRunRecord(FEDERATED, curves=curves,
                                 pooled_curve=self.pooled_curve,
                                 models={FEDERATED: self.global_params})

    def j_curves(self, grid, grid_version, params=None):
        """J-curves every client computes locally for *params*

        :rtype: list of fedcompare.models.JCurve
        """
        params = params if params is not None else self.global_params
        outcomes = dispatch(lambda c: c.j_curve(params, grid, grid_version),
                            self.clients, workers=self.workers)
        curves = []
        for client, outcome in zip(self.clients, outcomes):
            if outcome.error is not None:
                raise outcome.error
            curves.append(outcome.value)
        return curves
