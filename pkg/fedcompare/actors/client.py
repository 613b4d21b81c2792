# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

import logging

from fedcompare.actors.core import Actor
from fedcompare.models import ClientUpdate


logger = logging.getLogger(__name__)


class ClientWorker(Actor):
    """Data-holding participant of a federation

    A worker owns one client's train/validation split. It receives global
    weights, trains on its own data and answers with a ClientUpdate; every
    other answer it gives is a scalar summary.

    :param  client_id: client identifier
    :type   client_id: int

    :param  split: the client's private train and validation sets
    :type   split: fedcompare.models.ClientSplit

    :param  stream: random stream of the client, ``client_id + 1`` by
                    default
    :type   stream: int
    """
    def __init__(self, client_id, split, spec, train_config, stream=None,
                 *args, **kwargs):
        super(ClientWorker, self).__init__(spec, train_config, *args,
                                           **kwargs)

        from fedcompare.paradigms import client_stream

        self.client_id = int(client_id)
        self._split = split
        self.stream = client_stream(client_id) if stream is None else stream

    def __repr__(self):
        return '<ClientWorker {} n_samples={}>'.format(self.client_id,
                                                       self.n_samples)

    @property
    def n_samples(self):
        """Original training examples, augmented copies excluded"""
        return len(self._split.train)

    @property
    def n_validation(self):
        return len(self._split.validation)

    def train_round(self, global_params, round_index, local_epochs):
        """Runs ``local_epochs`` epochs starting from *global_params*

        The client keeps the epoch numbering of a local run, so round ``r``
        covers epochs ``r * local_epochs`` onwards, and the augmented
        training set is regenerated at every round. Optimizer moments are
        not carried between rounds.

        :rtype: fedcompare.models.ClientUpdate
        """
        from fedcompare.paradigms import train_epochs

        policy = self.train_config.rebalance.replace(
            regenerate_every=local_epochs)
        params, records, trace = train_epochs(
            global_params, self.spec, self.train_config, self._split.train,
            self._split.validation, self.stream, local_epochs,
            epoch_offset=round_index * local_epochs, policy=policy,
            client_id=self.client_id)

        logger.debug('client {} finished round {}'.format(self.client_id,
                                                          round_index))
        return ClientUpdate(self.client_id, params, self.n_samples,
                            train_loss_trace=trace,
                            train_loss=records[-1].train_loss,
                            val_loss=records[-1].val_loss,
                            val_accuracy=records[-1].val_accuracy,
                            round_index=round_index)

    def evaluate(self, params):
        """Validation loss and accuracy of *params* on the client's data

        :rtype: (float, float)
        """
        from fedcompare.paradigms import validation_metrics

        return validation_metrics(params, self.spec, self._split.validation)

    def j_curve(self, params, grid, grid_version):
        """Youden's J of *params* over *grid* on the client's validation set

        :rtype: fedcompare.models.JCurve
        """
        from fedcompare.monitor import compute_j_curve

        return compute_j_curve(params, self.spec, self._split.validation,
                               grid, client_id=self.client_id,
                               grid_version=grid_version)
