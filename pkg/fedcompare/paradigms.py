# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

"""Local, centralized and federated training under one epoch loop"""

import logging
from collections import OrderedDict

import numpy as np
from scipy.special import expit

from fedcompare import kernel
from fedcompare.constants import (CENTRAL_STREAM, CENTRALIZED, FEDERATED,
                                  INIT_STREAM, LOCAL, REBALANCE_STREAM,
                                  SHUFFLE_STREAM, TRAINING_THRESHOLD)
from fedcompare.exceptions import (DivergenceError, InvalidInputError,
                                   LayoutMismatchError, NumericalError)
from fedcompare.fabric import rebalance_minority
from fedcompare.models import (Batch, EpochRecord, OptimizerState,
                               TrainingRunRecord)
from fedcompare.utils import rng_for, seed_for


logger = logging.getLogger(__name__)


def client_stream(client_id):
    """Random stream of a client; stream 0 is the centralized one"""
    return int(client_id) + 1


def local_model_name(client_id):
    return '{}_{}'.format(LOCAL, client_id)


def initial_params(spec, config):
    """Weights every paradigm starts from, shared by all clients"""
    return kernel.init_params(spec, seed_for(config.shuffle_seed,
                                             INIT_STREAM))


def validation_metrics(params, spec, validation):
    """Loss and accuracy at the fixed training threshold

    :rtype: (float, float)
    """
    batch = Batch.from_dataset(validation)
    logits = kernel.forward_logits(params, spec, batch)
    loss, _ = kernel.bce_with_logits(logits, batch.labels)
    predicted = expit(logits) >= TRAINING_THRESHOLD
    accuracy = float(np.mean(predicted == (batch.labels == 1.0)))
    return loss, accuracy


def _fresh_optimizer(params, config):
    return OptimizerState.fresh(len(params), lr=config.lr,
                                weight_decay=config.weight_decay,
                                beta1=config.beta1, beta2=config.beta2,
                                epsilon=config.epsilon)


def train_epochs(params, spec, config, train, validation, stream, epochs,
                 epoch_offset=0, policy=None, client_id=None):
    """The training loop every paradigm runs

    Epoch ``g = epoch_offset + e`` rebalances the training set for
    regeneration window ``g``, shuffles it with the stream keyed by
    ``(shuffle_seed, stream, g)`` and takes one AdamW step per mini-batch.
    The optimizer starts from zero moments on every call.

    :param  policy: rebalance policy, ``config.rebalance`` by default
    :returns: (params, tuple of EpochRecord, per-batch loss trace)
    """
    if len(train) == 0 or len(validation) == 0:
        raise InvalidInputError('training needs non-empty train and '
                                'validation sets',
                                'client {}: sizes {}/{}'.format(
                                    client_id, len(train), len(validation)))

    policy = policy if policy is not None else config.rebalance
    rebalance_seed = seed_for(config.shuffle_seed, REBALANCE_STREAM, stream)
    state = _fresh_optimizer(params, config)
    records = []
    trace = []

    for e in range(epochs):
        epoch = epoch_offset + e
        data = rebalance_minority(train, policy, epoch, rebalance_seed)
        order = rng_for(config.shuffle_seed, SHUFFLE_STREAM, stream,
                        epoch).permutation(len(data))

        weighted_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = Batch.from_dataset(data,
                                       order[start:start + config.batch_size])
            loss, grad = kernel.loss_and_gradient(params, spec, batch)
            if not np.isfinite(loss):
                raise DivergenceError(
                    'training diverged', epoch=epoch, client_id=client_id,
                    raw_error='epoch {}: non-finite loss for client {}'.format(
                        epoch, client_id))
            try:
                params, state = kernel.adamw_step(state, params, grad)
            except NumericalError as err:
                raise DivergenceError(
                    'training diverged', epoch=epoch, client_id=client_id,
                    raw_error='epoch {}: {}'.format(epoch, err.message),
                ) from err
            trace.append(loss)
            weighted_loss += loss * len(batch)

        val_loss, val_accuracy = validation_metrics(params, spec, validation)
        records.append(EpochRecord(epoch, weighted_loss / len(data),
                                   val_loss, val_accuracy))
        logger.debug('client {} epoch {}: train {:.5f} val {:.5f} acc '
                     '{:.4f}'.format(client_id, epoch, records[-1].train_loss,
                                     val_loss, val_accuracy))

    return params, tuple(records), tuple(trace)


def train_local(train, validation, spec, config, stream=CENTRAL_STREAM,
                client_id=None, init=None):
    """Trains one model on one client's data for ``config.epochs``

    :returns: (ParamVector, tuple of EpochRecord)
    """
    params = init if init is not None else initial_params(spec, config)
    params, curve, _ = train_epochs(params, spec, config, train, validation,
                                    stream, config.epochs,
                                    client_id=client_id)
    return params, curve


def train_local_models(layout, spec, config, workers=1):
    """One LL model per client, each on its own stream

    :rtype: (OrderedDict client_id -> ParamVector, TrainingRunRecord)
    """
    from fedcompare.actors.helpers import dispatch, unwrap

    def task(client_id):
        split = layout[client_id]
        return train_local(split.train, split.validation, spec, config,
                           stream=client_stream(client_id),
                           client_id=client_id)

    outcomes = dispatch(task, layout.client_ids, workers=workers)
    models = OrderedDict()
    curves = OrderedDict()
    for client_id, outcome in zip(layout.client_ids, outcomes):
        models[client_id], curves[client_id] = unwrap(outcome)

    logger.info('trained {} local models'.format(len(models)))
    record = TrainingRunRecord(LOCAL, curves=curves, models=OrderedDict(
        (local_model_name(c), p) for c, p in models.items()))
    return models, record


def train_centralized(layout, spec, config):
    """Trains one model on the union of every client's train split

    :rtype: (ParamVector, TrainingRunRecord)
    """
    if not len(layout):
        raise InvalidInputError('centralized training needs a client')

    params, curve = train_local(layout.pooled_train(),
                                layout.pooled_validation(), spec, config,
                                stream=CENTRAL_STREAM)
    logger.info('trained the centralized model on {} examples'.format(
        len(layout.pooled_train())))
    return params, TrainingRunRecord(CENTRALIZED, pooled_curve=curve,
                                     models={CENTRALIZED: params})


def fedavg_aggregate(updates):
    """Sample-weighted mean of client parameters

    Updates are summed in (client_id, n_samples, bytes) order so the
    result does not depend on the order clients answered in.

    >>> from fedcompare.models import ClientUpdate, ParamVector
    >>> layout = [('w', (1,), 0)]
    >>> fedavg_aggregate([
    ...     ClientUpdate(0, ParamVector([0.0], layout), 1),
    ...     ClientUpdate(1, ParamVector([4.0], layout), 3),
    ... ]).values.tolist()
    [3.0]

    :type   updates: sequence of fedcompare.models.ClientUpdate
    :rtype: fedcompare.models.ParamVector
    """
    updates = sorted(updates, key=lambda u: (u.client_id, u.n_samples,
                                             u.params.values.tobytes()))
    if not updates:
        raise InvalidInputError('nothing to aggregate')

    reference = updates[0].params
    for update in updates[1:]:
        if not update.params.same_layout(reference):
            raise LayoutMismatchError(
                'client parameters do not share a layout',
                'client {}'.format(update.client_id))

    total = sum(u.n_samples for u in updates)
    if total <= 0:
        raise InvalidInputError('zero total samples')
    if len(updates) == 1:
        return reference

    values = np.zeros(len(reference))
    for update in updates:
        values += (update.n_samples / total) * update.params.values
    return reference.with_values(values)


def build_server(layout, spec, train_config, round_config):
    """Aggregation server with one client worker per client of *layout*

    :rtype: fedcompare.actors.AggregationServer
    """
    from fedcompare.actors import AggregationServer, ClientWorker

    clients = [ClientWorker(client_id, layout[client_id], spec, train_config,
                            stream=client_stream(client_id))
               for client_id in layout.client_ids]
    return AggregationServer(clients, spec, train_config, round_config)


def run_federated(layout, spec, train_config, round_config):
    """Rounds-based federated training with FedAvg

    :returns: (final global ParamVector, TrainingRunRecord, list of the
              per-round tuples of ClientUpdate)
    """
    server = build_server(layout, spec, train_config, round_config)
    params = server.run()
    record = server.record()
    updates = [round_.updates for round_ in
               server.history.filter(state='aggregated')]
    return params, record, updates


def run_paradigms(layout, spec, train_config, round_config, paradigms=None,
                  workers=1):
    """Trains the requested paradigms, in LL, CL, FL order

    :rtype: OrderedDict paradigm -> (models, TrainingRunRecord, extra)
    """
    paradigms = paradigms or (LOCAL, CENTRALIZED, FEDERATED)
    results = OrderedDict()
    if LOCAL in paradigms:
        models, record = train_local_models(layout, spec, train_config,
                                            workers=workers)
        results[LOCAL] = (models, record, None)
    if CENTRALIZED in paradigms:
        params, record = train_centralized(layout, spec, train_config)
        results[CENTRALIZED] = (params, record, None)
    if FEDERATED in paradigms:
        server = build_server(layout, spec, train_config, round_config)
        params = server.run()
        results[FEDERATED] = (params, server.record(), server)
    return results
