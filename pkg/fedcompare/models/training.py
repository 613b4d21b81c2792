# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

from collections import OrderedDict

from fedcompare.constants import ABORT, DROP, PARADIGMS
from fedcompare.exceptions import InvalidConfigurationError, InvalidInputError
from fedcompare.models.base import BaseModel
from fedcompare.models.dataset import RebalancePolicy
from fedcompare.utils import immutable


@immutable
class TrainConfig(BaseModel):
    """Mini-batch training budget and optimizer constants

    :param  epochs: passes over the (rebalanced) training set
    :param  batch_size: examples per step; the last batch may be smaller
    :param  shuffle_seed: root of every training random stream
    """
    __slots__ = [
        'epochs',
        'batch_size',
        'lr',
        'weight_decay',
        'beta1',
        'beta2',
        'epsilon',
        'rebalance',
        'shuffle_seed',
    ]

    def __init__(self, epochs=10, batch_size=32, lr=1e-4, weight_decay=1e-5,
                 beta1=0.9, beta2=0.999, epsilon=1e-8, rebalance=None,
                 shuffle_seed=0):
        if int(epochs) < 1:
            raise InvalidConfigurationError('epochs must be at least 1',
                                            'epochs: {}'.format(epochs))
        if int(batch_size) < 1:
            raise InvalidConfigurationError('batch_size must be at least 1',
                                            'batch_size: {}'.format(batch_size))
        if float(lr) <= 0:
            raise InvalidConfigurationError('lr must be positive',
                                            'lr: {}'.format(lr))
        if float(weight_decay) < 0:
            raise InvalidConfigurationError(
                'weight_decay must be non-negative',
                'weight_decay: {}'.format(weight_decay))
        if not (0 <= float(beta1) < 1 and 0 <= float(beta2) < 1):
            raise InvalidConfigurationError(
                'betas must lie in [0, 1)',
                'betas: {}, {}'.format(beta1, beta2))
        if float(epsilon) <= 0:
            raise InvalidConfigurationError('epsilon must be positive',
                                            'epsilon: {}'.format(epsilon))

        self.epochs = int(epochs)
        self.batch_size = int(batch_size)
        self.lr = float(lr)
        self.weight_decay = float(weight_decay)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.epsilon = float(epsilon)
        self.rebalance = (rebalance if rebalance is not None else
                          RebalancePolicy())
        self.shuffle_seed = int(shuffle_seed)


@immutable
class RoundConfig(BaseModel):
    """Federated schedule: every client participates in every round

    :param  failure_policy: ``abort`` the round on any client failure, or
                            ``drop`` failed clients and renormalize
    :param  workers: threads running client tasks inside a round
    """
    __slots__ = [
        'rounds',
        'local_epochs',
        'failure_policy',
        'workers',
    ]

    def __init__(self, rounds=5, local_epochs=2, failure_policy=ABORT,
                 workers=1):
        if int(rounds) < 1:
            raise InvalidConfigurationError('rounds must be at least 1',
                                            'rounds: {}'.format(rounds))
        if int(local_epochs) < 1:
            raise InvalidConfigurationError(
                'local_epochs must be at least 1',
                'local_epochs: {}'.format(local_epochs))
        if failure_policy not in (ABORT, DROP):
            raise InvalidConfigurationError(
                'unknown failure policy',
                'failure_policy: {}'.format(failure_policy))
        if int(workers) < 1:
            raise InvalidConfigurationError('workers must be at least 1',
                                            'workers: {}'.format(workers))

        self.rounds = int(rounds)
        self.local_epochs = int(local_epochs)
        self.failure_policy = failure_policy
        self.workers = int(workers)

    @property
    def epoch_budget(self):
        return self.rounds * self.local_epochs


@immutable
class EpochRecord(BaseModel):
    """One point of a training curve

    ``step`` is the epoch index for LL/CL and the round index for FL.
    """
    __slots__ = [
        'step',
        'train_loss',
        'val_loss',
        'val_accuracy',
    ]

    def __init__(self, step, train_loss, val_loss, val_accuracy):
        self.step = int(step)
        self.train_loss = float(train_loss)
        self.val_loss = float(val_loss)
        self.val_accuracy = float(val_accuracy)


@immutable
class ClientUpdate(BaseModel):
    """Result of one client's local training in a round

    :param  n_samples: original training examples (augmented copies excluded)
    :param  train_loss_trace: loss of every local mini-batch, in order
    :param  train_loss: mean loss over the last local epoch
    :param  val_loss: validation loss of the locally trained model
    :param  val_accuracy: validation accuracy at the training threshold
    """
    __slots__ = [
        'client_id',
        'params',
        'n_samples',
        'train_loss_trace',
        'train_loss',
        'val_loss',
        'val_accuracy',
        'round_index',
    ]

    def __init__(self, client_id, params, n_samples, train_loss_trace=(),
                 train_loss=0.0, val_loss=0.0, val_accuracy=0.0,
                 round_index=0):
        if int(n_samples) <= 0:
            raise InvalidInputError(
                'client {}: n_samples must be positive'.format(client_id),
                'n_samples: {}'.format(n_samples))

        self.client_id = int(client_id)
        self.params = params
        self.n_samples = int(n_samples)
        self.train_loss_trace = tuple(float(x) for x in train_loss_trace)
        self.train_loss = float(train_loss)
        self.val_loss = float(val_loss)
        self.val_accuracy = float(val_accuracy)
        self.round_index = int(round_index)


@immutable
class TrainingRunRecord(BaseModel):
    """Curves and final models of one paradigm

    :param  paradigm: LL, CL or FL
    :param  curves: client_id -> tuple of EpochRecord (LL and FL)
    :param  pooled_curve: tuple of EpochRecord on the union of validation
                          sets (CL, and the aggregated FL model)
    :param  models: model name -> ParamVector
    """
    __slots__ = [
        'paradigm',
        'curves',
        'pooled_curve',
        'models',
    ]

    def __init__(self, paradigm, curves=None, pooled_curve=(), models=None):
        if paradigm not in PARADIGMS:
            raise InvalidInputError('unknown paradigm',
                                    'paradigm: {}'.format(paradigm))

        self.paradigm = paradigm
        self.curves = OrderedDict(curves or ())
        self.pooled_curve = tuple(pooled_curve)
        self.models = OrderedDict(models or ())

    def curve_rows(self):
        """Yields (client, EpochRecord) with ``pooled`` for pooled curves"""
        for client_id, curve in self.curves.items():
            for record in curve:
                yield client_id, record
        for record in self.pooled_curve:
            yield 'pooled', record
