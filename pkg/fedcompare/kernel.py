# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

"""Differentiable binary classifier: logistic regression or a small relu
MLP with a single output logit, trained with BCE-with-logits and AdamW.

Everything is float64 and pure: parameter vectors and optimizer states are
values that can be shipped between threads.
"""

import json
import logging
import math
from collections import OrderedDict

import numpy as np
from scipy.special import expit

from fedcompare.constants import CHECKPOINT_VERSION
from fedcompare.exceptions import (InvalidInputError, NumericalError,
                                   ParseError, ShapeError, translate)
from fedcompare.models import (Batch, OptimizerState, ParamVector,
                               PredictorSpec)
from fedcompare.utils import rng_for


logger = logging.getLogger(__name__)


# Shrinks the output layer draw: a logistic model starts near the origin.
OUTPUT_INIT_SCALE = 0.01


def init_params(spec, seed):
    """Fan-in scaled uniform weights, zero biases

    Hidden layers draw from ``U(-1/sqrt(fan_in), 1/sqrt(fan_in))``; the
    output layer uses the same law shrunk by :data:`OUTPUT_INIT_SCALE`.

    >>> from fedcompare.constants import MLP
    >>> len(init_params(PredictorSpec(input_dim=4), 0))
    5
    >>> len(init_params(PredictorSpec(MLP, 4, (8,)), 0))
    49

    :type   spec: fedcompare.models.PredictorSpec
    :rtype: fedcompare.models.ParamVector
    """
    rng = rng_for(seed)
    arrays = OrderedDict()
    for prefix, fan_in, fan_out in spec.layers():
        bound = 1.0 / math.sqrt(fan_in)
        if prefix == 'output':
            bound *= OUTPUT_INIT_SCALE
        arrays[prefix + '.weight'] = rng.uniform(-bound, bound,
                                                 size=(fan_in, fan_out))
        arrays[prefix + '.bias'] = np.zeros(fan_out)
    return ParamVector.flatten(arrays)


def _check_batch(params, spec, batch):
    if batch.features.shape[1] != spec.input_dim:
        raise ShapeError('batch dimension does not match the predictor',
                         'input_dim: {} != {}'.format(
                             batch.features.shape[1], spec.input_dim))
    if params.layout != spec.layout():
        raise ShapeError('parameters do not match the predictor layout',
                         'n_params: {} vs {}'.format(len(params),
                                                     spec.n_params))


def _layers(params, spec):
    arrays = params.unflatten()
    for prefix, _, _ in spec.layers():
        yield prefix, arrays[prefix + '.weight'], arrays[prefix + '.bias']


def _forward(params, spec, batch):
    """Returns the logits and the input of every layer"""
    _check_batch(params, spec, batch)
    inputs = []
    activation = batch.features
    logits = None
    for prefix, weight, bias in _layers(params, spec):
        inputs.append(activation)
        pre = activation @ weight + bias
        if prefix == 'output':
            logits = pre[:, 0]
        else:
            activation = np.maximum(pre, 0.0)
    return logits, inputs


def forward_logits(params, spec, batch):
    """One logit per batch row; probabilities are ``expit(logits)``

    :rtype: numpy.ndarray
    """
    logits, _ = _forward(params, spec, batch)
    return logits


def predict_proba(params, spec, features):
    features = np.asarray(features, dtype=np.float64)
    batch = Batch(features, np.zeros(features.shape[0]))
    return expit(forward_logits(params, spec, batch))


def bce_with_logits(logits, labels):
    """Mean binary cross-entropy on logits, in the overflow-free form

    >>> loss, grad = bce_with_logits([0.0, 0.0], [0, 1])
    >>> round(loss, 6), grad.tolist()
    (0.693147, [0.25, -0.25])

    :returns: (loss, gradient with respect to the logits)
    """
    logits = np.asarray(logits, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels, dtype=np.float64).reshape(-1)
    if logits.shape != labels.shape:
        raise ShapeError('logits and labels differ in length',
                         'lengths: {} != {}'.format(logits.shape[0],
                                                    labels.shape[0]))
    if logits.shape[0] == 0:
        raise InvalidInputError('cannot compute a loss on no example')

    n = logits.shape[0]
    losses = (np.maximum(logits, 0.0) - logits * labels +
              np.log1p(np.exp(-np.abs(logits))))
    grad = (expit(logits) - labels) / n
    return float(losses.mean()), grad


def loss_and_gradient(params, spec, batch):
    """Mean loss on *batch* and its exact gradient for every parameter

    :rtype: (float, numpy.ndarray)
    """
    logits, inputs = _forward(params, spec, batch)
    loss, delta = bce_with_logits(logits, batch.labels)

    grads = OrderedDict()
    delta = delta[:, None]
    layers = list(_layers(params, spec))
    for (prefix, weight, _), layer_input in reversed(list(zip(layers,
                                                               inputs))):
        grads[prefix + '.weight'] = layer_input.T @ delta
        grads[prefix + '.bias'] = delta.sum(axis=0)
        # relu derivative taken from the activation it produced
        delta = (delta @ weight.T) * (layer_input > 0.0)

    flat = np.concatenate([grads[entry.name].reshape(-1)
                           for entry in params.layout])
    return loss, flat


def backward(params, spec, batch):
    """Gradient of the mean BCE-with-logits loss

    :rtype: numpy.ndarray
    """
    return loss_and_gradient(params, spec, batch)[1]


@translate(FloatingPointError, to=NumericalError)
def adamw_step(state, params, grad):
    """One AdamW update with decoupled weight decay

    :type   state: fedcompare.models.OptimizerState
    :type   params: fedcompare.models.ParamVector
    :rtype: (ParamVector, OptimizerState)
    """
    grad = np.asarray(grad, dtype=np.float64).reshape(-1)
    if grad.shape[0] != len(params) or state.m.shape[0] != len(params):
        raise ShapeError('gradient, moments and parameters differ in length',
                         'lengths: {}, {}, {}'.format(
                             grad.shape[0], state.m.shape[0], len(params)))
    if not np.all(np.isfinite(grad)):
        raise NumericalError('non-finite gradient',
                             'entries: {}'.format(
                                 np.flatnonzero(~np.isfinite(grad)).tolist()))

    with np.errstate(over='raise', invalid='raise'):
        t = state.t + 1
        m = state.beta1 * state.m + (1.0 - state.beta1) * grad
        v = state.beta2 * state.v + (1.0 - state.beta2) * grad * grad
        m_hat = m / (1.0 - state.beta1 ** t)
        v_hat = v / (1.0 - state.beta2 ** t)
        values = (params.values -
                  state.lr * m_hat / (np.sqrt(v_hat) + state.epsilon) -
                  state.lr * state.weight_decay * params.values)
    if not np.all(np.isfinite(values)):
        raise NumericalError('non-finite parameters after the update',
                             'step: {}'.format(t))

    return params.with_values(values), state.replace(m=m, v=v, t=t)


def checkpoint_dict(params, spec):
    return OrderedDict((
        ('version', CHECKPOINT_VERSION),
        ('spec', OrderedDict((
            ('kind', spec.kind),
            ('input_dim', spec.input_dim),
            ('hidden_sizes', list(spec.hidden_sizes)),
            ('activation', spec.activation),
        ))),
        ('layout', [[e.name, list(e.shape), e.offset] for e in
                    params.layout]),
        ('values', params.values.tolist()),
    ))


def dumps_checkpoint(params, spec):
    """Checkpoint text: JSON floats are written in shortest repr, so a
    reload is bit-exact"""
    return json.dumps(checkpoint_dict(params, spec), indent=2) + '\n'


def loads_checkpoint(text):
    """Parses a checkpoint

    :rtype: (ParamVector, PredictorSpec)
    """
    try:
        data = json.loads(text)
    except ValueError as err:
        raise ParseError('checkpoint is not valid JSON',
                         'line {}: {}'.format(getattr(err, 'lineno', 1),
                                              err))
    try:
        if int(data['version']) != CHECKPOINT_VERSION:
            raise ParseError('unsupported checkpoint version',
                             'version: {}'.format(data['version']))
        spec = PredictorSpec(**data['spec'])
        params = ParamVector(data['values'], data['layout'])
    except (KeyError, TypeError) as err:
        raise ParseError('malformed checkpoint', 'field: {}'.format(err))

    if params.layout != spec.layout():
        raise ParseError('checkpoint layout does not match its spec',
                         'n_params: {} vs {}'.format(len(params),
                                                     spec.n_params))
    return params, spec


def save_checkpoint(path, params, spec):
    with open(path, 'w', encoding='utf-8') as stream:
        stream.write(dumps_checkpoint(params, spec))


def load_checkpoint(path):
    with open(path, encoding='utf-8') as stream:
        return loads_checkpoint(stream.read())
