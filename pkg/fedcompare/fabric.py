# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

"""Synthetic cohorts, the split protocol, minority rebalancing and
prediction/dataset files."""

import csv
import logging
import math
import os
from collections import OrderedDict

import numpy as np
from scipy.special import expit

from fedcompare.constants import (COHORT_STREAM, NO_OVERLAP, OVERLAP,
                                  SHIFT_STREAM, TEST_SPLIT_STREAM,
                                  VALIDATION_STREAM)
from fedcompare.exceptions import (InvalidConfigurationError,
                                   InvalidInputError, ParseError,
                                   RebalanceInfeasibleError,
                                   StratificationInfeasibleError,
                                   ValidationInfeasibleError)
from fedcompare.models import ClientSplit, LabeledDataset, SplitLayout
from fedcompare.utils import format_float, rng_for, round_half_away


logger = logging.getLogger(__name__)

CLASSES = (NO_OVERLAP, OVERLAP)

SCORE = 'score'
LOGIT = 'logit'


def shift_vector(seed, dim, shift_dims=None, scale=1.0):
    """Seedable client shift confined to the first *shift_dims* coordinates

    >>> shift = shift_vector(3, 4, shift_dims=2)
    >>> len(shift), shift[2:]
    (4, (0.0, 0.0))
    >>> shift == shift_vector(3, 4, shift_dims=2)
    True

    :rtype: tuple of float
    """
    shift_dims = dim if shift_dims is None else int(shift_dims)
    vector = np.zeros(dim)
    vector[:shift_dims] = rng_for(seed, SHIFT_STREAM).normal(
        0.0, scale, size=shift_dims)
    return tuple(float(x) for x in vector)


def _class_means(dim, margin):
    direction = np.ones(dim) / math.sqrt(dim)
    return {
        NO_OVERLAP: -0.5 * margin * direction,
        OVERLAP: 0.5 * margin * direction,
    }


def _swap_labels(labels, rate, rng, client_id=None):
    """Flips equal numbers of labels in both directions

    Class counts are preserved, so the generated overlap fraction stays
    exact whatever the noise rate. The number of swaps is capped by the
    smaller class.
    """
    positives = np.flatnonzero(labels == OVERLAP)
    negatives = np.flatnonzero(labels == NO_OVERLAP)
    requested = round_half_away(rate * labels.shape[0] / 2.0)
    n_swap = min(requested, positives.shape[0], negatives.shape[0])
    if n_swap < requested:
        logger.warning('client {}: label noise capped at {} swaps per '
                       'class, {} requested'.format(client_id, n_swap,
                                                     requested))
    if n_swap == 0:
        return labels

    labels = labels.copy()
    labels[rng.choice(positives, size=n_swap, replace=False)] = NO_OVERLAP
    labels[rng.choice(negatives, size=n_swap, replace=False)] = OVERLAP
    return labels


def generate_cohort(specs, dim, seed, margin=2.0):
    """Generates one labelled dataset per client

    Positives and negatives are drawn from two unit-variance Gaussian
    clusters whose means lie ``margin`` apart along the diagonal; the
    client's feature shift is then added to every example and a
    ``label_noise_rate`` share of labels is swapped between the classes.
    Ids are assigned sequentially across clients in spec order.

    :param  specs: client specifications
    :type   specs: sequence of fedcompare.models.ClientSpec

    :param  dim: feature dimension, at least 2
    :param  seed: master seed

    :rtype: OrderedDict client_id -> LabeledDataset
    """
    specs = list(specs)
    if int(dim) < 2:
        raise InvalidConfigurationError('cohort dimension must be >= 2',
                                        'dim: {}'.format(dim))
    if not specs:
        raise InvalidConfigurationError('cohort has no client',
                                        'specs: empty')
    ids = [spec.client_id for spec in specs]
    if len(set(ids)) != len(ids):
        raise InvalidConfigurationError('client ids must be distinct',
                                        'client ids: {}'.format(ids))

    means = _class_means(dim, margin)
    cohort = OrderedDict()
    next_id = 0

    for spec in specs:
        shift = (np.zeros(dim) if spec.feature_shift is None else
                 np.asarray(spec.feature_shift, dtype=np.float64))
        if shift.shape != (dim,):
            raise InvalidConfigurationError(
                'feature_shift length must equal the cohort dimension',
                'client {}: {} values'.format(spec.client_id, shift.shape[0]))

        rng = rng_for(seed, COHORT_STREAM, spec.client_id)
        n_pos = round_half_away(spec.n_total * spec.overlap_fraction)
        labels = np.zeros(spec.n_total, dtype=np.int64)
        labels[:n_pos] = OVERLAP
        labels = labels[rng.permutation(spec.n_total)]

        centers = np.where((labels == OVERLAP)[:, None], means[OVERLAP],
                           means[NO_OVERLAP])
        features = rng.standard_normal((spec.n_total, dim)) + centers + shift
        labels = _swap_labels(labels, spec.label_noise_rate, rng,
                              client_id=spec.client_id)

        cohort[spec.client_id] = LabeledDataset(
            features, labels,
            ids=np.arange(next_id, next_id + spec.n_total),
            origins=np.full(spec.n_total, spec.client_id),
        )
        next_id += spec.n_total

        logger.debug('client {}: {} examples, {} positives'.format(
            spec.client_id, spec.n_total, n_pos))

    return cohort


def stratified_test_split(pooled, fraction, seed, allow_unstratified=False):
    """Draws a class-stratified test set

    For every class c, ``round(fraction * |c|)`` examples are drawn
    uniformly at random. The remainder keeps its origin tags so it can be
    handed back to the clients.

    :param  allow_unstratified: degrade to plain random sampling when a
                                class cannot be stratified
    :rtype: (LabeledDataset, LabeledDataset)
    """
    fraction = float(fraction)
    if not 0.0 < fraction < 1.0:
        raise InvalidInputError('test fraction must lie in (0, 1)',
                                'fraction: {}'.format(fraction))

    rng = rng_for(seed, TEST_SPLIT_STREAM)
    expected = dict((c, fraction * pooled.class_indices(c).shape[0])
                    for c in CLASSES)
    infeasible = [c for c in CLASSES if expected[c] < 1.0]

    if infeasible:
        if not allow_unstratified:
            raise StratificationInfeasibleError(
                'cannot stratify the test split',
                'classes {}: fewer than 1 expected test example'.format(
                    infeasible))
        count = round_half_away(fraction * len(pooled))
        if count < 1:
            raise StratificationInfeasibleError(
                'test split would be empty',
                'examples: {}'.format(len(pooled)))
        logger.warning('test split is not stratified: class {} too '
                       'small'.format(infeasible))
        chosen = rng.choice(len(pooled), size=count, replace=False)
    else:
        chosen = np.concatenate([
            rng.choice(pooled.class_indices(c),
                       size=round_half_away(expected[c]), replace=False)
            for c in CLASSES
        ])

    mask = np.zeros(len(pooled), dtype=bool)
    mask[chosen] = True
    return pooled.where(mask), pooled.where(~mask)


def per_client_validation_split(remainder, target_total_fraction, seed,
                                test_fraction=0.10, test=None):
    """Carves a class-preserving validation subset out of every client

    ``target_total_fraction`` is expressed against the original pooled
    size, so each client keeps ``target / (1 - test_fraction)`` of every
    class for validation (1/9 with the 10% defaults). A class with at
    least 2 examples always contributes at least 1 validation example and
    keeps at least 1 for training.

    :param  remainder: post-test pool, tagged with origins, or a mapping
                       client_id -> LabeledDataset
    :param  test: pooled test set stored in the layout
    :rtype: fedcompare.models.SplitLayout
    """
    if isinstance(remainder, LabeledDataset):
        remainder = remainder.by_origin()

    fraction = float(target_total_fraction) / (1.0 - float(test_fraction))
    if not 0.0 < fraction < 1.0:
        raise InvalidInputError(
            'validation fraction must lie in (0, 1)',
            'per-client fraction: {}'.format(fraction))

    per_client = OrderedDict()
    for client_id in sorted(remainder):
        dataset = remainder[client_id]
        rng = rng_for(seed, VALIDATION_STREAM, client_id)
        chosen = []
        for label in CLASSES:
            indices = dataset.class_indices(label)
            if indices.shape[0] < 2:
                raise ValidationInfeasibleError(
                    'client {} cannot be split'.format(client_id),
                    'class {}: {} examples, at least 2 needed'.format(
                        label, indices.shape[0]))
            count = min(indices.shape[0] - 1,
                        max(1, round_half_away(fraction * indices.shape[0])))
            chosen.append(rng.choice(indices, size=count, replace=False))

        mask = np.zeros(len(dataset), dtype=bool)
        mask[np.concatenate(chosen)] = True
        per_client[client_id] = ClientSplit(dataset.where(~mask),
                                            dataset.where(mask))

    return SplitLayout(test, per_client)


def split_protocol(cohort, seed, test_fraction=0.10,
                   validation_total_fraction=0.10, allow_unstratified=False):
    """Pools the cohort, draws the test set and redistributes the rest

    :param  cohort: client_id -> LabeledDataset
    :rtype: fedcompare.models.SplitLayout
    """
    pooled = LabeledDataset.concat(cohort[c] for c in sorted(cohort))
    test, remainder = stratified_test_split(
        pooled, test_fraction, seed, allow_unstratified=allow_unstratified)

    by_origin = remainder.by_origin()
    missing = [c for c in cohort if c not in by_origin]
    if missing:
        raise ValidationInfeasibleError(
            'clients left without training data',
            'clients: {}'.format(missing))

    return per_client_validation_split(
        by_origin, validation_total_fraction, seed,
        test_fraction=test_fraction, test=test)


def rebalance_minority(train, policy, epoch_index, base_seed):
    """Upsamples the minority class to the majority count

    Added examples are copies of minority examples drawn uniformly with
    replacement, each perturbed by additive Gaussian jitter. Picks and
    jitter come from streams keyed by ``(base_seed, regeneration_index)``
    and consumed in item order, so item ``i`` depends only on
    ``(base_seed, regeneration_index, i)``. Original examples come first
    and pass through unmodified.

    :type   train: fedcompare.models.LabeledDataset
    :type   policy: fedcompare.models.RebalancePolicy
    :rtype: fedcompare.models.LabeledDataset
    """
    if not policy.enabled:
        return train

    if not train.has_both_classes:
        raise RebalanceInfeasibleError(
            'cannot rebalance a single-class set',
            'classes: {} positives, {} negatives'.format(train.n_pos,
                                                         train.n_neg))

    deficit = abs(train.n_pos - train.n_neg)
    if deficit == 0:
        return train

    minority = OVERLAP if train.n_pos < train.n_neg else NO_OVERLAP
    sources = train.class_indices(minority)
    regeneration = policy.regeneration_index(epoch_index)

    picks = sources[rng_for(base_seed, regeneration, 0).integers(
        0, sources.shape[0], size=deficit)]
    jitter = policy.jitter_scale * rng_for(
        base_seed, regeneration, 1).standard_normal((deficit, train.dim))

    added = LabeledDataset(train.features[picks] + jitter,
                           train.labels[picks],
                           ids=train.ids[picks],
                           origins=train.origins[picks])
    return LabeledDataset.concat((train, added))


def _parse_error(line_num, details):
    return ParseError('cannot parse file', 'line {}: {}'.format(line_num,
                                                                details))


def load_predictions(path, kind=None):
    """Reads a ``score,label`` (or ``logit,label``) prediction file

    An optional first line equal to the column names is skipped and
    declares the score kind. Logits are mapped to probabilities.

    :param  kind: ``score`` or ``logit`` when the file has no header
    :returns: (scores, labels, model_tag), the tag being the file stem
    """
    if kind not in (None, SCORE, LOGIT):
        raise InvalidInputError('unknown score kind',
                                'kind: {}'.format(kind))

    scores = []
    labels = []
    line_nums = []
    with open(path, newline='', encoding='utf-8') as stream:
        reader = csv.reader(stream)
        for row in reader:
            line_num = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue

            cells = [cell.strip() for cell in row]
            if not scores and not labels and line_num == 1:
                header = ','.join(cells).lower()
                if header in ('score,label', 'logit,label'):
                    declared = header.split(',')[0]
                    if kind is not None and kind != declared:
                        raise _parse_error(line_num, 'header declares {} '
                                           'but {} was expected'.format(
                                               declared, kind))
                    kind = declared
                    continue

            if len(cells) != 2:
                raise _parse_error(line_num, 'expected 2 columns, got '
                                   '{}'.format(len(cells)))
            try:
                score = float(cells[0])
            except ValueError:
                raise _parse_error(line_num, 'non-numeric score '
                                   '{!r}'.format(cells[0]))
            if not math.isfinite(score):
                raise _parse_error(line_num, 'non-finite score')
            if cells[1] not in ('0', '1'):
                raise _parse_error(line_num, 'unknown label value '
                                   '{!r}'.format(cells[1]))
            scores.append(score)
            labels.append(int(cells[1]))
            line_nums.append(line_num)

    if not scores:
        raise ParseError('empty prediction file', 'line 1: no data row')

    kind = kind or SCORE
    scores = np.asarray(scores, dtype=np.float64)
    if kind == LOGIT:
        scores = expit(scores)
    elif np.any((scores < 0.0) | (scores > 1.0)):
        row = int(np.flatnonzero((scores < 0.0) | (scores > 1.0))[0])
        raise ParseError('scores must lie in [0, 1]',
                         'line {}: {}'.format(line_nums[row], scores[row]))

    tag = os.path.splitext(os.path.basename(path))[0]
    return scores, np.asarray(labels, dtype=np.int64), tag


def write_predictions(path, scores, labels):
    """Writes probabilities with a ``score,label`` header"""
    with open(path, 'w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(('score', 'label'))
        for score, label in zip(np.asarray(scores).tolist(),
                                np.asarray(labels).tolist()):
            writer.writerow((format_float(score), int(label)))


def write_dataset(path, dataset):
    """Writes ``id,origin,label,x0..`` rows, floats in shortest repr"""
    with open(path, 'w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(['id', 'origin', 'label'] +
                        ['x{}'.format(i) for i in range(dataset.dim)])
        for example in dataset:
            writer.writerow([example.id, example.origin, example.label] +
                            [format_float(x) for x in example.features])


def read_dataset(path):
    """Reads a file written by :func:`write_dataset`

    :rtype: fedcompare.models.LabeledDataset
    """
    with open(path, newline='', encoding='utf-8') as stream:
        reader = csv.reader(stream)
        header = next(reader, None)
        if (not header or header[:3] != ['id', 'origin', 'label'] or
                len(header) < 4):
            raise _parse_error(1, 'expected an id,origin,label,x0.. header')
        dim = len(header) - 3

        ids, origins, labels, features = [], [], [], []
        for row in reader:
            if not row:
                continue
            if len(row) != dim + 3:
                raise _parse_error(reader.line_num, 'expected {} columns, '
                                   'got {}'.format(dim + 3, len(row)))
            try:
                ids.append(int(row[0]))
                origins.append(int(row[1]))
                labels.append(int(row[2]))
                features.append([float(x) for x in row[3:]])
            except ValueError as err:
                raise _parse_error(reader.line_num, str(err))

    if not ids:
        return LabeledDataset.empty(dim)
    return LabeledDataset(np.asarray(features), labels, ids=ids,
                          origins=origins)
