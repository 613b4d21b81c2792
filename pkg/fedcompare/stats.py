# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

"""Significance tests on AUC differences and inter-rater agreement"""

import csv
import logging
import math
from collections import OrderedDict

import numpy as np
from scipy.stats import norm, rankdata
from sklearn.metrics import cohen_kappa_score

from fedcompare.constants import (CENTRALIZED, DELONG, FEDERATED, LINEAR,
                                  LOCAL, OVERLAP, PAIRED, PRIMARY,
                                  QUADRATIC, ROBUSTNESS, UNWEIGHTED,
                                  WILCOXON)
from fedcompare.exceptions import (DegenerateVarianceError,
                                   InvalidInputError, NoInformationError,
                                   NotEnoughDataError, ParseError, PlanError,
                                   UndefinedMetricError)
from fedcompare.models import (Comparison, KappaResult, PairedAucSamples,
                               RaterLabels, SignificanceRow, TestResult)


logger = logging.getLogger(__name__)

EXACT_LIMIT = 20

AUTO = 'auto'
EXACT = 'exact'
NORMAL = 'normal'

SIGNIFICANCE_COLUMNS = ('comparison', 'test', 'statistic', 'p_value',
                        'alpha', 'family_size', 'significant', 'footnote')


def delong_placements(scores, labels):
    """AUC and its placement values

    ``v10[i]`` is the share of negatives ranked below positive ``i`` and
    ``v01[j]`` the share of positives ranked above negative ``j``, ties
    counting half.

    :rtype: (float, numpy.ndarray, numpy.ndarray)
    """
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    positives = np.asarray(labels).reshape(-1) == OVERLAP
    pos = scores[positives]
    neg = scores[~positives]
    m, n = pos.shape[0], neg.shape[0]
    if m == 0 or n == 0:
        raise UndefinedMetricError('AUC is undefined on a single class',
                                   'classes: {} positives, {} negatives'
                                   .format(m, n))

    combined = rankdata(np.concatenate([pos, neg]))
    v10 = (combined[:m] - rankdata(pos)) / n
    v01 = 1.0 - (combined[m:] - rankdata(neg)) / m
    return float(v10.mean()), v10, v01


def _covariance(a, b):
    return float(np.sum((a - a.mean()) * (b - b.mean())) / (a.shape[0] - 1))


def _two_sided(z):
    return min(1.0, 2.0 * float(norm.sf(abs(z))))


def delong_test(scores_a, scores_b, labels, alpha=0.05, family_size=1):
    """DeLong's test for two correlated ROC curves on the same examples

    The statistic is ``(AUC_a - AUC_b) / SE``: swapping the models negates
    it and leaves the p-value unchanged. Identical score vectors report
    ``z = 0, p = 1`` flagged as degenerate.

    :rtype: fedcompare.models.TestResult
    """
    scores_a = np.asarray(scores_a, dtype=np.float64).reshape(-1)
    scores_b = np.asarray(scores_b, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels).reshape(-1)
    if not (scores_a.shape == scores_b.shape == labels.shape):
        raise InvalidInputError('DeLong inputs differ in length',
                                'lengths: {}, {}, {}'.format(
                                    scores_a.shape[0], scores_b.shape[0],
                                    labels.shape[0]))

    auc_a, v10_a, v01_a = delong_placements(scores_a, labels)
    auc_b, v10_b, v01_b = delong_placements(scores_b, labels)
    m, n = v10_a.shape[0], v01_a.shape[0]

    def result(statistic, p_value, degenerate=False):
        return TestResult(DELONG, statistic, p_value, alpha=alpha,
                          corrected=family_size > 1, family_size=family_size,
                          degenerate=degenerate)

    if np.array_equal(scores_a, scores_b):
        return result(0.0, 1.0, degenerate=True)
    if m < 2 or n < 2:
        raise NotEnoughDataError('DeLong needs two examples per class',
                                 'classes: {} positives, {} negatives'
                                 .format(m, n))

    variance = (
        (_covariance(v10_a, v10_a) + _covariance(v10_b, v10_b) -
         2.0 * _covariance(v10_a, v10_b)) / m +
        (_covariance(v01_a, v01_a) + _covariance(v01_b, v01_b) -
         2.0 * _covariance(v01_a, v01_b)) / n
    )
    difference = auc_a - auc_b

    if variance <= 0.0:
        if difference == 0.0:
            return result(0.0, 1.0, degenerate=True)
        raise DegenerateVarianceError(
            'AUC difference has zero variance',
            'auc: {} vs {}'.format(auc_a, auc_b))

    z = difference / math.sqrt(variance)
    return result(z, _two_sided(z))


def _exact_lower_tail(doubled_ranks, doubled_w):
    """Number of sign assignments whose doubled W+ is at most *doubled_w*"""
    counts = np.zeros(int(doubled_ranks.sum()) + 1, dtype=np.int64)
    counts[0] = 1
    for rank in doubled_ranks.tolist():
        shifted = counts[:counts.shape[0] - rank].copy()
        counts[rank:] += shifted
    return int(counts[:doubled_w + 1].sum())


def wilcoxon_signed_rank(pairs, alpha=0.05, family_size=1, method=AUTO):
    """Paired Wilcoxon signed-rank test on per-client AUC differences

    Zero differences are dropped, tied magnitudes get mid-ranks and the
    statistic is ``min(W+, W-)``. Up to 20 pairs the two-sided p-value is
    exact, from the full distribution of W+ over sign assignments;
    beyond, the normal approximation with tie and continuity corrections
    is used.

    >>> pairs = PairedAucSamples(range(8), [0.9] * 8, [0.8] * 8)
    >>> wilcoxon_signed_rank(pairs).p_value
    0.0078125

    :type   pairs: fedcompare.models.PairedAucSamples
    :param  method: ``auto``, ``exact`` or ``normal``
    :rtype: fedcompare.models.TestResult
    """
    differences = pairs.differences()
    nonzero = differences[differences != 0.0]
    if nonzero.shape[0] == 0:
        raise NoInformationError('every paired difference is zero',
                                 'pairs: {}'.format(differences.shape[0]))

    k = nonzero.shape[0]
    if k < 2:
        raise NotEnoughDataError('Wilcoxon needs two non-zero differences',
                                 'non-zero: {}'.format(k))

    ranks = rankdata(np.abs(nonzero))
    w_plus = float(ranks[nonzero > 0].sum())
    w_minus = float(ranks[nonzero < 0].sum())
    w = min(w_plus, w_minus)

    if method == AUTO:
        method = EXACT if k <= EXACT_LIMIT else NORMAL
    if method == EXACT:
        # mid-ranks are multiples of 1/2, so doubled ranks are integers
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        count = _exact_lower_tail(doubled, int(round(2.0 * w)))
        p_value = min(1.0, 2.0 * count / 2 ** k)
    elif method == NORMAL:
        _, ties = np.unique(ranks, return_counts=True)
        mean = k * (k + 1) / 4.0
        variance = (k * (k + 1) * (2 * k + 1) / 24.0 -
                    float(np.sum(ties ** 3 - ties)) / 48.0)
        z = min(0.0, (w - mean + 0.5) / math.sqrt(variance))
        p_value = min(1.0, 2.0 * float(norm.cdf(z)))
    else:
        raise InvalidInputError('unknown Wilcoxon method',
                                'method: {}'.format(method))

    return TestResult(WILCOXON, w, p_value, alpha=alpha,
                      corrected=family_size > 1, family_size=family_size)


KAPPA_WEIGHTS = OrderedDict((
    (QUADRATIC, 'quadratic'),
    (LINEAR, 'linear'),
    (UNWEIGHTED, None),
))


def weighted_kappa(raters, weighting=QUADRATIC):
    """Weighted Cohen's kappa of two raters

    When no disagreement is expected (both raters constant and equal)
    kappa is defined as 1 and flagged as degenerate.

    :type   raters: fedcompare.models.RaterLabels
    :rtype: fedcompare.models.KappaResult
    """
    if weighting not in KAPPA_WEIGHTS:
        raise InvalidInputError('unknown kappa weighting',
                                'weighting: {}'.format(weighting))
    first, second = raters.first, raters.second
    if np.all(first == first[0]) and np.all(second == first[0]):
        return KappaResult(1.0, weighting, degenerate=True)
    kappa = cohen_kappa_score(first, second,
                              labels=np.arange(raters.n_categories),
                              weights=KAPPA_WEIGHTS[weighting])
    return KappaResult(float(kappa), weighting)


def pairwise_kappa(labels_by_rater, n_categories, weighting=QUADRATIC):
    """Kappa of every pair of raters

    :param  labels_by_rater: rater name -> labels, in matrix order
    :type   labels_by_rater: OrderedDict
    :returns: (symmetric kappa matrix, summary with mean, median, min, max)
    """
    names = list(labels_by_rater)
    if len(names) < 2:
        raise NotEnoughDataError('kappa needs at least two raters',
                                 'raters: {}'.format(len(names)))

    matrix = np.eye(len(names))
    values = []
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            kappa = weighted_kappa(RaterLabels(labels_by_rater[names[a]],
                                               labels_by_rater[names[b]],
                                               n_categories),
                                   weighting).kappa
            matrix[a, b] = matrix[b, a] = kappa
            values.append(kappa)

    values = np.asarray(values)
    summary = OrderedDict((
        ('mean', float(values.mean())),
        ('median', float(np.median(values))),
        ('min', float(values.min())),
        ('max', float(values.max())),
    ))
    return matrix, summary


def load_rater_labels(path):
    """Reads one column of category indices per rater

    A first line holding any non-integer cell is taken as rater names.

    :rtype: OrderedDict rater -> numpy.ndarray
    """
    with open(path, newline='', encoding='utf-8') as stream:
        rows = [(reader_line, row) for reader_line, row in
                enumerate(csv.reader(stream), 1) if row]
    if not rows:
        raise ParseError('empty rater file', 'line 1: no row')

    first = [cell.strip() for cell in rows[0][1]]
    try:
        [int(cell) for cell in first]
        names = ['rater{}'.format(i) for i in range(len(first))]
    except ValueError:
        names = first
        rows = rows[1:]
    if len(names) < 2:
        raise ParseError('a rater file needs two columns',
                         'line 1: {} column(s)'.format(len(names)))

    columns = [[] for _ in names]
    for line, row in rows:
        if len(row) != len(names):
            raise ParseError('cannot parse rater file',
                             'line {}: expected {} columns, got {}'.format(
                                 line, len(names), len(row)))
        try:
            for column, cell in zip(columns, row):
                column.append(int(cell.strip()))
        except ValueError:
            raise ParseError('cannot parse rater file',
                             'line {}: non-integer category'.format(line))
    return OrderedDict((name, np.asarray(column, dtype=np.int64))
                       for name, column in zip(names, columns))


def bonferroni(results, family_size):
    """Recomputes significance at ``alpha / family_size``

    p-values are left untouched.

    :rtype: list of fedcompare.models.TestResult
    """
    if int(family_size) < 1:
        raise InvalidInputError('family size must be at least 1',
                                'family_size: {}'.format(family_size))
    return [result.replace(family_size=int(family_size),
                           corrected=int(family_size) > 1)
            for result in results]


def comparison_plan(client_ids):
    """The comparison plan of the significance table

    Paired Wilcoxon tests between paradigms on per-client validation
    AUCs (one family), DeLong CL vs FL on the pooled test set
    (uncorrected), then DeLong CL and FL against every LL model
    (one family per reference model).

    :rtype: list of fedcompare.models.Comparison
    """
    from fedcompare.paradigms import local_model_name

    client_ids = list(client_ids)
    plan = [Comparison(WILCOXON, first, second, family_size=3,
                       footnote=PAIRED)
            for first, second in ((CENTRALIZED, LOCAL), (FEDERATED, LOCAL),
                                  (CENTRALIZED, FEDERATED))]
    plan.append(Comparison(DELONG, CENTRALIZED, FEDERATED, footnote=PRIMARY))
    for reference in (CENTRALIZED, FEDERATED):
        for client_id in client_ids:
            plan.append(Comparison(DELONG, reference,
                                   local_model_name(client_id),
                                   family_size=len(client_ids),
                                   footnote=ROBUSTNESS))
    return plan


def build_significance_table(evaluations, plan, alpha=0.05):
    """Runs every planned comparison

    :type   evaluations: fedcompare.models.EvaluationSet
    :rtype: list of fedcompare.models.SignificanceRow
    """
    rows = []
    for comparison in plan:
        if comparison.test == WILCOXON:
            missing = [p for p in (comparison.first, comparison.second)
                       if p not in evaluations.local]
            if missing:
                raise PlanError('cannot run {}'.format(comparison.label),
                                'missing local evaluation: {}'.format(
                                    ', '.join(missing)))
            pairs = PairedAucSamples.from_tables(
                evaluations.local_aucs(comparison.first),
                evaluations.local_aucs(comparison.second))
            result = wilcoxon_signed_rank(
                pairs, alpha=alpha, family_size=comparison.family_size)
        else:
            missing = [m for m in (comparison.first, comparison.second)
                       if m not in evaluations.test_scores]
            if missing:
                raise PlanError('cannot run {}'.format(comparison.label),
                                'missing test scores: {}'.format(
                                    ', '.join(missing)))
            result = delong_test(evaluations.test_scores[comparison.first],
                                 evaluations.test_scores[comparison.second],
                                 evaluations.test_labels, alpha=alpha,
                                 family_size=comparison.family_size)
        rows.append(SignificanceRow(comparison, result))
        logger.debug('{} {}: statistic {:.4f}, p {:.3e}'.format(
            comparison.test, comparison.label, result.statistic,
            result.p_value))
    return rows


def format_p_value(p_value):
    """Scientific notation with 4 significant digits

    >>> format_p_value(0.0010430)
    '1.043e-03'

    """
    return '{:.3e}'.format(p_value)


def write_significance_table(path, rows):
    with open(path, 'w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(SIGNIFICANCE_COLUMNS)
        for row in rows:
            result = row.result
            writer.writerow((
                row.comparison.label, row.comparison.test,
                '{:.4f}'.format(result.statistic),
                format_p_value(result.p_value),
                '{:.6g}'.format(result.effective_alpha),
                result.family_size,
                'YES' if result.significant else 'NO',
                row.comparison.footnote,
            ))


def write_kappa(path, names, matrix, summary):
    with open(path, 'w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow([''] + list(names))
        for name, values in zip(names, matrix.tolist()):
            writer.writerow([name] + ['{:.6f}'.format(v) for v in values])
        writer.writerow([])
        for key, value in summary.items():
            writer.writerow([key, '{:.6f}'.format(value)])
