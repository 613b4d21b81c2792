# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

"""Command line entry point

Every command reads an experiment configuration and works inside one
output directory, so ``synth``, ``run``, ``evaluate``, ``stats`` and
``monitor`` can be chained by hand while ``bench`` runs the whole
pipeline over several seeds::

    fedcompare synth --preset heterogeneous --out out/
    fedcompare run --out out/ --paradigm all
    fedcompare evaluate --out out/
    fedcompare stats --out out/
    fedcompare monitor --out out/

"""

import argparse
import csv
import logging
import os
import sys
import time
from collections import OrderedDict
from functools import wraps

import numpy as np
import scipy

import fedcompare
from fedcompare import settings
from fedcompare.constants import (AGGREGATION_RULES, CENTRALIZED, FEDERATED,
                                  LINEAR, LOCAL, PARADIGMS, QUADRATIC,
                                  UNWEIGHTED)
from fedcompare.core import SETTINGS
from fedcompare.evaluation import (POOLED_TEST, read_table,
                                   two_level_evaluate, write_roc, write_table)
from fedcompare.exceptions import (DoesNotExistError, FedCompareError,
                                   InvalidConfigurationError,
                                   NotEnoughDataError, ParseError)
from fedcompare.fabric import (generate_cohort, load_predictions,
                               split_protocol, write_predictions)
from fedcompare.models import (ClientUpdate, EvaluationSet, RunManifest)
from fedcompare.querysets import (CheckpointQuerySet, CohortQuerySet,
                                  RoundLogQuerySet)
from fedcompare.utils import format_float, sha256_file


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2
EXIT_BENCH_FAIL = 3

CONFIG_FILE = 'config.cfg'
MANIFEST_FILE = 'manifest.json'

PARADIGM_CHOICES = OrderedDict((
    ('ll', (LOCAL,)),
    ('cl', (CENTRALIZED,)),
    ('fl', (FEDERATED,)),
    ('all', PARADIGMS),
))

CURVE_COLUMNS = ('client', 'step', 'train_loss', 'val_loss', 'val_accuracy')
BENCH_COLUMNS = ('seed', 'cl_auc', 'fl_auc', 'mean_ll_auc')


def _relative_files(out):
    files = []
    for directory, _, names in os.walk(out):
        for name in names:
            path = os.path.join(directory, name)
            relative = os.path.relpath(path, out).replace(os.sep, '/')
            if os.path.basename(relative) != MANIFEST_FILE:
                files.append((relative, path))
    return sorted(files)


def write_manifest(config, out, command, seconds):
    """Hashes every file of *out* into its manifest

    Timings of earlier commands are kept.

    :rtype: fedcompare.models.RunManifest
    """
    path = os.path.join(out, MANIFEST_FILE)
    timings = OrderedDict()
    if os.path.isfile(path):
        with open(path, encoding='utf-8') as stream:
            try:
                timings = RunManifest.loads(stream.read()).timings
            except (ValueError, KeyError):
                logger.warning('ignoring unreadable manifest {}'.format(path))
    timings[command] = round(seconds, 3)

    manifest = RunManifest(
        RunManifest.hash_config(settings.dumps(config)),
        config.master_seed,
        versions={'fedcompare': fedcompare.__version__,
                  'numpy': np.__version__,
                  'scipy': scipy.__version__},
        files=OrderedDict((relative, sha256_file(full))
                          for relative, full in _relative_files(out)),
        timings=timings,
    )
    with open(path, 'w', encoding='utf-8') as stream:
        stream.write(manifest.dumps())
    return manifest


def recorded(command):
    """Times a command, stores its config and refreshes the manifest

    The wrapped function takes ``(config, out, ...)``.
    """
    def wrap(func):
        @wraps(func)
        def decorated(config, out, *args, **kwargs):
            os.makedirs(out, exist_ok=True)
            with open(os.path.join(out, CONFIG_FILE), 'w',
                      encoding='utf-8') as stream:
                stream.write(settings.dumps(config))

            started = time.perf_counter()
            result = func(config, out, *args, **kwargs)
            write_manifest(config, out, command,
                           time.perf_counter() - started)
            return result
        return decorated
    return wrap


def _load_cohort(config, out):
    cohort = CohortQuerySet(output_dir=out).all()
    if not cohort:
        raise DoesNotExistError('no cohort in {}'.format(out),
                                'hint: run the synth command first')
    expected = config.cohort.client_ids
    if sorted(cohort) != sorted(expected):
        raise InvalidConfigurationError(
            'stored cohort does not match the configuration',
            'client: {} stored, {} configured'.format(list(cohort),
                                                     expected))
    return cohort


def _layout(config, cohort):
    return split_protocol(
        cohort, config.master_seed,
        test_fraction=config.splits.test_fraction,
        validation_total_fraction=config.splits.validation_total_fraction,
        allow_unstratified=config.splits.allow_unstratified)


def _write_curves(path, record):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(CURVE_COLUMNS)
        for client, epoch in record.curve_rows():
            writer.writerow((client, epoch.step,
                             format_float(epoch.train_loss),
                             format_float(epoch.val_loss),
                             format_float(epoch.val_accuracy)))


@recorded('synth')
def cmd_synth(config, out):
    """Generates the cohort and its per-client summary

    :returns: summary rows (client, n_neg, n_pos, n_total, overlap %)
    """
    cohort = generate_cohort(config.cohort.specs, config.cohort.dim,
                             config.master_seed, margin=config.cohort.margin)
    queryset = CohortQuerySet(output_dir=out)
    for client_id, dataset in cohort.items():
        queryset.create(client_id, dataset)
    _, rows = queryset.create_summary(cohort)
    logger.info('wrote {} client datasets to {}'.format(len(cohort),
                                                       queryset.root))
    return rows


@recorded('run')
def cmd_run(config, out, paradigms=PARADIGMS):
    """Trains *paradigms* and stores checkpoints, curves and round logs

    :rtype: OrderedDict paradigm -> TrainingRunRecord
    """
    from fedcompare.paradigms import local_model_name, run_paradigms

    if set(paradigms) == set(PARADIGMS):
        config.check_budget()

    layout = _layout(config, _load_cohort(config, out))
    results = run_paradigms(layout, config.model, config.train,
                            config.rounds, paradigms=paradigms,
                            workers=SETTINGS.get('workers') or 1)

    checkpoints = CheckpointQuerySet(output_dir=out)
    records = OrderedDict()
    for paradigm, (models, record, server) in results.items():
        if paradigm == LOCAL:
            for client_id, params in models.items():
                checkpoints.create(local_model_name(client_id), params,
                                   config.model)
        else:
            checkpoints.create(paradigm, models, config.model)
        if server is not None:
            for round_ in server.history.filter(state='aggregated'):
                checkpoints.create_round(round_, config.model)
            RoundLogQuerySet(output_dir=out).create(server.round_log)

        _write_curves(os.path.join(out, 'curves',
                                   '{}.csv'.format(paradigm.lower())), record)
        records[paradigm] = record
    return records


def _stored_models(config, out, paradigms):
    from fedcompare.paradigms import local_model_name

    checkpoints = CheckpointQuerySet(output_dir=out)
    models = OrderedDict()
    for paradigm in paradigms:
        if paradigm == LOCAL:
            models[LOCAL] = OrderedDict(
                (client_id, checkpoints.get(local_model_name(client_id))[0])
                for client_id in config.cohort.client_ids)
        else:
            models[paradigm] = checkpoints.get(paradigm)[0]
    return models


@recorded('evaluate')
def cmd_evaluate(config, out, paradigms=PARADIGMS):
    """Local-validation tables, pooled-test table, ROC and score files

    :rtype: fedcompare.models.EvaluationSet
    """
    layout = _layout(config, _load_cohort(config, out))
    evaluation = two_level_evaluate(_stored_models(config, out, paradigms),
                                    layout, config.model)

    for directory in ('tables', 'roc', 'scores'):
        os.makedirs(os.path.join(out, directory), exist_ok=True)
    for table in list(evaluation.local.values()) + [evaluation.pooled]:
        write_table(os.path.join(out, 'tables',
                                 '{}.csv'.format(table.name)), table)
    for name, curve in evaluation.roc.items():
        write_roc(os.path.join(out, 'roc', '{}.csv'.format(name)), curve)
    for name, scores in evaluation.test_scores.items():
        write_predictions(os.path.join(out, 'scores', '{}.csv'.format(name)),
                          scores, evaluation.test_labels)
    return evaluation


def load_evaluation(out):
    """Rebuilds an EvaluationSet from the files ``evaluate`` wrote

    :rtype: fedcompare.models.EvaluationSet
    """
    tables = os.path.join(out, 'tables')
    pooled_path = os.path.join(tables, '{}.csv'.format(POOLED_TEST))
    if not os.path.isfile(pooled_path):
        raise DoesNotExistError('no evaluation in {}'.format(out),
                                'hint: run the evaluate command first')

    pooled = read_table(pooled_path)
    local = OrderedDict()
    for paradigm in PARADIGMS:
        path = os.path.join(tables, 'local_{}.csv'.format(paradigm))
        if os.path.isfile(path):
            local[paradigm] = read_table(path)

    test_scores = OrderedDict()
    test_labels = None
    for row in pooled:
        path = os.path.join(out, 'scores', '{}.csv'.format(row.model))
        if not os.path.isfile(path):
            raise DoesNotExistError('no test scores for {}'.format(row.model),
                                    'path: {}'.format(path))
        test_scores[row.model], labels, _ = load_predictions(path)
        if test_labels is None:
            test_labels = labels
        elif not np.array_equal(labels, test_labels):
            raise ParseError('score files disagree on the test labels',
                             'file: {}'.format(path))
    return EvaluationSet(local, pooled, OrderedDict(), test_scores,
                         test_labels)


def _rater_labels(paths):
    from fedcompare.stats import load_rater_labels

    labels = OrderedDict()
    for path in paths:
        stem = os.path.splitext(os.path.basename(path))[0]
        for name, values in load_rater_labels(path).items():
            key = name if name not in labels else '{}:{}'.format(stem, name)
            labels[key] = values
    lengths = set(v.shape[0] for v in labels.values())
    if len(lengths) > 1:
        raise ParseError('raters labelled different numbers of items',
                         'lengths: {}'.format(sorted(lengths)))
    return labels


@recorded('stats')
def cmd_stats(config, out, alpha=0.05, raters=None, weighting=QUADRATIC):
    """Significance table and, given rater files, the kappa matrix

    :returns: (list of SignificanceRow or None, kappa summary or None)
    """
    from fedcompare.stats import (build_significance_table, comparison_plan,
                                  pairwise_kappa, write_kappa,
                                  write_significance_table)

    rows = None
    has_evaluation = os.path.isfile(os.path.join(
        out, 'tables', '{}.csv'.format(POOLED_TEST)))
    if has_evaluation or not raters:
        evaluation = load_evaluation(out)
        rows = build_significance_table(
            evaluation, comparison_plan(config.cohort.client_ids),
            alpha=alpha)
        write_significance_table(os.path.join(out, 'tables',
                                              'significance.csv'), rows)

    summary = None
    if raters:
        labels = _rater_labels(raters)
        n_categories = int(max(v.max() for v in labels.values())) + 1
        matrix, summary = pairwise_kappa(labels, max(n_categories, 2),
                                         weighting)
        os.makedirs(os.path.join(out, 'tables'), exist_ok=True)
        write_kappa(os.path.join(out, 'tables', 'kappa.csv'), list(labels),
                    matrix, summary)
    return rows, summary


def _round_history(out):
    from fedcompare.monitor import summarize_round

    checkpoints = CheckpointQuerySet(output_dir=out)
    rounds = checkpoints.rounds()
    if not rounds:
        raise DoesNotExistError('no federated round stored in {}'.format(out),
                                'hint: run the fl paradigm first')

    log = RoundLogQuerySet(output_dir=out).all()
    history = []
    for round_index in rounds:
        before, params = checkpoints.get_round(round_index)
        entries = dict((r.client_id, r) for r in log
                       if r.round == round_index)
        updates = []
        for client_id, client_params in params.items():
            if client_id not in entries:
                raise DoesNotExistError(
                    'round log misses a stored update',
                    'round {}: client {}'.format(round_index, client_id))
            entry = entries[client_id]
            updates.append(ClientUpdate(
                client_id, client_params, entry.n_samples,
                train_loss=entry.train_loss, val_loss=entry.val_loss,
                val_accuracy=entry.val_accuracy, round_index=round_index))
        history.append(summarize_round(before, updates, round_index))
    return history


@recorded('monitor')
def cmd_monitor(config, out):
    """Update diagnostics, outlier flags and aggregated global thresholds

    :rtype: OrderedDict
    """
    from fedcompare.monitor import (aggregate_thresholds, default_grid,
                                    diagnostics_report, dumps_report,
                                    flag_outlier_clients, grid_id)
    from fedcompare.paradigms import build_server

    history = _round_history(out)
    try:
        flags = flag_outlier_clients(history, config.monitor)
    except NotEnoughDataError as err:
        logger.warning('outlier detection skipped: {}'.format(err.message))
        flags = []

    final, _ = CheckpointQuerySet(output_dir=out).get(FEDERATED)
    layout = _layout(config, _load_cohort(config, out))
    grid = default_grid(config.eval.grid_size)
    version = grid_id(grid)
    server = build_server(layout, config.model, config.train, config.rounds)
    curves = server.j_curves(grid, version, params=final)
    thresholds = OrderedDict((rule, aggregate_thresholds(curves, rule))
                             for rule in AGGREGATION_RULES)

    report = diagnostics_report(history, flags, thresholds,
                                grid_version=version)
    path = os.path.join(out, 'diagnostics', 'report.json')
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, 'w', encoding='utf-8') as stream:
        stream.write(dumps_report(report))
    return report


def _pooled_aucs(evaluation):
    from fedcompare.paradigms import local_model_name

    pooled = evaluation.pooled
    local = [pooled.get(local_model_name(c)).report.auc
             for c in evaluation.local[LOCAL].aucs()]
    return (pooled.get(CENTRALIZED).report.auc,
            pooled.get(FEDERATED).report.auc,
            float(np.mean(local)))


def bench_verdict(cl, fl, mean_ll, min_gap=0.0):
    """Whether the medians follow the CL >= FL >= mean-LL ordering

    >>> bench_verdict(0.83, 0.76, 0.67)
    True
    >>> bench_verdict(0.83, 0.86, 0.67)
    False

    """
    return cl >= fl >= mean_ll and cl - mean_ll >= min_gap


def bench_seed(config, seed_dir=None):
    """Pooled-test (CL, FL, mean-LL) AUCs of one seed

    The cohort, checkpoints and tables are written under *seed_dir* when
    it is given; otherwise everything stays in memory.

    :rtype: (float, float, float)
    """
    from fedcompare.paradigms import run_paradigms

    if seed_dir is not None:
        cmd_synth(config, seed_dir)
        cmd_run(config, seed_dir)
        return _pooled_aucs(cmd_evaluate(config, seed_dir))

    config.check_budget()
    cohort = generate_cohort(config.cohort.specs, config.cohort.dim,
                             config.master_seed, margin=config.cohort.margin)
    layout = _layout(config, cohort)
    results = run_paradigms(layout, config.model, config.train,
                            config.rounds,
                            workers=SETTINGS.get('workers') or 1)
    models = OrderedDict((paradigm, result[0])
                         for paradigm, result in results.items())
    return _pooled_aucs(two_level_evaluate(models, layout, config.model))


@recorded('bench')
def cmd_bench(config, out):
    """synth, run and evaluate over ``bench.seeds`` consecutive seeds

    Per-seed artifacts go to ``seed_<s>`` directories unless
    ``bench.artifacts`` is off; ``bench.csv`` is always written.

    :returns: (passed, per-seed rows, medians)
    """
    rows = []
    for offset in range(config.bench.seeds):
        seed = config.master_seed + offset
        seed_dir = (os.path.join(out, 'seed_{}'.format(offset))
                    if config.bench.artifacts else None)
        rows.append((seed,) + bench_seed(config.with_seed(seed), seed_dir))
        logger.info('seed {}: CL {:.4f} FL {:.4f} mean LL {:.4f}'.format(
            *rows[-1]))

    medians = tuple(float(np.median([row[i] for row in rows]))
                    for i in (1, 2, 3))
    passed = bench_verdict(*medians, min_gap=config.bench.min_gap)

    with open(os.path.join(out, 'bench.csv'), 'w', newline='',
              encoding='utf-8') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(BENCH_COLUMNS)
        for row in rows:
            writer.writerow((row[0],) + tuple(format_float(v)
                                              for v in row[1:]))
        writer.writerow(('median',) + tuple(format_float(v)
                                            for v in medians))
        writer.writerow(('verdict', 'PASS' if passed else 'FAIL', '', ''))
    return passed, rows, medians


def load_config(args):
    """Experiment configuration selected by the command line

    ``--config`` wins over ``--preset``; without either, the
    ``config.cfg`` stored in the output directory is used. ``--seed`` and
    ``--out`` override the file, as ``FEDCOMPARE_SEED`` and
    ``FEDCOMPARE_OUTPUT_DIR`` do.

    :rtype: fedcompare.models.ExperimentConfig
    """
    out = args.out or SETTINGS.get('output_dir')
    if args.config:
        config = settings.from_file(args.config)
    elif args.preset:
        config = settings.from_preset(args.preset)
    elif out:
        config = settings.from_file(os.path.join(out, CONFIG_FILE))
    else:
        raise InvalidConfigurationError(
            'no configuration given',
            'hint: pass --config, --preset or --out')

    seed = args.seed if args.seed is not None else SETTINGS.get('seed')
    if seed is not None:
        config = config.with_seed(seed)
    return config.replace(output_dir=out or config.output_dir)


def _print_rows(header, rows, stream):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)


def handle_synth(config, args):
    rows = cmd_synth(config, config.output_dir)
    _print_rows(('client', 'n_neg', 'n_pos', 'n_total', 'overlap_pct'), rows,
                sys.stdout)
    return EXIT_OK


def handle_run(config, args):
    records = cmd_run(config, config.output_dir,
                      PARADIGM_CHOICES[args.paradigm])
    for paradigm, record in records.items():
        print('{}: {} model(s)'.format(paradigm, len(record.models)))
    return EXIT_OK


def handle_evaluate(config, args):
    evaluation = cmd_evaluate(config, config.output_dir,
                              PARADIGM_CHOICES[args.paradigm])
    for row in evaluation.pooled:
        print('{}\tAUC {:.4f}\tthreshold {:.4f}'.format(
            row.model, row.report.auc, row.choice.threshold))
    return EXIT_OK


def handle_stats(config, args):
    rows, summary = cmd_stats(config, config.output_dir, alpha=args.alpha,
                              raters=args.raters, weighting=args.weighting)
    for row in rows or ():
        print('{}\t{}\tp {}\t{}'.format(
            row.comparison.label, row.comparison.test,
            '{:.3e}'.format(row.result.p_value),
            'YES' if row.result.significant else 'NO'))
    if summary is not None:
        print('kappa ' + ' '.join('{} {:.4f}'.format(k, v)
                                  for k, v in summary.items()))
    return EXIT_OK


def handle_monitor(config, args):
    report = cmd_monitor(config, config.output_dir)
    for flag in report['flags']:
        print('flagged client {}: {}'.format(flag['client_id'],
                                            flag['reason']))
    for rule, value in report['thresholds'].items():
        print('{} threshold {:.4f} (J {:.4f})'.format(
            rule, value['threshold'], value['aggregate_j']))
    return EXIT_OK


def handle_bench(config, args):
    if not args.artifacts:
        config = config.replace(bench=config.bench.replace(artifacts=False))
    passed, _, medians = cmd_bench(config, config.output_dir)
    print('median AUC: CL {:.4f} FL {:.4f} mean LL {:.4f}'.format(*medians))
    print('PASS' if passed else 'FAIL')
    return EXIT_OK if passed else EXIT_BENCH_FAIL


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument('--config', help='experiment configuration file')
    source.add_argument('--preset', choices=settings.presets(),
                        help='shipped configuration')
    common.add_argument('--seed', type=int, help='master seed override')
    common.add_argument('--out', help='output directory')
    common.add_argument('-v', '--verbose', action='count', default=0,
                        help='-v for INFO, -vv for DEBUG')

    parser = argparse.ArgumentParser(
        prog='fedcompare',
        description='Local, centralized and federated learning compared '
                    'on synthetic non-IID cohorts.')
    parser.add_argument('--version', action='version',
                        version=fedcompare.__version__)
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    def add(name, handler, summary):
        command = commands.add_parser(name, parents=[common], help=summary)
        command.set_defaults(handler=handler)
        return command

    add('synth', handle_synth, 'generate the client cohort')
    for name, handler, summary in (
            ('run', handle_run, 'train the paradigms'),
            ('evaluate', handle_evaluate, 'two-level evaluation tables')):
        add(name, handler, summary).add_argument(
            '--paradigm', choices=list(PARADIGM_CHOICES), default='all')
    stats = add('stats', handle_stats, 'significance and agreement tables')
    stats.add_argument('--alpha', type=float, default=0.05)
    stats.add_argument('--raters', nargs='+', metavar='FILE',
                       help='rater label files, one column per rater')
    stats.add_argument('--weighting', default=QUADRATIC,
                       choices=(QUADRATIC, LINEAR, UNWEIGHTED))
    add('monitor', handle_monitor, 'federated round diagnostics')
    add('bench', handle_bench, 'multi-seed ordering benchmark').add_argument(
        '--no-artifacts', dest='artifacts', action='store_false',
        help='keep per-seed cohorts and models in memory')
    return parser


def configure_logging(verbose=0):
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, str(SETTINGS.get('log_level')).upper(),
                        logging.WARNING)
    logging.basicConfig(
        level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def main(argv=None):
    """
    :returns: exit code, 0 on success, 1 on invalid configuration or
              input files, 2 on any other failure, 3 when the benchmark
              ordering does not hold
    """
    try:
        settings.set(**settings.from_env())
    except InvalidConfigurationError as err:
        sys.stderr.write('{}\n'.format(err))
        return EXIT_INVALID

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return EXIT_INVALID if exit_.code else EXIT_OK

    configure_logging(args.verbose)
    try:
        return args.handler(load_config(args), args)
    except (InvalidConfigurationError, ParseError) as err:
        logger.error(str(err))
        return EXIT_INVALID
    except FedCompareError as err:
        logger.error(str(err))
        return EXIT_RUNTIME


if __name__ == '__main__':
    sys.exit(main())
