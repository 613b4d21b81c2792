# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

import io
import os
from configparser import ConfigParser, Error as ConfigParserError

from fedcompare.constants import ABORT
from fedcompare.exceptions import InvalidConfigurationError, translate
from fedcompare.utils import format_float


CLIENT_PREFIX = 'client:'

PRESETS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                           'presets')

DEFAULTS = {
    'workers': 1,
    'log_level': 'WARNING',
}


class _Section(object):
    """Typed accessors that name the offending ``section.key``"""
    def __init__(self, config, name):
        self.config = config
        self.name = name

    def _raw(self, key, default):
        if self.config.has_option(self.name, key):
            value = self.config.get(self.name, key)
            if value is not None and value.strip() != '':
                return value.strip()
        if default is _REQUIRED:
            raise InvalidConfigurationError(
                'missing configuration value',
                '{}.{}: required'.format(self.name, key))
        return default

    def _convert(self, key, default, convert):
        value = self._raw(key, default)
        if value is default:
            return value
        try:
            return convert(value)
        except ValueError:
            raise InvalidConfigurationError(
                'invalid configuration value',
                '{}.{}: {!r}'.format(self.name, key, value))

    def int(self, key, default=None):
        return self._convert(key, default, int)

    def float(self, key, default=None):
        return self._convert(key, default, float)

    def str(self, key, default=None):
        return self._raw(key, default)

    def bool(self, key, default=None):
        def convert(value):
            lowered = value.lower()
            if lowered in ('1', 'yes', 'true', 'on'):
                return True
            if lowered in ('0', 'no', 'false', 'off'):
                return False
            raise ValueError(value)
        return self._convert(key, default, convert)

    def floats(self, key, default=None):
        return self._convert(
            key, default,
            lambda value: tuple(float(x) for x in value.split(',')
                                if x.strip()))

    def ints(self, key, default=None):
        return self._convert(
            key, default,
            lambda value: tuple(int(x) for x in value.split(',')
                                if x.strip()))


_REQUIRED = object()


def _section(config, name):
    if not config.has_section(name):
        config.add_section(name)
    return _Section(config, name)


def _client_specs(config, cohort):
    from fedcompare.fabric import shift_vector
    from fedcompare.models import ClientSpec

    specs = []
    for name in config.sections():
        if not name.startswith(CLIENT_PREFIX):
            continue
        try:
            client_id = int(name[len(CLIENT_PREFIX):])
        except ValueError:
            raise InvalidConfigurationError('invalid client section',
                                            '{}: not an integer id'.format(name))

        section = _Section(config, name)
        shift = section.floats('feature_shift')
        shift_seed = section.int('feature_shift_seed')
        if shift is not None and shift_seed is not None:
            raise InvalidConfigurationError(
                'feature_shift and feature_shift_seed are exclusive',
                '{}.feature_shift: both given'.format(name))
        if shift is None:
            if shift_seed is None:
                shift = (0.0,) * cohort.int('dim', _REQUIRED)
            else:
                shift = shift_vector(shift_seed, cohort.int('dim', _REQUIRED),
                                     cohort.int('shift_dims'),
                                     cohort.float('shift_scale', 1.0))
        if len(shift) != cohort.int('dim', _REQUIRED):
            raise InvalidConfigurationError(
                'feature_shift length must equal the cohort dimension',
                '{}.feature_shift: {} values'.format(name, len(shift)))

        specs.append(ClientSpec(
            client_id,
            section.int('n_total', _REQUIRED),
            section.float('overlap_fraction', _REQUIRED),
            feature_shift=shift,
            label_noise_rate=section.float('label_noise_rate', 0.0),
            feature_shift_seed=shift_seed,
        ))

    return sorted(specs, key=lambda s: s.client_id)


@translate(ConfigParserError, to=InvalidConfigurationError)
def from_stream(stream):
    """Parses an experiment configuration in INI format.

    Example:

    >>> stream = io.StringIO('''
    ... [experiment]
    ... master_seed = 7
    ...
    ... [cohort]
    ... dim = 2
    ...
    ... [client:0]
    ... n_total = 650
    ... overlap_fraction = 0.123
    ...
    ... [model]
    ... kind = logistic
    ... ''')
    >>> config = from_stream(stream)
    >>> config.master_seed
    7
    >>> config.cohort.specs[0].n_total
    650
    >>> config.train.lr
    0.0001

    :param      stream: of chars in INI format.
    :type       stream: stream.

    :rtype: fedcompare.models.ExperimentConfig

    """
    from fedcompare.models import (BenchConfig, CohortConfig, EvalConfig,
                                   ExperimentConfig, OutlierPolicy,
                                   PredictorSpec, RebalancePolicy, RoundConfig,
                                   SplitConfig, TrainConfig)

    config = ConfigParser(allow_no_value=True, interpolation=None)
    config.read_file(stream)

    experiment = _section(config, 'experiment')
    cohort = _section(config, 'cohort')
    model = _section(config, 'model')
    train = _section(config, 'train')
    rebalance = _section(config, 'rebalance')
    rounds = _section(config, 'rounds')
    splits = _section(config, 'splits')
    eval_ = _section(config, 'eval')
    monitor = _section(config, 'monitor')
    bench = _section(config, 'bench')

    master_seed = experiment.int('master_seed', _REQUIRED)
    dim = cohort.int('dim', _REQUIRED)

    return ExperimentConfig(
        master_seed,
        CohortConfig(
            _client_specs(config, cohort),
            dim,
            margin=cohort.float('margin', 2.0),
            shift_scale=cohort.float('shift_scale', 1.0),
            shift_dims=cohort.int('shift_dims'),
        ),
        PredictorSpec(
            kind=model.str('kind', _REQUIRED),
            input_dim=model.int('input_dim', dim),
            hidden_sizes=model.ints('hidden_sizes', ()),
            activation=model.str('activation', 'relu'),
        ),
        train=TrainConfig(
            epochs=train.int('epochs', 10),
            batch_size=train.int('batch_size', 32),
            lr=train.float('lr', 1e-4),
            weight_decay=train.float('weight_decay', 1e-5),
            beta1=train.float('beta1', 0.9),
            beta2=train.float('beta2', 0.999),
            epsilon=train.float('epsilon', 1e-8),
            rebalance=RebalancePolicy(
                regenerate_every=rebalance.int('regenerate_every', 2),
                jitter_scale=rebalance.float('jitter_scale', 0.1),
                enabled=rebalance.bool('enabled', True),
            ),
            shuffle_seed=train.int('shuffle_seed', master_seed),
        ),
        rounds=RoundConfig(
            rounds=rounds.int('rounds', 5),
            local_epochs=rounds.int('local_epochs', 2),
            failure_policy=rounds.str('failure_policy', ABORT),
            workers=rounds.int('workers', 1),
        ),
        splits=SplitConfig(
            test_fraction=splits.float('test_fraction', 0.10),
            validation_total_fraction=splits.float(
                'validation_total_fraction', 0.10),
            allow_unstratified=splits.bool('allow_unstratified', False),
        ),
        eval=EvalConfig(grid_size=eval_.int('grid_size', 101)),
        monitor=OutlierPolicy(
            z_threshold=monitor.float('z_threshold', 3.0),
            min_scale=monitor.float('min_scale', 0.01),
        ),
        bench=BenchConfig(
            seeds=bench.int('seeds', 5),
            min_gap=bench.float('min_gap', 0.0),
            artifacts=bench.bool('artifacts', True),
        ),
        output_dir=experiment.str('output_dir', 'output'),
    )


def from_file(path):
    """Parses an experiment configuration file in INI format.

    :param      path: to file in INI format.
    :type       path: string.

    :rtype: fedcompare.models.ExperimentConfig

    Let raise the underlying exception if it cannot load the file
    (permission denied, file is a directory, etc...)

    """
    if not os.path.exists(path):
        raise InvalidConfigurationError('no such configuration file',
                                        'path: {}'.format(path))

    with open(path, encoding='utf-8') as stream:
        return from_stream(stream)


def preset_path(name):
    path = os.path.join(PRESETS_DIR, '{}.cfg'.format(name))
    if not os.path.exists(path):
        raise InvalidConfigurationError(
            'unknown preset',
            'preset: {} (available: {})'.format(name, ', '.join(presets())))
    return path


def presets():
    return sorted(os.path.splitext(name)[0] for name in
                  os.listdir(PRESETS_DIR) if name.endswith('.cfg'))


def from_preset(name):
    return from_file(preset_path(name))


def _join(values):
    return ', '.join(format_float(v) if isinstance(v, float) else str(v)
                     for v in values)


def to_stream(config, stream):
    """Serializes *config* in INI format

    ``from_stream`` parses the output back into an equal configuration.
    """
    parser = ConfigParser(interpolation=None)

    def fill(name, items):
        parser.add_section(name)
        for key, value in items:
            if value is None:
                continue
            if isinstance(value, bool):
                value = 'true' if value else 'false'
            elif isinstance(value, float):
                value = format_float(value)
            elif isinstance(value, tuple):
                value = _join(value)
            parser.set(name, key, str(value))

    fill('experiment', (('master_seed', config.master_seed),
                        ('output_dir', config.output_dir)))

    cohort = config.cohort
    fill('cohort', (('dim', cohort.dim),
                    ('margin', cohort.margin),
                    ('shift_scale', cohort.shift_scale),
                    ('shift_dims', cohort.shift_dims)))

    for spec in cohort.specs:
        fill('{}{}'.format(CLIENT_PREFIX, spec.client_id), (
            ('n_total', spec.n_total),
            ('overlap_fraction', spec.overlap_fraction),
            ('label_noise_rate', spec.label_noise_rate),
            ('feature_shift_seed', spec.feature_shift_seed),
            ('feature_shift', (spec.feature_shift
                               if spec.feature_shift_seed is None else None)),
        ))

    model = config.model
    fill('model', (('kind', model.kind),
                   ('input_dim', model.input_dim),
                   ('hidden_sizes', model.hidden_sizes or None),
                   ('activation', model.activation)))

    train = config.train
    fill('train', (('epochs', train.epochs),
                   ('batch_size', train.batch_size),
                   ('lr', train.lr),
                   ('weight_decay', train.weight_decay),
                   ('beta1', train.beta1),
                   ('beta2', train.beta2),
                   ('epsilon', train.epsilon),
                   ('shuffle_seed', train.shuffle_seed)))

    policy = train.rebalance
    fill('rebalance', (('enabled', policy.enabled),
                       ('regenerate_every', policy.regenerate_every),
                       ('jitter_scale', policy.jitter_scale)))

    rounds = config.rounds
    fill('rounds', (('rounds', rounds.rounds),
                    ('local_epochs', rounds.local_epochs),
                    ('failure_policy', rounds.failure_policy),
                    ('workers', rounds.workers)))

    splits = config.splits
    fill('splits', (('test_fraction', splits.test_fraction),
                    ('validation_total_fraction',
                     splits.validation_total_fraction),
                    ('allow_unstratified', splits.allow_unstratified)))

    fill('eval', (('grid_size', config.eval.grid_size),))
    fill('monitor', (('z_threshold', config.monitor.z_threshold),
                     ('min_scale', config.monitor.min_scale)))
    fill('bench', (('seeds', config.bench.seeds),
                   ('min_gap', config.bench.min_gap),
                   ('artifacts', config.bench.artifacts)))

    parser.write(stream)


def dumps(config):
    stream = io.StringIO()
    to_stream(config, stream)
    return stream.getvalue()


def from_env():
    """Retrieves runtime overrides from environment.

    Supported environment variables are:
        - `FEDCOMPARE_SEED`
        - `FEDCOMPARE_OUTPUT_DIR`
        - `FEDCOMPARE_WORKERS`
        - `FEDCOMPARE_LOG_LEVEL`

    :rtype: dict

    """
    settings = {}
    for key, variable, convert in (('seed', 'FEDCOMPARE_SEED', int),
                                   ('output_dir', 'FEDCOMPARE_OUTPUT_DIR', str),
                                   ('workers', 'FEDCOMPARE_WORKERS', int),
                                   ('log_level', 'FEDCOMPARE_LOG_LEVEL', str)):
        value = os.environ.get(variable)
        if value is None or value == '':
            continue
        try:
            settings[key] = convert(value)
        except ValueError:
            raise InvalidConfigurationError(
                'invalid environment variable',
                '{}: {!r}'.format(variable, value))
    return settings


def get():
    """Retrieves runtime settings: defaults updated from the environment.

    :rtype: dict

    """
    settings = dict(DEFAULTS)
    settings.update(from_env())
    return settings


def set(**settings):
    """Set settings"""
    from fedcompare.core import SETTINGS
    SETTINGS.update({k: v for k, v in settings.items() if v is not None})
