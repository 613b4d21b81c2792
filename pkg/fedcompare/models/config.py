# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

import json
import logging
from collections import OrderedDict

from fedcompare.constants import MANIFEST_VERSION
from fedcompare.exceptions import InvalidConfigurationError
from fedcompare.models.base import BaseModel, ModelDiff
from fedcompare.models.monitor import OutlierPolicy
from fedcompare.models.params import PredictorSpec
from fedcompare.models.training import RoundConfig, TrainConfig
from fedcompare.utils import immutable, sha256_bytes


logger = logging.getLogger(__name__)


@immutable
class CohortConfig(BaseModel):
    """Synthetic cohort: client specs plus the shared cluster geometry

    :param  margin: distance between the two class means
    :param  shift_scale: scale of seed-generated client shifts
    :param  shift_dims: leading coordinates a generated shift touches
    """
    __slots__ = [
        'specs',
        'dim',
        'margin',
        'shift_scale',
        'shift_dims',
    ]

    def __init__(self, specs, dim, margin=2.0, shift_scale=1.0,
                 shift_dims=None):
        specs = tuple(specs)
        dim = int(dim)
        if dim < 2:
            raise InvalidConfigurationError('cohort dimension must be >= 2',
                                            'cohort.dim: {}'.format(dim))
        if not specs:
            raise InvalidConfigurationError('cohort has no client',
                                            'client: none')
        ids = [s.client_id for s in specs]
        if len(set(ids)) != len(ids):
            raise InvalidConfigurationError('client ids must be distinct',
                                            'client: {}'.format(ids))
        shift_dims = dim if shift_dims is None else int(shift_dims)
        if not 0 <= shift_dims <= dim:
            raise InvalidConfigurationError(
                'shift_dims must lie in [0, dim]',
                'cohort.shift_dims: {}'.format(shift_dims))

        self.specs = specs
        self.dim = dim
        self.margin = float(margin)
        self.shift_scale = float(shift_scale)
        self.shift_dims = shift_dims

    @property
    def client_ids(self):
        return [s.client_id for s in self.specs]


@immutable
class SplitConfig(BaseModel):
    __slots__ = [
        'test_fraction',
        'validation_total_fraction',
        'allow_unstratified',
    ]

    def __init__(self, test_fraction=0.10, validation_total_fraction=0.10,
                 allow_unstratified=False):
        test_fraction = float(test_fraction)
        validation_total_fraction = float(validation_total_fraction)
        if not 0.0 < test_fraction < 1.0:
            raise InvalidConfigurationError(
                'test_fraction must lie in (0, 1)',
                'splits.test_fraction: {}'.format(test_fraction))
        if not 0.0 < validation_total_fraction < 1.0 - test_fraction:
            raise InvalidConfigurationError(
                'validation_total_fraction must lie in (0, 1 - test_fraction)',
                'splits.validation_total_fraction: {}'.format(
                    validation_total_fraction))

        self.test_fraction = test_fraction
        self.validation_total_fraction = validation_total_fraction
        self.allow_unstratified = bool(allow_unstratified)

    @property
    def client_validation_fraction(self):
        return self.validation_total_fraction / (1.0 - self.test_fraction)


@immutable
class EvalConfig(BaseModel):
    __slots__ = [
        'grid_size',
    ]

    def __init__(self, grid_size=101):
        if int(grid_size) < 1:
            raise InvalidConfigurationError(
                'grid_size must be at least 1',
                'eval.grid_size: {}'.format(grid_size))
        self.grid_size = int(grid_size)


@immutable
class BenchConfig(BaseModel):
    """Multi-seed benchmark settings

    :param  seeds: number of master seeds, ``master_seed + s``
    :param  min_gap: required CL minus mean-LL AUC gap, 0 disables it
    :param  artifacts: write every seed's cohort, checkpoints and tables
    """
    __slots__ = [
        'seeds',
        'min_gap',
        'artifacts',
    ]

    def __init__(self, seeds=5, min_gap=0.0, artifacts=True):
        if int(seeds) < 1:
            raise InvalidConfigurationError('bench needs at least one seed',
                                            'bench.seeds: {}'.format(seeds))
        self.seeds = int(seeds)
        self.min_gap = float(min_gap)
        self.artifacts = bool(artifacts)


@immutable
class ExperimentConfig(BaseModel):
    """Everything an experiment run depends on"""
    __slots__ = [
        'master_seed',
        'cohort',
        'model',
        'train',
        'rounds',
        'splits',
        'eval',
        'monitor',
        'bench',
        'output_dir',
    ]

    def __init__(self, master_seed, cohort, model, train=None, rounds=None,
                 splits=None, eval=None, monitor=None, bench=None,
                 output_dir='output'):
        if model.input_dim != cohort.dim:
            raise InvalidConfigurationError(
                'model input_dim must equal the cohort dimension',
                'model.input_dim: {} != {}'.format(model.input_dim,
                                                   cohort.dim))

        self.master_seed = int(master_seed)
        self.cohort = cohort
        self.model = model
        self.train = train if train is not None else TrainConfig()
        self.rounds = rounds if rounds is not None else RoundConfig()
        self.splits = splits if splits is not None else SplitConfig()
        self.eval = eval if eval is not None else EvalConfig()
        self.monitor = monitor if monitor is not None else OutlierPolicy()
        self.bench = bench if bench is not None else BenchConfig()
        self.output_dir = output_dir

    def check_budget(self):
        """Warns when FL and LL/CL do not train for the same epochs"""
        if self.rounds.epoch_budget != self.train.epochs:
            logger.warning(
                'rounds x local_epochs = {} differs from train.epochs = {}; '
                'paradigms are not compared on an equal budget'.format(
                    self.rounds.epoch_budget, self.train.epochs))
            return False
        return True

    def with_seed(self, master_seed):
        """Reseeds the cohort, the splits and every training stream"""
        return self.replace(
            master_seed=master_seed,
            train=self.train.replace(shuffle_seed=master_seed))


class RunManifest(object):
    """Content hashes of every artifact written in an output directory

    :param  config_hash: sha256 of the serialized experiment config
    :param  files: relative path -> sha256
    :param  timings: command -> wall-clock seconds
    """
    def __init__(self, config_hash, seed, versions, files=None, timings=None,
                 version=MANIFEST_VERSION):
        self.config_hash = config_hash
        self.seed = int(seed)
        self.versions = OrderedDict(sorted((versions or {}).items()))
        self.files = OrderedDict(sorted((files or {}).items()))
        self.timings = OrderedDict(timings or {})
        self.version = int(version)

    def __repr__(self):
        return '<RunManifest seed={} files={}>'.format(self.seed,
                                                       len(self.files))

    @staticmethod
    def hash_config(text):
        return sha256_bytes(text.encode('utf-8'))

    def as_dict(self):
        return OrderedDict((
            ('version', self.version),
            ('config_hash', self.config_hash),
            ('seed', self.seed),
            ('versions', self.versions),
            ('files', self.files),
            ('timings', self.timings),
        ))

    def dumps(self):
        return json.dumps(self.as_dict(), indent=2) + '\n'

    @classmethod
    def loads(cls, text):
        data = json.loads(text)
        return cls(data['config_hash'], data['seed'], data.get('versions'),
                   files=data.get('files'), timings=data.get('timings'),
                   version=data.get('version', MANIFEST_VERSION))

    def diff(self, other):
        """Compares artifacts with *other*, timings excluded

        :rtype: fedcompare.models.base.ModelDiff
        """
        diff = ModelDiff(
            ('config_hash', self.config_hash, other.config_hash),
            ('seed', self.seed, other.seed),
            ('versions', dict(self.versions), dict(other.versions)),
        )
        for path in sorted(set(self.files) | set(other.files)):
            diff.add_input(('files/' + path, self.files.get(path),
                            other.files.get(path)))
        return diff
