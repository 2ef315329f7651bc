"""Experiment configuration.

An experiment file is a flat `key=value` text file with dotted keys and `#`
comments. Its keys override `settings.SEISFM_EXPERIMENT_DEFAULTS`; every
key must be a known default or one of the per-encoder patterns

    encoder.<preset>.<field>=<int or comma list>
    pretrain.checkpoint.<preset>=<path>
"""
from collections import OrderedDict
from dataclasses import dataclass, field, fields, replace
import itertools
import logging
import os

import numpy as np
from django.conf import settings

from decoder import DecoderConfig
from encoders import PRESETS, EncoderConfig, preset
from seisdata import TASKS, DataConfig
from seisdata.augment import NOISE_DISTRIBUTIONS
from seisfm.exceptions import ConfigurationError
from training import TrainConfig
from training.downstream import STRATEGIES


logger = logging.getLogger(__name__)


ENCODER_FIELDS = tuple(f.name for f in fields(EncoderConfig) if f.name not in ('archetype', 'input_shape'))
SCATTER_AXES = ('params', 'dataset_size', 'latency')
REPORT_FORMATS = ('csv', 'json')
TRUE_VALUES = ('true', 'yes', 'on', '1')
FALSE_VALUES = ('false', 'no', 'off', '0')


def parse_config_text(text, source='<config>'):
    """Parses `key=value` lines into an ordered dict of strings."""
    values = OrderedDict()
    for number, line in enumerate(text.splitlines(), 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        key = key.strip()
        if not sep or not key:
            raise ConfigurationError("%s:%d: expected key=value, got '%s'" % (source, number, line))
        if key in values:
            raise ConfigurationError("%s:%d: duplicate key '%s'" % (source, number, key))
        values[key] = value.strip()
    return values


def read_config_file(path):
    try:
        with open(path) as f:
            return parse_config_text(f.read(), path)
    except OSError as e:
        raise ConfigurationError("Cannot read experiment file %s: %s" % (path, e))


def _is_pattern_key(key):
    parts = key.split('.')
    if len(parts) == 3 and parts[0] == 'encoder':
        return True
    return len(parts) == 3 and parts[:2] == ['pretrain', 'checkpoint']


def merge_values(overrides, seed=None, out=None):
    """Defaults updated by `overrides` and the command-line seed/output flags."""
    values = OrderedDict(sorted(settings.SEISFM_EXPERIMENT_DEFAULTS.items()))
    unknown = [k for k in overrides if k not in values and not _is_pattern_key(k)]
    if unknown:
        raise ConfigurationError("Unknown experiment keys: %s" % ", ".join(sorted(unknown)))
    values.update(overrides)
    if seed is not None:
        values['seed'] = str(seed)
    if out is not None:
        values['output_dir'] = str(out)
    return values


# -- value parsers -----------------------------------------------------------

def _int(values, key):
    try:
        return int(values[key])
    except ValueError:
        raise ConfigurationError("%s must be an integer, got '%s'" % (key, values[key]))


def _float(values, key):
    try:
        return float(values[key])
    except ValueError:
        raise ConfigurationError("%s must be a number, got '%s'" % (key, values[key]))


def _bool(value, key):
    lowered = value.strip().lower()
    if lowered in TRUE_VALUES:
        return True
    if lowered in FALSE_VALUES:
        return False
    raise ConfigurationError("%s must be true or false, got '%s'" % (key, value))


def _list(values, key, allowed=None):
    items = [v.strip() for v in values[key].split(',') if v.strip()]
    if allowed is not None:
        bad = [v for v in items if v not in allowed]
        if bad:
            raise ConfigurationError("%s: unknown value(s) %s (expected %s)" % (key, ", ".join(bad), ", ".join(allowed)))
    return items


def _ints(value, key):
    try:
        return tuple(int(v) for v in value.split(',') if v.strip())
    except ValueError:
        raise ConfigurationError("%s must be a comma list of integers, got '%s'" % (key, value))


def _shape(values, key):
    shape = _ints(values[key], key)
    if len(shape) != 2 or min(shape) < 1:
        raise ConfigurationError("%s must be two positive integers, got '%s'" % (key, values[key]))
    return shape


# -- grid pieces ---------------------------------------------------------------

def _encoders(values):
    names = _list(values, 'encoders', sorted(PRESETS))
    overrides = {}
    for key, value in values.items():
        parts = key.split('.')
        if parts[0] != 'encoder' or len(parts) != 3:
            continue
        _, name, attribute = parts
        if name not in PRESETS:
            raise ConfigurationError("%s: unknown encoder preset '%s'" % (key, name))
        if attribute not in ENCODER_FIELDS:
            raise ConfigurationError("%s: unknown encoder field '%s' (expected one of %s)"
                                     % (key, attribute, ", ".join(ENCODER_FIELDS)))
        parsed = _ints(value, key)
        if not isinstance(getattr(PRESETS[name], attribute), tuple):
            if len(parsed) != 1:
                raise ConfigurationError("%s takes a single integer, got '%s'" % (key, value))
            parsed = parsed[0]
        overrides.setdefault(name, {})[attribute] = parsed
    encoders = []
    for name in names:
        config = replace(preset(name), **overrides.get(name, {}))
        config.validate()
        encoders.append((name, config))
    return tuple(encoders)


def decoder_label(config):
    return '%s-%s-%s-x%d' % ('skip' if config.skip_connections else 'noskip', config.block, config.upsample,
                             config.bottleneck_multiplier)


def _decoders(values):
    """Every combination of the comma-listed decoder settings."""
    skips = [_bool(v, 'decoder.skip_connections') for v in _list(values, 'decoder.skip_connections')]
    blocks = _list(values, 'decoder.block')
    upsamplers = _list(values, 'decoder.upsample')
    multipliers = [int(m) for m in _ints(values['decoder.bottleneck_multiplier'], 'decoder.bottleneck_multiplier')]
    head = _int(values, 'decoder.head_channels')
    decoders = []
    for skip, block, upsample, multiplier in itertools.product(skips, blocks, upsamplers, multipliers):
        config = DecoderConfig(skip, block, upsample, multiplier, head).validate()
        decoders.append((decoder_label(config), config))
    return tuple(decoders)


@dataclass(frozen=True)
class PretrainSettings:
    count: int = 200
    epochs: int = 30
    mask_ratio: float = 0.6
    checkpoints: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BenchSettings:
    timing: bool = True
    batch: int = 8
    warmup: int = 1
    reps: int = 3


@dataclass(frozen=True)
class ReportSettings:
    formats: tuple = REPORT_FORMATS
    scatter: tuple = SCATTER_AXES
    log_x: tuple = ('dataset_size',)
    min_combined: float = None


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    seed: int
    output_dir: str
    encoders: tuple
    decoders: tuple
    tasks: tuple
    strategies: tuple
    counts: dict
    data: DataConfig
    train: TrainConfig
    pretrain: PretrainSettings = field(default_factory=PretrainSettings)
    bench: BenchSettings = field(default_factory=BenchSettings)
    report: ReportSettings = field(default_factory=ReportSettings)
    dataset_sizes: tuple = ()
    workers: int = 1
    dtype: str = 'float32'
    values: dict = field(default_factory=dict, compare=False)

    @property
    def compute_dtype(self):
        return np.dtype(self.dtype)

    def encoder(self, name):
        for encoder_name, config in self.encoders:
            if encoder_name == name:
                return config
        raise ConfigurationError("Encoder '%s' is not part of experiment %s" % (name, self.name))

    def path(self, *parts):
        return os.path.join(self.output_dir, *parts)

    def as_text(self):
        """The merged configuration as an experiment file."""
        return "".join("%s=%s\n" % kv for kv in sorted(self.values.items()))

    def validate(self):
        for what in ('encoders', 'decoders', 'tasks', 'strategies'):
            if not getattr(self, what):
                raise ConfigurationError("Experiment %s has an empty %s grid" % (self.name, what))
        names = [n for n, _ in self.encoders]
        if len(set(names)) != len(names):
            raise ConfigurationError("Encoder names must be unique, got %s" % names)
        labels = [label for label, _ in self.decoders]
        if len(set(labels)) != len(labels):
            raise ConfigurationError("Decoder settings repeat: %s" % labels)
        for task in self.tasks:
            if self.counts.get(task, 0) < 2:
                raise ConfigurationError("data.%s.count must be at least 2 to hold out an evaluation split" % task)
        if any(s < 1 for s in self.dataset_sizes):
            raise ConfigurationError("data.sizes must be positive, got %s" % list(self.dataset_sizes))
        if self.bench.reps < 3:
            raise ConfigurationError("bench.reps must be at least 3")
        self.train.validate()
        return self


def build_experiment(values):
    """ExperimentConfig from a merged flat dict."""
    tasks = tuple(_list(values, 'tasks', TASKS))
    data = DataConfig(
        demultiple_shape=_shape(values, 'data.demultiple.shape'),
        shot_shape=_shape(values, 'data.shot.shape'),
        cut_shape=_shape(values, 'data.cut.shape'),
        mask_ratio=_float(values, 'data.interpolation.mask_ratio'),
        mask_pattern=values['data.interpolation.pattern'],
        noise_level=_float(values, 'data.denoise.level'),
        noise_distribution=values['data.denoise.distribution'],
        eval_noise_distribution=values['data.denoise.eval_distribution'] or None,
    )
    for key in ('data.denoise.distribution', 'data.denoise.eval_distribution'):
        if values[key] and values[key] not in NOISE_DISTRIBUTIONS:
            raise ConfigurationError("%s must be one of %s, got '%s'" % (key, ", ".join(NOISE_DISTRIBUTIONS), values[key]))
    seed = _int(values, 'seed')
    train = TrainConfig(
        lr=_float(values, 'train.lr'),
        weight_decay=_float(values, 'train.weight_decay'),
        epochs=_int(values, 'train.epochs'),
        batch=_int(values, 'train.batch'),
        seed=seed,
        loss=values['train.loss'],
        task_epochs={t: _int(values, 'train.epochs.%s' % t) for t in TASKS},
    )
    checkpoints = {key.split('.', 2)[2]: value for key, value in values.items()
                   if key.startswith('pretrain.checkpoint.') and value}
    min_combined = values['report.min_combined']
    config = ExperimentConfig(
        name=values['name'],
        seed=seed,
        output_dir=values['output_dir'],
        encoders=_encoders(values),
        decoders=_decoders(values),
        tasks=tasks,
        strategies=tuple(_list(values, 'strategies', STRATEGIES)),
        counts={t: _int(values, 'data.%s.count' % t) for t in TASKS},
        data=data,
        train=train,
        pretrain=PretrainSettings(_int(values, 'pretrain.count'), _int(values, 'pretrain.epochs'),
                                  _float(values, 'pretrain.mask_ratio'), checkpoints),
        bench=BenchSettings(_bool(values['bench.timing'], 'bench.timing'), _int(values, 'bench.batch'),
                            _int(values, 'bench.warmup'), _int(values, 'bench.reps')),
        report=ReportSettings(tuple(_list(values, 'report.formats', REPORT_FORMATS)),
                              tuple(_list(values, 'report.scatter', SCATTER_AXES)),
                              tuple(_list(values, 'report.log_x', SCATTER_AXES)),
                              float(min_combined) if min_combined else None),
        dataset_sizes=_ints(values['data.sizes'], 'data.sizes'),
        workers=_int(values, 'data.workers'),
        dtype=settings.SEISFM_COMPUTE_DTYPE,
        values=dict(values),
    )
    return config.validate()


def load_experiment(path=None, seed=None, out=None, overrides=None):
    """Reads an experiment file (optional) and applies `overrides` and the seed/output flags."""
    values = read_config_file(path) if path else OrderedDict()
    values.update(overrides or {})
    config = build_experiment(merge_values(values, seed, out))
    logger.info("Experiment %s: %d encoders x %d decoders x %d strategies on %s (seed %d)", config.name,
                len(config.encoders), len(config.decoders), len(config.strategies), ", ".join(config.tasks), config.seed)
    return config
