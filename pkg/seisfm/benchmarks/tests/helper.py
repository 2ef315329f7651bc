"""Utility functions for test cases"""

import os

import numpy as np

from benchmarks.config import load_experiment
from benchmarks.models import ExperimentRun
from benchmarks.runner import ReportRow
from encoders import CONV
from encoders.config import HIERARCHICAL_ARCHETYPES
from metrics import MetricsRecord, combined_ssim
from seisdata import DEMULTIPLE, TASKS, Gather, TaskSample
from training.downstream import SCRATCH


# A conv encoder small enough to train a whole grid in seconds
TINY_ENCODER = {
    'encoder.conv-tiny.stage_channels': '4,4,8,8',
    'encoder.conv-tiny.stage_depths': '1,1,1,1',
    'encoder.conv-tiny.patch_stride': '2',
    'encoder.conv-tiny.window': '2',
    'encoder.conv-tiny.heads': '1,1,2,2',
}


def tiny_values(output_dir, overrides=None):
    """Experiment keys of a one-encoder grid on very small gathers, updated by `overrides`."""
    values = dict(TINY_ENCODER)
    values.update({
        'name': 'tiny',
        'seed': '3',
        'output_dir': output_dir,
        'encoders': 'conv-tiny',
        'tasks': 'demultiple',
        'strategies': 'scratch',
        'data.demultiple.count': '4',
        'data.interpolation.count': '4',
        'data.denoise.count': '4',
        'data.demultiple.shape': '32,32',
        'data.shot.shape': '96,32',
        'data.cut.shape': '16,16',
        'train.batch': '4',
        'train.epochs': '1',
        'train.epochs.demultiple': '1',
        'train.epochs.interpolation': '1',
        'train.epochs.denoise': '1',
        'pretrain.count': '4',
        'pretrain.epochs': '1',
        'bench.timing': 'false',
        'bench.batch': '2',
        'report.scatter': 'params',
        'report.log_x': '',
    })
    values.update(overrides or {})
    return values


def tiny_config(output_dir, overrides=None):
    return load_experiment(overrides=tiny_values(output_dir, overrides))


def write_config(directory, overrides=None):
    """Writes a tiny experiment file into `directory` and returns its path."""
    path = os.path.join(directory, 'tiny.cfg')
    with open(path, 'w') as f:
        f.write("# tiny test grid\n")
        for key, value in sorted(tiny_values(os.path.join(directory, "out"), overrides).items()):
            f.write("%s=%s\n" % (key, value))
    return path


def create_row(name='conv-tiny', archetype=CONV, strategy=SCRATCH, tasks=TASKS, ssim=0.9, params=(100, 150),
               dataset_size=10, latency=0.01, failed=False, error=''):
    """Returns a ReportRow with one MetricsRecord per task.

    SSIM of the n-th task is `ssim - 0.1 * n`, so rows with all three tasks
    have a combined score of 3 * ssim - 0.3.
    """
    row = ReportRow(name, archetype, archetype in HIERARCHICAL_ARCHETYPES, strategy, 'skip-modern-conv-bilinear-x2',
                    dataset_size, failed=failed, error=error)
    for n, task in enumerate(tasks):
        row.records[task] = MetricsRecord(task, 0.01 * (n + 1), 20.0 + n, ssim - 0.1 * n, params[0], params[1],
                                          100.0, latency)
    if all(t in row.records for t in TASKS):
        row.combined = combined_ssim({t: r.ssim for t, r in row.records.items()})
    return row


def create_run(rows=None, name='tiny', seed=3, output_dir='/tmp/seisfm-tiny', config_text=''):
    """Returns a stored ExperimentRun holding `rows` (default: one complete row)."""
    run = ExperimentRun.objects.create(name=name, seed=seed, output_dir=output_dir, config_text=config_text)
    run.record_rows(rows if rows is not None else [create_row()])
    return run


def create_sample(task=DEMULTIPLE, shape=(8, 6), seed=0):
    """TaskSample with small integer amplitudes, so panel arithmetic is exact."""
    rng = np.random.default_rng(seed)
    label = rng.integers(-4, 5, size=shape).astype(np.float64)
    given = label + rng.integers(-2, 3, size=shape)
    return TaskSample(Gather(given), Gather(label), task)
