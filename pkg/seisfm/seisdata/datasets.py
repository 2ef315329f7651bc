"""Task datasets built from seeded synthetic gathers.

Sample i of a dataset depends only on (seed, i) and, for the cut-based
tasks, on the epoch: the layered model and the shot gather come from the
stream (seed, i) and the cut, mask or noise from (seed, i, epoch).
Generation order and worker count therefore never change the samples.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
import logging
import os

import numpy as np

from .augment import GAUSSIAN, RANDOM, add_noise, mask_traces, normalize, random_cut_below_first_break
from .errors import SeisDataError
from .gather import DEMULTIPLE, INTERPOLATION, TASKS, TaskSample
from .native import read_gather, write_gather
from .synth import random_layered_model, synthesize_demultiple_pair, synthesize_shot_gather


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DataConfig:
    """Generator settings; sizes are desk-scale defaults."""
    demultiple_shape: tuple = (64, 512)
    demultiple_dt: float = 0.008
    moveout_range: tuple = (1e-4, 4e-4)
    shot_shape: tuple = (256, 128)
    shot_dt: float = 0.004
    trace_spacing: float = 12.5
    near_velocity: float = 1500.0
    cut_shape: tuple = (64, 64)
    mask_ratio: float = 0.3
    mask_pattern: str = RANDOM
    noise_level: float = 0.2
    noise_distribution: str = GAUSSIAN
    eval_noise_distribution: str = None

    def for_evaluation(self):
        """Settings of the held-out split (noise may differ from training)."""
        if self.eval_noise_distribution:
            return replace(self, noise_distribution=self.eval_noise_distribution)
        return self


# Full-size shots (the size of the public field gathers) with 224x224 cuts.
PAPER_SCALE = DataConfig(shot_shape=(800, 1151), cut_shape=(224, 224))


def _shot(seed, index, config):
    rng = np.random.default_rng([seed, index])
    h, w = config.shot_shape
    model = random_layered_model(rng, h * config.shot_dt)
    return synthesize_shot_gather(model, config.near_velocity, h, w, config.shot_dt, config.trace_spacing, rng)


def make_sample(task, seed, index, config=None, epoch=0):
    """The index-th sample of a task dataset."""
    config = config or DataConfig()
    if task == DEMULTIPLE:
        rng = np.random.default_rng([seed, index])
        h, w = config.demultiple_shape
        model = random_layered_model(rng, h * config.demultiple_dt)
        moveout = rng.uniform(*config.moveout_range)
        return synthesize_demultiple_pair(model, h, w, moveout, rng, config.demultiple_dt)
    if task not in TASKS:
        raise SeisDataError("Unknown task '%s'" % task)

    gather, first_break = _shot(seed, index, config)
    rng = np.random.default_rng([seed, index, epoch])
    cut, _ = normalize(random_cut_below_first_break(gather, first_break, config.cut_shape[0], config.cut_shape[1], rng))
    if task == INTERPOLATION:
        masked = mask_traces(cut, config.mask_ratio, config.mask_pattern, rng)
        return TaskSample(masked.masked, cut, INTERPOLATION, {'mask': masked.mask})
    return add_noise(cut, config.noise_distribution, config.noise_level, rng)


def generate_task_dataset(task, count, seed, config=None, workers=1, start=0, epoch=0):
    """Samples start..start+count-1 of a task, in index order."""
    def build(index):
        return make_sample(task, seed, index, config, epoch)

    indices = range(start, start + count)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(build, indices))
    else:
        samples = [build(i) for i in indices]
    logger.info("Generated %d %s samples (seed %d, epoch %d, %d workers)", count, task, seed, epoch, workers)
    return samples


def split_counts(count, train_share=0.9):
    """(train, held_out) sizes of the 9:1 split by sample index."""
    if count < 2:
        return count, 0
    held_out = max(1, int(round(count * (1 - train_share))))
    return count - held_out, held_out


class CutTaskDataset(object):
    """A fixed set of sample indices whose cuts, masks and noise are redrawn every epoch.

    Epoch 0 reproduces generate_task_dataset exactly.
    """

    def __init__(self, task, count, seed, config=None, start=0, workers=1):
        self.task = task
        self.count = count
        self.seed = seed
        self.config = config or DataConfig()
        self.start = start
        self.workers = workers

    def __len__(self):
        return self.count

    def epoch_samples(self, epoch):
        if self.task == DEMULTIPLE:
            epoch = 0
        return generate_task_dataset(self.task, self.count, self.seed, self.config, self.workers, self.start, epoch)


def task_datasets(task, count, seed, config=None, workers=1):
    """(training dataset, held-out samples) for one task.

    Cut-based tasks train on fresh cuts every epoch; the held-out split is
    generated once with the evaluation settings.
    """
    config = config or DataConfig()
    train, held_out = split_counts(count)
    if task == DEMULTIPLE:
        training = generate_task_dataset(task, train, seed, config, workers)
    else:
        training = CutTaskDataset(task, train, seed, config, workers=workers)
    evaluation = generate_task_dataset(task, held_out, seed, config.for_evaluation(), workers, start=train)
    return training, evaluation


def write_dataset(samples, directory):
    """Writes `<index>.input.sgth` and `<index>.label.sgth` pairs; returns the file count."""
    os.makedirs(directory, exist_ok=True)
    for i, sample in enumerate(samples):
        write_gather(os.path.join(directory, '%05d.input.sgth' % i), sample.input)
        write_gather(os.path.join(directory, '%05d.label.sgth' % i), sample.label)
    return 2 * len(samples)


def read_dataset(directory, task):
    names = sorted(n for n in os.listdir(directory) if n.endswith('.input.sgth'))
    samples = []
    for name in names:
        stem = name[:-len('.input.sgth')]
        samples.append(TaskSample(read_gather(os.path.join(directory, name)),
                                  read_gather(os.path.join(directory, stem + '.label.sgth')), task))
    return samples
