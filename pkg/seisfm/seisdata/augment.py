"""Cuts, trace masks, additive noise and per-gather normalisation."""
from collections import namedtuple
import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InfeasibleCutError, SeisDataError
from .gather import DENOISE, Gather, MaskedGather, TaskSample


RANDOM = 'random'
GAUSSIAN = 'gaussian'
UNIFORM = 'uniform'
NOISE_DISTRIBUTIONS = (GAUSSIAN, UNIFORM)
STD_FLOOR = 1e-12

NormalizationStats = namedtuple('NormalizationStats', 'mean std')


def feasible_cuts(first_break, height, cut_h, cut_w):
    """Number of feasible top rows for every window start column.

    A window starting at column c may start at any row strictly below the
    largest first break of the traces it covers.
    """
    first_break = np.asarray(first_break)
    if cut_w > len(first_break) or cut_h > height:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    lowest = sliding_window_view(first_break, cut_w).max(axis=1) + 1
    counts = np.maximum(0, height - cut_h - lowest + 1)
    return lowest, counts


def choose_cut(first_break, height, cut_h, cut_w, rng):
    """Draws (row, column) uniformly over all feasible window positions."""
    lowest, counts = feasible_cuts(first_break, height, cut_h, cut_w)
    total = int(counts.sum())
    if total == 0:
        raise InfeasibleCutError("No %dx%d window fits below the first break of a %dx%d gather" % (
            cut_h, cut_w, height, len(first_break)))
    k = int(rng.integers(total))
    column = int(np.searchsorted(np.cumsum(counts), k, side='right'))
    offset = k - (int(counts[:column].sum()) if column else 0)
    return int(lowest[column]) + offset, column


def random_cut_below_first_break(gather, first_break, cut_h, cut_w, rng):
    row, column = choose_cut(first_break, gather.shape[0], cut_h, cut_w, rng)
    return gather.with_samples(gather.samples[row:row + cut_h, column:column + cut_w].copy())


def _regular_step(pattern):
    try:
        step = int(pattern.split('-', 1)[1])
    except (IndexError, ValueError):
        step = 0
    if not pattern.startswith('regular-') or step < 1:
        raise SeisDataError("Unknown mask pattern '%s' (expected 'random' or 'regular-k')" % pattern)
    return step


def mask_traces(gather, ratio, pattern=RANDOM, rng=None):
    """Masks whole traces.

    'random' masks each trace independently with probability `ratio`;
    'regular-k' keeps every k-th trace (starting with the first) and masks
    the rest, ignoring `ratio`.
    """
    width = gather.shape[1]
    if pattern == RANDOM:
        if not 0.0 <= ratio <= 1.0:
            raise SeisDataError("Mask ratio must lie in [0, 1], got %r" % ratio)
        mask = rng.random(width) < ratio
    else:
        step = _regular_step(pattern)
        mask = np.arange(width) % step != 0
    return MaskedGather(gather, mask)


def add_noise(gather, distribution, level, rng):
    """Denoise pair with noise of standard deviation level * std(gather).

    Uniform noise spans +-sqrt(3) * level * std so both distributions have
    equal variance.
    """
    if level < 0:
        raise SeisDataError("Noise level must be non-negative, got %r" % level)
    sigma = level * float(np.std(gather.samples))
    if distribution == GAUSSIAN:
        noise = rng.normal(0.0, 1.0, gather.shape) * sigma
    elif distribution == UNIFORM:
        bound = math.sqrt(3.0) * sigma
        noise = rng.uniform(-1.0, 1.0, gather.shape) * bound
    else:
        raise SeisDataError("Unknown noise distribution '%s'" % distribution)
    return TaskSample(gather.with_samples(gather.samples + noise), gather, DENOISE, {'noise': noise})


def normalize(gather):
    """Zero mean and unit standard deviation; returns (Gather, NormalizationStats)."""
    mean = float(np.mean(gather.samples))
    std = max(float(np.std(gather.samples)), STD_FLOOR)
    return gather.with_samples((gather.samples - mean) / std), NormalizationStats(mean, std)


def denormalize(gather, stats):
    return gather.with_samples(gather.samples * stats.std + stats.mean)
