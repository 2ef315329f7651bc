"""Inference timing on the monotonic clock."""
from collections import namedtuple
import logging
import statistics
import time

import numpy as np

from .errors import MetricsError


logger = logging.getLogger(__name__)
timing = logging.getLogger('timing')


MIN_REPS = 3

TimingResult = namedtuple('TimingResult', 'latency throughput samples')


def _forward(model):
    return getattr(model, 'predict', model)


def time_inference(model, batch, shape, warmup=1, reps=MIN_REPS, seed=0, clock=time.perf_counter):
    """Times `reps` forward passes of a (batch, H, W) input after `warmup` discarded ones.

    Returns the median latency per batch in seconds, throughput in gathers
    per second (batch * reps over the total measured time) and the raw
    per-pass durations.
    """
    if reps < MIN_REPS:
        raise MetricsError("Timing needs at least %d repetitions, got %d" % (MIN_REPS, reps))
    if batch < 1 or warmup < 0:
        raise MetricsError("Timing needs batch >= 1 and warmup >= 0, got %d and %d" % (batch, warmup))
    forward = _forward(model)
    gathers = np.random.default_rng(seed).standard_normal((batch,) + tuple(shape)).astype(np.float32)
    for _ in range(warmup):
        forward(gathers)

    samples = []
    for _ in range(reps):
        start = clock()
        forward(gathers)
        samples.append(clock() - start)
    total = sum(samples)
    latency = statistics.median(samples)
    throughput = batch * reps / total if total > 0 else float('inf')
    timing.info("stage=inference batch=%d height=%d width=%d reps=%d latency=%.6f throughput=%.2f",
                batch, shape[0], shape[1], reps, latency, throughput)
    return TimingResult(latency, throughput, samples)
