"""Mini-batch iteration shared by pre-training and downstream training."""
import logging
import time

import numpy as np

from tensorkit import backward


logger = logging.getLogger(__name__)
timing = logging.getLogger('timing')


def as_array(gather):
    """The samples of a Gather, or the array itself."""
    return np.asarray(getattr(gather, 'samples', gather))


def stack_pairs(samples):
    """Stacks TaskSample-like objects into (inputs, labels) arrays of shape (N, H, W)."""
    inputs = np.stack([as_array(s.input) for s in samples])
    labels = np.stack([as_array(s.label) for s in samples])
    return inputs, labels


def batch_indices(count, batch, rng):
    """Shuffled index arrays of at most `batch` entries covering range(count)."""
    order = rng.permutation(count)
    return [order[i:i + batch] for i in range(0, count, batch)]


def run_epoch(model, optimizer, loss_fn, batches, prepare):
    """One optimisation pass; returns the sample-weighted mean loss.

    `prepare(indices)` returns the (input, target) arrays of one batch.
    """
    total, seen = 0.0, 0
    for indices in batches:
        inputs, targets = prepare(indices)
        optimizer.zero_grad()
        loss = loss_fn(model(inputs), targets)
        backward(loss)
        optimizer.step()
        total += loss.item() * len(indices)
        seen += len(indices)
    return total / seen


class EpochTimer(object):
    """Logs one `key=value` timing line per epoch on the timing logger."""

    def __init__(self, stage, **fields):
        self.stage = stage
        self.fields = fields

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start
        extra = " ".join("%s=%s" % kv for kv in sorted(self.fields.items()))
        timing.info("stage=%s %s seconds=%.3f", self.stage, extra, self.seconds)
        return False
