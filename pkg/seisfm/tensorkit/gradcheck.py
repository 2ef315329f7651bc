"""Finite-difference verification of backward()."""
from collections import namedtuple
import logging

import numpy as np

from .tensor import ShapeError, Tensor


logger = logging.getLogger(__name__)


GradCheckEntry = namedtuple('GradCheckEntry', ['coordinate', 'analytic', 'numeric', 'rel_error', 'passed'])


class GradCheckReport(object):
    """Per-coordinate comparison of analytic and central-difference gradients."""

    def __init__(self, entries, tol):
        self.entries = entries
        self.tol = tol

    @property
    def passed(self):
        return all(e.passed for e in self.entries)

    @property
    def failures(self):
        return [e for e in self.entries if not e.passed]

    @property
    def max_rel_error(self):
        if not self.entries:
            return 0.0
        return max(e.rel_error for e in self.entries)

    def __str__(self):
        return "grad_check: %d coordinates, %d failures, max rel error %.3e (tol %.1e)" % (
            len(self.entries), len(self.failures), self.max_rel_error, self.tol)


def relative_error(analytic, numeric, floor=1e-8):
    return abs(analytic - numeric) / max(abs(analytic) + abs(numeric), floor)


def grad_check(f, point, h=1e-5, tol=1e-4, coordinates=None, seed=0, floor=1e-8):
    """Compares the gradient of scalar `f` at `point` with central differences.

    `f` maps a Tensor to a scalar Tensor. `coordinates` is either a count of
    randomly chosen flat indices (seeded) or an explicit list of them; the
    default checks every coordinate. Failures are reported, never raised.
    """
    base = np.array(point.data if isinstance(point, Tensor) else point, dtype=np.float64)
    x = Tensor(base.copy(), requires_grad=True)
    out = f(x)
    if out.size != 1:
        raise ShapeError("grad_check needs a scalar-valued function")
    out.backward()
    analytic = x.grad if x.grad is not None else np.zeros_like(base)

    if coordinates is None:
        flat = range(base.size)
    elif isinstance(coordinates, int):
        rng = np.random.default_rng(seed)
        flat = rng.choice(base.size, size=min(coordinates, base.size), replace=False)
    else:
        flat = coordinates

    entries = []
    for index in flat:
        index = int(index)
        shifted = base.copy().reshape(-1)
        shifted[index] += h
        up = f(Tensor(shifted.reshape(base.shape))).item()
        shifted[index] -= 2 * h
        down = f(Tensor(shifted.reshape(base.shape))).item()
        numeric = (up - down) / (2 * h)
        a = float(analytic.reshape(-1)[index])
        err = relative_error(a, numeric, floor)
        entries.append(GradCheckEntry(index, a, numeric, err, err <= tol))
    report = GradCheckReport(entries, tol)
    logger.debug("%s", report)
    return report
