"""AdamW with decoupled weight decay over a ParameterStore."""
from dataclasses import dataclass, field
import logging

import numpy as np

from seisfm.exceptions import ConfigurationError

from .errors import FreezeViolation


logger = logging.getLogger(__name__)


CONSTANT = 'constant'
SCHEDULES = (CONSTANT,)


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.001
    weight_decay: float = 0.01
    betas: tuple = (0.9, 0.999)
    eps: float = 1e-8
    epochs: int = 50
    batch: int = 8
    seed: int = 0
    schedule: str = CONSTANT
    loss: str = 'l1'
    # Per-task epoch counts; `epochs` applies to tasks not listed.
    task_epochs: dict = field(default_factory=dict)

    def epochs_for(self, task):
        return int(self.task_epochs.get(task, self.epochs))

    def validate(self):
        if not self.lr > 0:
            raise ConfigurationError("Learning rate must be positive, got %r" % self.lr)
        if self.weight_decay < 0:
            raise ConfigurationError("Weight decay must be non-negative, got %r" % self.weight_decay)
        if len(self.betas) != 2 or not all(0 <= b < 1 for b in self.betas):
            raise ConfigurationError("betas must be a pair in [0, 1), got %r" % (self.betas,))
        if self.epochs < 1 or any(int(e) < 1 for e in self.task_epochs.values()):
            raise ConfigurationError("epochs must be >= 1")
        if self.batch < 1:
            raise ConfigurationError("batch must be >= 1, got %d" % self.batch)
        if self.schedule not in SCHEDULES:
            raise ConfigurationError("Unknown schedule '%s'" % self.schedule)
        if self.loss not in ('l1', 'l2'):
            raise ConfigurationError("Unknown loss '%s'" % self.loss)
        return self


def collect_gradients(store):
    """Maps parameter names to their accumulated gradients.

    Raises FreezeViolation if a tensor of a frozen partition holds a gradient.
    """
    grads = {}
    for name, tensor in store.items():
        if tensor.grad is None:
            continue
        if not store.is_trainable(store.partition_of(name)):
            raise FreezeViolation("Frozen parameter %s received a gradient" % name)
        grads[name] = tensor.grad
    return grads


def adamw_step(store, grads, config, t, moments=None):
    """Applies AdamW step `t` (1-based) to the trainable tensors of `store`.

    `moments` maps names to (first, second) moment arrays and is updated in
    place; pass the same dict on every step. A trainable tensor without a
    gradient is treated as having a zero gradient. Returns `moments`.
    """
    if t < 1:
        raise ConfigurationError("AdamW steps are numbered from 1, got %d" % t)
    if moments is None:
        moments = {}
    for name in grads:
        if name not in store:
            raise ConfigurationError("Gradient for unknown parameter %s" % name)
        if not store.is_trainable(store.partition_of(name)):
            raise FreezeViolation("Gradient offered for frozen parameter %s" % name)

    beta1, beta2 = config.betas
    bias_correction1 = 1 - beta1 ** t
    bias_correction2 = 1 - beta2 ** t
    step_size = config.lr / bias_correction1
    for name, tensor in store.items():
        if not store.is_trainable(store.partition_of(name)):
            continue
        p = tensor.data
        g = grads.get(name)
        g = np.zeros_like(p) if g is None else np.asarray(g, dtype=p.dtype)
        if name not in moments:
            moments[name] = (np.zeros_like(p), np.zeros_like(p))
        exp_avg, exp_avg_sq = moments[name]
        exp_avg *= beta1
        exp_avg += (1 - beta1) * g
        exp_avg_sq *= beta2
        exp_avg_sq += (1 - beta2) * g * g

        if config.weight_decay:
            p *= 1 - config.lr * config.weight_decay
        denom = np.sqrt(exp_avg_sq) / np.sqrt(bias_correction2) + config.eps
        p -= step_size * exp_avg / denom
    return moments


class AdamW(object):
    """Stateful wrapper: owns the moments and the step counter of one session."""

    def __init__(self, store, config):
        self.store = store
        self.config = config
        self.moments = {}
        self.t = 0

    def step(self, grads=None):
        if grads is None:
            grads = collect_gradients(self.store)
        self.t += 1
        adamw_step(self.store, grads, self.config, self.t, self.moments)

    def zero_grad(self):
        self.store.zero_grad()
