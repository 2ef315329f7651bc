"""Supervised downstream training under the three encoder strategies.

* frozen: the encoder is loaded from a pre-trained checkpoint and never
  updated; only the decoder trains.
* fine-tuned: the encoder starts from the checkpoint and both partitions train.
* scratch: both partitions start from the seeded random initialisation.
"""
from dataclasses import dataclass, field
import logging

import numpy as np

from decoder import build_model
from seisfm.exceptions import ConfigurationError

from .checkpoint import restore_encoder
from .errors import FreezeViolation
from .loop import EpochTimer, batch_indices, run_epoch, stack_pairs
from .losses import LOSSES
from .optim import AdamW, TrainConfig
from .store import ENCODER


logger = logging.getLogger(__name__)


FROZEN = 'frozen'
FINE_TUNED = 'fine-tuned'
SCRATCH = 'scratch'
STRATEGIES = (FROZEN, FINE_TUNED, SCRATCH)


@dataclass(frozen=True)
class TrainingStrategy:
    kind: str
    checkpoint: str = None

    @property
    def needs_checkpoint(self):
        return self.kind in (FROZEN, FINE_TUNED)

    def validate(self):
        if self.kind not in STRATEGIES:
            raise ConfigurationError("Unknown strategy '%s' (expected one of %s)" % (self.kind, ", ".join(STRATEGIES)))
        if self.needs_checkpoint and not self.checkpoint:
            raise ConfigurationError("The %s strategy needs a pre-trained checkpoint" % self.kind)
        if not self.needs_checkpoint and self.checkpoint:
            raise ConfigurationError("The scratch strategy does not take a checkpoint")
        return self


@dataclass
class DownstreamResult:
    model: object
    strategy: TrainingStrategy
    history: list = field(default_factory=list)
    initial_encoder_digest: str = None

    @property
    def encoder_digest(self):
        return self.model.store.digest(ENCODER)


def _epoch_samples(dataset, epoch):
    if hasattr(dataset, 'epoch_samples'):
        return dataset.epoch_samples(epoch)
    return dataset


def train_downstream(encoder_config, decoder_config, strategy, dataset, config=None, task=None, dtype=np.float32):
    """Trains an encoder-decoder on `dataset` and returns a DownstreamResult.

    `dataset` is a sequence of TaskSample-like objects (`.input`, `.label`)
    or an object whose `epoch_samples(epoch)` returns one per epoch. The
    encoder is rebuilt for the sample size. `task` selects a per-task epoch
    count from `config.task_epochs`.
    """
    strategy.validate()
    config = (config or TrainConfig()).validate()
    first = _epoch_samples(dataset, 0)
    if len(first) == 0:
        raise ConfigurationError("Downstream training needs a non-empty dataset")
    inputs, labels = stack_pairs(first)
    encoder_config = encoder_config.with_input_shape(inputs.shape[1:])
    model = build_model(encoder_config, decoder_config, config.seed, dtype)
    store = model.store

    if strategy.needs_checkpoint:
        restore_encoder(store, strategy.checkpoint)
    if strategy.kind == FROZEN:
        store.set_trainable(ENCODER, False)
    initial = store.digest(ENCODER)

    epochs = config.epochs_for(task)
    loss_fn = LOSSES[config.loss]
    optimizer = AdamW(store, config)
    rng = np.random.default_rng([config.seed, 2])
    logger.info("Training %s encoder (%s) on %d samples of %s for %d epochs", encoder_config.archetype,
                strategy.kind, len(inputs), task or 'the dataset', epochs)

    history = []
    for epoch in range(epochs):
        if epoch:
            inputs, labels = stack_pairs(_epoch_samples(dataset, epoch))

        def prepare(indices, inputs=inputs, labels=labels):
            return inputs[indices], labels[indices]

        with EpochTimer('train', archetype=encoder_config.archetype, strategy=strategy.kind, epoch=epoch + 1):
            loss = run_epoch(model, optimizer, loss_fn, batch_indices(len(inputs), config.batch, rng), prepare)
        history.append(loss)
        if strategy.kind == FROZEN and store.digest(ENCODER) != initial:
            raise FreezeViolation("Frozen encoder changed during epoch %d" % (epoch + 1))
        logger.debug("Epoch %d/%d (%s): loss %.5f", epoch + 1, epochs, strategy.kind, loss)

    logger.info("Trained %s (%s): loss %.5f -> %.5f", encoder_config.archetype, strategy.kind, history[0], history[-1])
    return DownstreamResult(model, strategy, history, initial)
