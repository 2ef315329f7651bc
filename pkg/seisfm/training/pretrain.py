"""Masked image modeling (MIM) pre-training of an encoder.

Square patches of each gather are zeroed and the encoder, followed by a
small decoder without skip connections, learns to reconstruct the whole
unmasked gather under an l1 loss. Only the encoder partition is exported.
"""
from dataclasses import dataclass, field
import logging

import numpy as np

from decoder import MODERN_CONV, DecoderConfig, build_model
from seisfm.exceptions import ConfigurationError

from .checkpoint import save_checkpoint
from .loop import EpochTimer, as_array, batch_indices, run_epoch
from .losses import l1_loss
from .optim import AdamW, TrainConfig
from .store import ENCODER


logger = logging.getLogger(__name__)


MIM_PATCH = 8
MIM_RATIO = 0.6
# Pre-training decoders above this share of the encoder size are reported.
DECODER_SHARE_LIMIT = 0.2


def mim_decoder_config():
    """Single-path modern-conv decoder with narrow widths."""
    return DecoderConfig(skip_connections=False, block=MODERN_CONV, channels=(16, 8, 4), head_channels=4)


def mask_patches(gathers, ratio, patch, rng):
    """Zeroes round(ratio * patches) randomly chosen patch x patch squares per gather.

    Returns (masked, mask) where `mask` is True on zeroed samples.
    """
    gathers = np.asarray(gathers)
    n, h, w = gathers.shape
    if h % patch or w % patch:
        raise ConfigurationError("Gathers of %dx%d cannot be split into %dx%d patches" % (h, w, patch, patch))
    ph, pw = h // patch, w // patch
    count = int(round(ratio * ph * pw))
    chosen = np.zeros((n, ph * pw), dtype=bool)
    if count:
        ranks = np.argsort(rng.random((n, ph * pw)), axis=1)[:, :count]
        np.put_along_axis(chosen, ranks, True, axis=1)
    mask = chosen.reshape(n, ph, pw).repeat(patch, axis=1).repeat(patch, axis=2)
    return np.where(mask, 0.0, gathers).astype(gathers.dtype), mask


@dataclass
class MimResult:
    model: object
    encoder_store: object
    initial_loss: float
    history: list = field(default_factory=list)
    checkpoint: str = None

    @property
    def final_loss(self):
        return self.history[-1] if self.history else self.initial_loss


def mim_pretrain(encoder_config, corpus, mask_ratio=MIM_RATIO, config=None, patch=MIM_PATCH,
                 decoder_config=None, checkpoint_path=None, dtype=np.float32):
    """Pre-trains an encoder on `corpus` (Gathers or (H, W) arrays).

    The encoder is rebuilt for the corpus gather size. When `checkpoint_path`
    is given the encoder partition is written there.
    """
    if not 0.0 <= mask_ratio <= 1.0:
        raise ConfigurationError("mask_ratio must lie in [0, 1], got %r" % mask_ratio)
    if len(corpus) == 0:
        raise ConfigurationError("MIM pre-training needs a non-empty corpus")
    config = (config or TrainConfig()).validate()
    gathers = np.stack([as_array(g) for g in corpus]).astype(dtype)
    encoder_config = encoder_config.with_input_shape(gathers.shape[1:])
    model = build_model(encoder_config, decoder_config or mim_decoder_config(), config.seed, dtype)

    encoder_size, decoder_size = model.encoder.parameter_count, model.decoder.parameter_count
    if decoder_size >= encoder_size:
        raise ConfigurationError("The pre-training decoder (%d parameters) must be smaller than the encoder (%d)"
                                 % (decoder_size, encoder_size))
    if decoder_size > DECODER_SHARE_LIMIT * encoder_size:
        logger.warning("Pre-training decoder holds %.0f%% of the encoder's parameters",
                       100.0 * decoder_size / encoder_size)

    rng = np.random.default_rng([config.seed, 1])
    initial_loss = reconstruction_loss(model, gathers, mask_ratio, patch, rng, config.batch)
    logger.info("MIM pre-training %s on %d gathers: ratio %.2f, %d epochs, initial loss %.5f",
                encoder_config.archetype, len(gathers), mask_ratio, config.epochs, initial_loss)

    def prepare(indices):
        masked, _ = mask_patches(gathers[indices], mask_ratio, patch, rng)
        return masked, gathers[indices]

    optimizer = AdamW(model.store, config)
    history = []
    for epoch in range(config.epochs):
        with EpochTimer('mim', archetype=encoder_config.archetype, epoch=epoch + 1):
            loss = run_epoch(model, optimizer, l1_loss, batch_indices(len(gathers), config.batch, rng), prepare)
        history.append(loss)
        logger.debug("MIM epoch %d/%d: loss %.5f", epoch + 1, config.epochs, loss)

    result = MimResult(model, model.store.subset(ENCODER), initial_loss, history)
    if checkpoint_path:
        save_checkpoint(model.store, checkpoint_path, ENCODER)
        result.checkpoint = str(checkpoint_path)
    logger.info("MIM pre-training done: loss %.5f -> %.5f", initial_loss, result.final_loss)
    return result


def reconstruction_loss(model, gathers, mask_ratio, patch, rng, batch):
    """Mean l1 between reconstructions of masked gathers and the originals."""
    total = 0.0
    for start in range(0, len(gathers), batch):
        chunk = gathers[start:start + batch]
        masked, _ = mask_patches(chunk, mask_ratio, patch, rng)
        total += float(np.abs(model.predict(masked) - chunk).sum())
    return total / gathers.size
