"""Encoder archetypes and the four-stage feature pyramid they emit."""
from dataclasses import dataclass
import logging

import numpy as np

from tensorkit import ShapeError
from training.store import ENCODER, ParameterStore

from .blocks import (
    Conv, ConvNeXtBlock, GlobalAttentionBlock, Norm, TokenBlock, WindowAttentionBlock, as_batch, from_tokens,
    sincos_embedding, to_tokens,
)
from .config import CONV, GLOBAL, HYBRID, HYBRID_CONV_STAGES, WINDOWED


logger = logging.getLogger(__name__)


@dataclass
class FeaturePyramid:
    """The four stage embeddings, each a Tensor of shape (N, C_s, H_s, W_s)."""
    embeddings: list
    batched: bool = True

    def __post_init__(self):
        if len(self.embeddings) != 4:
            raise ShapeError("A feature pyramid has 4 embeddings, got %d" % len(self.embeddings))
        for e in self.embeddings:
            if e.ndim != 4 or e.shape[2] * e.shape[3] < 1:
                raise ShapeError("Pyramid embeddings must be non-empty (N,C,H,W) tensors, got %s" % (e.shape,))

    @property
    def shapes(self):
        return [tuple(e.shape[1:]) for e in self.embeddings]

    def __getitem__(self, index):
        return self.embeddings[index]

    def __iter__(self):
        return iter(self.embeddings)

    def __len__(self):
        return len(self.embeddings)


def is_hierarchical(pyramid):
    """True unless every embedding shares the same height and width.

    Accepts a FeaturePyramid or a sequence of shapes ending in (H, W).
    """
    shapes = pyramid.shapes if isinstance(pyramid, FeaturePyramid) else pyramid
    return len(set(tuple(s[-2:]) for s in shapes)) > 1


class Encoder(object):
    """Maps (N, H, W) gathers to a FeaturePyramid; parameters live in `store`."""

    def __init__(self, config, store, seed):
        self.config = config
        self.store = store
        self.seed = seed
        self.build(np.random.default_rng(seed))

    def build(self, rng):
        raise NotImplementedError()

    def forward(self, x):
        raise NotImplementedError()

    @property
    def parameter_count(self):
        return self.store.count(ENCODER)

    def check_input(self, height, width):
        for s, stride in enumerate(self.config.stage_strides()):
            if height % stride or width % stride:
                raise ShapeError("Input %dx%d cannot be encoded: stage %d needs multiples of %d" % (
                    height, width, s + 1, stride))

    def output_shapes(self, input_shape=None):
        h, w = input_shape or self.config.input_shape
        self.check_input(h, w)
        return [(c, h // stride, w // stride) for c, stride in zip(self.config.stage_channels, self.config.stage_strides())]

    def encode(self, gathers):
        x, batched = as_batch(gathers, self.store.dtype)
        self.check_input(x.shape[2], x.shape[3])
        return FeaturePyramid(self.forward(x), batched)

    __call__ = encode


class HierarchicalEncoder(Encoder):
    """Patchify stem, then four stages separated by stride-2 2x2 convolutions."""

    def build(self, rng):
        cfg = self.config
        channels = cfg.stage_channels
        self.stem = Conv(self.store, 'encoder.stem', ENCODER, rng, 1, channels[0], cfg.patch_stride, stride=cfg.patch_stride)
        self.stem_norm = Norm(self.store, 'encoder.stem_norm', ENCODER, rng, channels[0], channels_last=False)
        self.stages = []
        for s in range(4):
            prefix = 'encoder.stage%d' % (s + 1)
            down = None
            if s > 0:
                down = (Norm(self.store, prefix + '.down_norm', ENCODER, rng, channels[s - 1], channels_last=False),
                        Conv(self.store, prefix + '.down', ENCODER, rng, channels[s - 1], channels[s], 2, stride=2))
            blocks = [self.block(s, i, prefix + '.block%d' % i, rng) for i in range(cfg.stage_depths[s])]
            self.stages.append((down, blocks))

    def block(self, stage, index, prefix, rng):
        cfg = self.config
        dim, heads = cfg.stage_channels[stage], cfg.heads[stage]
        if cfg.archetype == CONV or (cfg.archetype == HYBRID and stage < HYBRID_CONV_STAGES):
            return ConvNeXtBlock(self.store, prefix, ENCODER, rng, dim, cfg.mlp_ratio)
        if cfg.archetype == WINDOWED:
            return WindowAttentionBlock(self.store, prefix, ENCODER, rng, dim, heads, cfg.mlp_ratio, cfg.window,
                                        shifted=index % 2 == 1)
        return GlobalAttentionBlock(self.store, prefix, ENCODER, rng, dim, heads, cfg.mlp_ratio)

    def forward(self, x):
        x = self.stem_norm(self.stem(x))
        outputs = []
        for down, blocks in self.stages:
            if down is not None:
                x = down[1](down[0](x))
            for block in blocks:
                x = block(x)
            outputs.append(x)
        return outputs


class TrunkEncoder(Encoder):
    """Plain transformer trunk at a single stride; taps intermediate blocks."""

    def build(self, rng):
        cfg = self.config
        dim = cfg.stage_channels[0]
        self.embed = Conv(self.store, 'encoder.patch_embed', ENCODER, rng, 1, dim, cfg.patch_stride, stride=cfg.patch_stride)
        self.blocks = [TokenBlock(self.store, 'encoder.block%d' % i, ENCODER, rng, dim, cfg.heads[0], cfg.mlp_ratio)
                       for i in range(cfg.depth)]
        self.norm = Norm(self.store, 'encoder.norm', ENCODER, rng, dim)
        self._positions = {}

    def positions(self, batch, height, width, dtype):
        key = (height, width)
        if key not in self._positions:
            self._positions[key] = sincos_embedding(self.config.stage_channels[0], height, width).astype(dtype)
        table = self._positions[key]
        return np.broadcast_to(table, (batch,) + table.shape)

    def forward(self, x):
        x = self.embed(x)
        n, _, h, w = x.shape
        t = to_tokens(x) + self.positions(n, h, w, x.dtype)
        taps = set(self.config.tap_layers)
        last = self.config.tap_layers[-1]
        outputs = []
        for i, block in enumerate(self.blocks, start=1):
            t = block(t)
            if i in taps:
                tapped = self.norm(t) if i == last else t
                outputs.append(from_tokens(tapped, h, w))
        return outputs


ENCODER_CLASSES = {
    CONV: HierarchicalEncoder,
    WINDOWED: HierarchicalEncoder,
    HYBRID: HierarchicalEncoder,
    GLOBAL: TrunkEncoder,
}


def build_encoder(config, seed, store=None, dtype=np.float32):
    """Builds the encoder for `config` with truncated-normal weights seeded by `seed`.

    Parameters are registered in the encoder partition of `store` (a new
    store of `dtype` when omitted).
    """
    config.validate()
    if store is None:
        store = ParameterStore(dtype)
    encoder = ENCODER_CLASSES[config.archetype](config, store, seed)
    logger.info("Built %s encoder: %d parameters, stage strides %s",
                config.archetype, encoder.parameter_count, list(config.stage_strides()))
    return encoder


def encode(encoder, gathers):
    return encoder.encode(gathers)
