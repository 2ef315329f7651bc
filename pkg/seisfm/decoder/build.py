"""The UNet-style decoder: feature pyramid in, single-channel gather out."""
import logging
import math

import numpy as np

from encoders.blocks import Block, Conv, ConvNeXtBlock, Upsample
from encoders.build import build_encoder
from seisfm.exceptions import ConfigurationError
from tensorkit import ShapeError, concat, gelu
from training.store import DECODER, ParameterStore

from .config import DOUBLE_CONV, MODERN_CONV


logger = logging.getLogger(__name__)


class DoubleConv(Block):
    """Two 3x3 convolutions with GELU; the inner width is multiplier x c_out."""

    def __init__(self, store, prefix, partition, rng, c_in, c_out, multiplier):
        super().__init__(store, prefix, partition, rng)
        mid = multiplier * c_out
        self.conv1 = Conv(store, prefix + '.conv1', partition, rng, c_in, mid, 3, padding=1)
        self.conv2 = Conv(store, prefix + '.conv2', partition, rng, mid, c_out, 3, padding=1)

    def forward(self, x):
        return gelu(self.conv2(gelu(self.conv1(x))))


class ModernConv(Block):
    """1x1 projection to c_out (when widths differ), then a ConvNeXt block."""

    def __init__(self, store, prefix, partition, rng, c_in, c_out, multiplier):
        super().__init__(store, prefix, partition, rng)
        self.proj = Conv(store, prefix + '.proj', partition, rng, c_in, c_out, 1) if c_in != c_out else None
        self.body = ConvNeXtBlock(store, prefix + '.body', partition, rng, c_out, multiplier)

    def forward(self, x):
        if self.proj is not None:
            x = self.proj(x)
        return self.body(x)


def block_parameter_count(kind, c_in, c_out, multiplier):
    """Closed-form parameter count of one decoder block."""
    m = multiplier
    if kind == DOUBLE_CONV:
        mid = m * c_out
        return 9 * c_in * mid + mid + 9 * mid * c_out + c_out
    proj = c_in * c_out + c_out if c_in != c_out else 0
    return proj + 49 * c_out + c_out + 2 * c_out + (c_out * m * c_out + m * c_out) + (m * c_out * c_out + c_out)


BLOCK_CLASSES = {DOUBLE_CONV: DoubleConv, MODERN_CONV: ModernConv}


def _doublings(small, large, what):
    """Number of 2x steps from `small` to `large`; ConfigurationError if not a power of two."""
    if small < 1 or large < small or large % small:
        raise ConfigurationError("Cannot upsample %s from %d to %d by doubling" % (what, small, large))
    k = int(round(math.log2(large // small)))
    if small * 2 ** k != large:
        raise ConfigurationError("Cannot upsample %s from %d to %d by doubling" % (what, small, large))
    return k


def _steps(source, target, what):
    kh = _doublings(source[0], target[0], what + " height")
    kw = _doublings(source[1], target[1], what + " width")
    if kh != kw:
        raise ConfigurationError("%s needs %d doublings in height but %d in width" % (what, kh, kw))
    return kh


class Adapter(Block):
    """1x1 convolution to the decoder width plus k upsamplings."""

    def __init__(self, store, prefix, partition, rng, c_in, c_out, doublings, method):
        super().__init__(store, prefix, partition, rng)
        self.proj = Conv(store, prefix + '.proj', partition, rng, c_in, c_out, 1)
        self.ups = [Upsample(store, prefix + '.up%d' % i, partition, rng, c_out, method) for i in range(doublings)]

    def forward(self, x):
        x = self.proj(x)
        for up in self.ups:
            x = up(x)
        return x


class Decoder(object):
    """Fuses the pyramid coarsest-to-finest (or consumes stage 4 only) and
    upsamples to the output size; the head is a 1x1 convolution to one channel.
    """

    def __init__(self, config, pyramid_shapes, output_shape, store, seed):
        self.config = config
        self.pyramid_shapes = [tuple(int(d) for d in s) for s in pyramid_shapes]
        self.output_shape = tuple(int(d) for d in output_shape)
        self.store = store
        self.seed = seed
        self.build(np.random.default_rng(seed))

    def build(self, rng):
        cfg = self.config
        shapes = self.pyramid_shapes
        channels = [s[0] for s in shapes]
        up, make = cfg.upsample, BLOCK_CLASSES[cfg.block]
        m = cfg.bottleneck_multiplier
        store = self.store

        def block(prefix, c_in, c_out):
            return make(store, prefix, DECODER, rng, c_in, c_out, m)

        target = shapes[3][1:]
        self.adapters = []
        self.fusions = []
        if cfg.skip_connections:
            widths = list(cfg.channels) if cfg.channels else [channels[3], channels[2], channels[1], channels[0]]
            # T_4 is stage 4's resolution and every finer stage doubles it.
            targets = [tuple(d * 2 ** (3 - s) for d in target) for s in range(4)]
            for s in range(4):
                k = _steps(shapes[s][1:], targets[s], "stage %d" % (s + 1))
                self.adapters.append(Adapter(store, 'decoder.adapter%d' % (s + 1), DECODER, rng,
                                             channels[s], widths[3 - s], k, up))
            width = widths[0]
            for s in (2, 1, 0):
                fused = widths[3 - s]
                self.fusions.append((Upsample(store, 'decoder.fuse%d.up' % (s + 1), DECODER, rng, width, up),
                                     block('decoder.fuse%d.block' % (s + 1), width + fused, fused)))
                width = fused
            finest = targets[0]
            step_widths = []
        else:
            defaults = [channels[3], channels[2], channels[1], channels[0]]
            widths = list(cfg.channels) if cfg.channels else defaults
            self.adapters.append(Adapter(store, 'decoder.adapter4', DECODER, rng, channels[3], widths[0], 0, up))
            width = widths[0]
            finest = target
            step_widths = widths[1:]

        extra = _steps(finest, self.output_shape, "decoder output")
        self.steps = []
        for i in range(extra):
            nxt = step_widths[i] if i < len(step_widths) else cfg.head_channels
            self.steps.append((Upsample(store, 'decoder.step%d.up' % i, DECODER, rng, width, up),
                               block('decoder.step%d.block' % i, width, nxt)))
            width = nxt
        self.head = Conv(store, 'decoder.head', DECODER, rng, width, 1, 1)
        if cfg.zero_init_head:
            self.head.kernel.data[...] = 0.0

    @property
    def upsampling_steps(self):
        """2x upsamplings on the path from stage 4 to the output."""
        return len(self.fusions) + len(self.steps)

    @property
    def parameter_count(self):
        return self.store.count(DECODER)

    def check_pyramid(self, pyramid):
        if pyramid.shapes != self.pyramid_shapes:
            raise ShapeError("Decoder built for pyramid %s, got %s" % (self.pyramid_shapes, pyramid.shapes))

    def decode(self, pyramid):
        self.check_pyramid(pyramid)
        if self.config.skip_connections:
            x = self.adapters[3](pyramid[3])
            for (up, block), s in zip(self.fusions, (2, 1, 0)):
                x = block(concat([up(x), self.adapters[s](pyramid[s])], axis=1))
        else:
            x = self.adapters[0](pyramid[3])
        for up, block in self.steps:
            x = block(up(x))
        y = self.head(x)
        n, _, h, w = y.shape
        if not pyramid.batched and n == 1:
            return y.reshape(h, w)
        return y.reshape(n, h, w)

    __call__ = decode


def build_decoder(config, pyramid_shapes, output_shape, seed, store=None, dtype=np.float32):
    """Builds a decoder for the given (C, H, W) pyramid shapes and (H, W) output.

    Raises ConfigurationError when the pyramid strides cannot be bridged by
    doublings.
    """
    config.validate()
    if len(pyramid_shapes) != 4:
        raise ConfigurationError("The decoder consumes 4 pyramid stages, got %d" % len(pyramid_shapes))
    if store is None:
        store = ParameterStore(dtype)
    decoder = Decoder(config, pyramid_shapes, output_shape, store, seed)
    logger.info("Built decoder (skip=%s, %s, %s, x%d): %d parameters, %d upsampling steps",
                config.skip_connections, config.block, config.upsample, config.bottleneck_multiplier,
                decoder.parameter_count, decoder.upsampling_steps)
    return decoder


def decode(decoder, pyramid):
    return decoder.decode(pyramid)


class EncoderDecoder(object):
    """An encoder and decoder sharing one ParameterStore."""

    def __init__(self, encoder, decoder):
        if encoder.store is not decoder.store:
            raise ConfigurationError("Encoder and decoder must share a parameter store")
        self.encoder = encoder
        self.decoder = decoder
        self.store = encoder.store

    def __call__(self, gathers):
        return self.decoder.decode(self.encoder.encode(gathers))

    def predict(self, gathers):
        """Forward pass returning a numpy array of the input's shape."""
        return np.asarray(self(gathers).data)


def build_model(encoder_config, decoder_config, seed, dtype=np.float32, store=None):
    """Encoder (seeded by `seed`) and decoder (seeded by `seed + 1`) on one store."""
    encoder = build_encoder(encoder_config, seed, store=store, dtype=dtype)
    decoder = build_decoder(decoder_config, encoder.output_shapes(), encoder_config.input_shape, seed + 1,
                            store=encoder.store)
    return EncoderDecoder(encoder, decoder)
