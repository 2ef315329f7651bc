"""Encoder configurations and the desk-scale presets."""
from dataclasses import dataclass, replace
import math

from seisfm.exceptions import ConfigurationError


CONV = 'conv-hierarchical'
WINDOWED = 'windowed-attn-hierarchical'
GLOBAL = 'global-attn-nonhierarchical'
HYBRID = 'hybrid-hierarchical'
ARCHETYPES = (CONV, WINDOWED, GLOBAL, HYBRID)
HIERARCHICAL_ARCHETYPES = (CONV, WINDOWED, HYBRID)

# Stages of the hybrid archetype that use convolution blocks; the rest attend globally.
HYBRID_CONV_STAGES = 2


def _ints(values):
    return tuple(int(v) for v in values)


def default_taps(depth, stages=4):
    """Tap after blocks ceil(i * depth / stages), i = 1..stages (1-based)."""
    return tuple(int(math.ceil(i * depth / float(stages))) for i in range(1, stages + 1))


@dataclass(frozen=True)
class EncoderConfig:
    archetype: str
    stage_channels: tuple = (16, 32, 64, 128)
    stage_depths: tuple = (2, 2, 4, 2)
    patch_stride: int = 4
    window: int = 4
    tap_layers: tuple = (2, 3, 5, 6)
    depth: int = 6
    heads: tuple = (1, 2, 4, 8)
    mlp_ratio: int = 4
    input_shape: tuple = (64, 64)

    def __post_init__(self):
        for field in ('stage_channels', 'stage_depths', 'tap_layers', 'heads', 'input_shape'):
            object.__setattr__(self, field, _ints(getattr(self, field)))

    @property
    def hierarchical(self):
        return self.archetype in HIERARCHICAL_ARCHETYPES

    def stage_strides(self):
        if not self.hierarchical:
            return (self.patch_stride,) * 4
        return tuple(self.patch_stride * 2 ** s for s in range(4))

    def stage_window(self, height, width):
        """Window size used at a stage of the given spatial extent."""
        return min(self.window, height, width)

    def with_input_shape(self, shape):
        return replace(self, input_shape=_ints(shape))

    def validate(self):
        if self.archetype not in ARCHETYPES:
            raise ConfigurationError("Unknown encoder archetype '%s' (expected one of %s)" % (self.archetype, ", ".join(ARCHETYPES)))
        if len(self.stage_channels) != 4 or len(self.stage_depths) != 4 or len(self.heads) != 4:
            raise ConfigurationError("Encoders have exactly 4 stages; got channels %s, depths %s, heads %s" % (
                list(self.stage_channels), list(self.stage_depths), list(self.heads)))
        if min(self.stage_channels) < 1 or min(self.stage_depths) < 1 or min(self.heads) < 1:
            raise ConfigurationError("Stage channels, depths and heads must be positive")
        if self.patch_stride < 1 or self.window < 1 or self.mlp_ratio < 1:
            raise ConfigurationError("patch_stride, window and mlp_ratio must be positive")
        if len(self.input_shape) != 2 or min(self.input_shape) < 1:
            raise ConfigurationError("input_shape must be two positive sizes, got %s" % (self.input_shape,))
        for s, (c, heads) in enumerate(zip(self.stage_channels, self.heads)):
            if self._stage_attends(s) and c % heads:
                raise ConfigurationError("Stage %d: %d channels are not divisible into %d heads" % (s + 1, c, heads))
        if self.archetype == GLOBAL:
            self._validate_trunk()
        h, w = self.input_shape
        for s, stride in enumerate(self.stage_strides()):
            if h % stride or w % stride:
                raise ConfigurationError("Input %dx%d is not divisible by the stride %d of stage %d" % (h, w, stride, s + 1))
        if self.archetype == WINDOWED:
            for s, stride in enumerate(self.stage_strides()):
                hs, ws = h // stride, w // stride
                win = self.stage_window(hs, ws)
                if hs % win or ws % win:
                    raise ConfigurationError("Window %d does not divide the %dx%d map of stage %d at input %dx%d" % (
                        win, hs, ws, s + 1, h, w))
        return self

    def _stage_attends(self, stage):
        if self.archetype in (WINDOWED, GLOBAL):
            return True
        return self.archetype == HYBRID and stage >= HYBRID_CONV_STAGES

    def _validate_trunk(self):
        if len(set(self.stage_channels)) != 1:
            raise ConfigurationError("Non-hierarchical encoders have one width; got %s" % list(self.stage_channels))
        if self.depth < 1:
            raise ConfigurationError("Trunk depth must be positive")
        taps = self.tap_layers
        if len(taps) != 4 or list(taps) != sorted(set(taps)) or taps[0] < 1 or taps[-1] > self.depth:
            raise ConfigurationError("tap_layers must be 4 increasing block indices in 1..%d, got %s" % (self.depth, list(taps)))
        if self.stage_channels[0] % 4:
            raise ConfigurationError("Positional embedding needs a width divisible by 4, got %d" % self.stage_channels[0])


PRESETS = {
    'conv-tiny': EncoderConfig(CONV),
    'swin-tiny': EncoderConfig(WINDOWED, window=4, heads=(1, 2, 4, 8)),
    'vit-tiny': EncoderConfig(GLOBAL, stage_channels=(64, 64, 64, 64), patch_stride=8, depth=6,
                              tap_layers=default_taps(6), heads=(4, 4, 4, 4)),
    'hybrid-tiny': EncoderConfig(HYBRID, heads=(1, 2, 4, 8)),
}


def preset(name, input_shape=None):
    try:
        config = PRESETS[name]
    except KeyError:
        raise ConfigurationError("Unknown encoder preset '%s' (expected one of %s)" % (name, ", ".join(sorted(PRESETS))))
    if input_shape is not None:
        config = config.with_input_shape(input_shape)
    return config
