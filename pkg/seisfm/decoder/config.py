from dataclasses import dataclass

from seisfm.exceptions import ConfigurationError


DOUBLE_CONV = 'double-conv'
MODERN_CONV = 'modern-conv'
BLOCKS = (DOUBLE_CONV, MODERN_CONV)

BILINEAR = 'bilinear'
TRANSPOSED_CONV = 'transposed-conv'
UPSAMPLERS = (BILINEAR, TRANSPOSED_CONV)


@dataclass(frozen=True)
class DecoderConfig:
    """UNet right-hand side settings.

    `channels` overrides the decoder widths, coarsest first: the four fusion
    widths with skip connections, otherwise the adapter width followed by the
    widths of successive upsampling steps. By default widths mirror the
    encoder's stage channels and `head_channels` is used past the finest stage.
    """
    skip_connections: bool = True
    block: str = MODERN_CONV
    upsample: str = BILINEAR
    bottleneck_multiplier: int = 2
    head_channels: int = 16
    channels: tuple = None
    zero_init_head: bool = False

    def __post_init__(self):
        if self.channels is not None:
            object.__setattr__(self, 'channels', tuple(int(c) for c in self.channels))

    def validate(self):
        if self.block not in BLOCKS:
            raise ConfigurationError("Unknown decoder block '%s' (expected one of %s)" % (self.block, ", ".join(BLOCKS)))
        if self.upsample not in UPSAMPLERS:
            raise ConfigurationError("Unknown upsampling '%s' (expected one of %s)" % (self.upsample, ", ".join(UPSAMPLERS)))
        if self.bottleneck_multiplier < 1:
            raise ConfigurationError("bottleneck_multiplier must be >= 1, got %d" % self.bottleneck_multiplier)
        if self.head_channels < 1:
            raise ConfigurationError("head_channels must be positive")
        if self.channels is not None:
            if not self.channels or min(self.channels) < 1:
                raise ConfigurationError("Decoder channels must be positive, got %s" % list(self.channels))
            if self.skip_connections and len(self.channels) != 4:
                raise ConfigurationError("With skip connections the decoder needs 4 widths, got %s" % list(self.channels))
        return self
