"""Utility functions for test cases"""

import numpy as np

from encoders import CONV, GLOBAL, HYBRID, WINDOWED, EncoderConfig, build_encoder


def small_config(archetype=CONV, input_shape=(16, 16), **kwargs):
    """Returns a very small config of the given archetype for fast tests.

    Hierarchical archetypes use patch stride 2 so that a 16x16 gather still
    reaches a 1x1 fourth stage; the global archetype uses patch 8 and depth 4
    so that its pyramid can still be decoded with skip connections.
    """
    if archetype == GLOBAL:
        defaults = dict(stage_channels=(8, 8, 8, 8), patch_stride=8, depth=4, tap_layers=(1, 2, 3, 4), heads=(2, 2, 2, 2))
    else:
        defaults = dict(stage_channels=(4, 4, 8, 8), stage_depths=(1, 1, 1, 1), patch_stride=2, window=2, heads=(1, 1, 2, 2))
    defaults.update(kwargs)
    return EncoderConfig(archetype, input_shape=input_shape, **defaults)


def random_config(rng, archetype):
    """Random valid configuration of an archetype at a 32x32 input."""
    heads = int(rng.choice([1, 2]))
    if archetype == GLOBAL:
        dim = 4 * heads * int(rng.integers(1, 3))
        depth = int(rng.integers(4, 7))
        taps = tuple(sorted(rng.choice(np.arange(1, depth + 1), size=4, replace=False).tolist()))
        return EncoderConfig(GLOBAL, stage_channels=(dim,) * 4, patch_stride=int(rng.choice([2, 4])), depth=depth,
                             tap_layers=taps, heads=(heads,) * 4, mlp_ratio=2, input_shape=(32, 32))
    base = heads * int(rng.integers(1, 3))
    channels = tuple(base * 2 ** s for s in range(4))
    depths = tuple(int(d) for d in rng.integers(1, 3, size=4))
    return EncoderConfig(archetype, stage_channels=channels, stage_depths=depths, patch_stride=2,
                         window=int(rng.choice([2, 4])), heads=(heads,) * 4, mlp_ratio=2, input_shape=(32, 32))


def build(archetype=CONV, seed=0, dtype=np.float64, **kwargs):
    return build_encoder(small_config(archetype, **kwargs), seed, dtype=dtype)


def random_gathers(shape, seed=0):
    return np.random.default_rng(seed).standard_normal(shape)


HIERARCHICAL = (CONV, WINDOWED, HYBRID)
