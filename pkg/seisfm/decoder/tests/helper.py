"""Utility functions for test cases"""

import numpy as np

from decoder import DecoderConfig, build_decoder
from encoders import FeaturePyramid
from tensorkit import Tensor


CONV_TINY_SHAPES = [(16, 16, 16), (32, 8, 8), (64, 4, 4), (128, 2, 2)]
VIT_TINY_SHAPES = [(64, 8, 8)] * 4
TRUNK_SHAPES = [(8, 4, 4)] * 4


def random_pyramid(shapes, batch=1, seed=0, requires_grad=False, dtype=np.float64):
    rng = np.random.default_rng(seed)
    embeddings = [Tensor(rng.standard_normal((batch,) + tuple(s)).astype(dtype), requires_grad=requires_grad)
                  for s in shapes]
    return FeaturePyramid(embeddings)


def build(shapes=CONV_TINY_SHAPES, output_shape=(64, 64), seed=0, dtype=np.float64, **kwargs):
    return build_decoder(DecoderConfig(**kwargs), shapes, output_shape, seed, dtype=dtype)
