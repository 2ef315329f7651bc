"""Utility functions for test cases"""

from collections import namedtuple

import numpy as np

from training.store import DECODER, ENCODER, ParameterStore


Pair = namedtuple('Pair', 'input label')


def create_store(dtype=np.float32, seed=0):
    rng = np.random.default_rng(seed)
    store = ParameterStore(dtype)
    store.add('encoder.stem.kernel', rng.standard_normal((4, 1, 2, 2)), ENCODER)
    store.add('encoder.stem.bias', rng.standard_normal(4), ENCODER)
    store.add('decoder.head.kernel', rng.standard_normal((1, 4, 1, 1)), DECODER)
    store.add('decoder.head.bias', np.zeros(1), DECODER)
    return store


def create_pairs(count=4, shape=(16, 16), seed=0):
    """Smooth inputs and their negated, scaled labels."""
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        x = rng.standard_normal(shape).cumsum(axis=0) / 4.0
        pairs.append(Pair(x.astype(np.float32), (-0.5 * x).astype(np.float32)))
    return pairs


def create_corpus(count=4, shape=(16, 16), seed=1):
    rng = np.random.default_rng(seed)
    return [rng.standard_normal(shape).astype(np.float32) for _ in range(count)]
