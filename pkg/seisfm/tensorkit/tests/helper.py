"""Utility functions for test cases"""

import numpy as np

from tensorkit import Tensor


def random_array(shape, seed=0, scale=1.0):
    """Returns a float64 array of standard normal samples."""
    return np.random.default_rng(seed).standard_normal(shape) * scale


def random_tensor(shape, seed=0, requires_grad=False, scale=1.0):
    return Tensor(random_array(shape, seed, scale), requires_grad=requires_grad)


def weighted_sum(y, seed=99):
    """Reduces `y` to a scalar through fixed random weights.

    Plain sums hide gradients that cancel across outputs; random weights keep
    every output coordinate visible to the gradient check.
    """
    w = Tensor(random_array(y.shape, seed))
    return (y * w).sum()
