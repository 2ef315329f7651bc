"""Utility functions for test cases"""

import numpy as np

from seisdata import Gather, LayeredModel


def create_model(water_bottom_r=0.5, layers=((0.1, 0.2),), water_bottom_time=0.2, peak=20.0):
    """One layer under the water: reflectors at 0.2 s and 0.3 s."""
    return LayeredModel(layers, water_bottom_time, water_bottom_r, peak)


def create_gather(shape=(32, 16), seed=0, dt=0.004, trace_spacing=12.5):
    rng = np.random.default_rng(seed)
    return Gather(rng.standard_normal(shape), dt, trace_spacing)


def crafted_traces(count=3, samples=8, seed=0):
    """float32 gather whose values survive an IEEE round trip unchanged."""
    rng = np.random.default_rng(seed)
    return Gather(rng.standard_normal((samples, count)).astype(np.float32), 0.004, 25.0)
