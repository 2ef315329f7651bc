"""Utility functions for test cases"""

import numpy as np

from metrics import gaussian_window
from seisdata import DENOISE, Gather, TaskSample


def brute_force_ssim(a, b, data_range, window=11, sigma=1.5, k1=0.01, k2=0.03):
    """Direct summation over every window position."""
    w = gaussian_window(window, sigma)
    c1, c2 = (k1 * data_range) ** 2, (k2 * data_range) ** 2
    values = []
    for i in range(a.shape[0] - window + 1):
        for j in range(a.shape[1] - window + 1):
            pa = a[i:i + window, j:j + window]
            pb = b[i:i + window, j:j + window]
            mu_a, mu_b = np.sum(w * pa), np.sum(w * pb)
            var_a = np.sum(w * (pa - mu_a) ** 2)
            var_b = np.sum(w * (pb - mu_b) ** 2)
            cov = np.sum(w * (pa - mu_a) * (pb - mu_b))
            values.append(((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
                          ((mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)))
    return float(np.mean(values))


def create_samples(count=3, shape=(16, 16), offset=0.0, seed=0):
    """Denoise samples whose input is the label plus a constant offset."""
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(count):
        label = rng.standard_normal(shape)
        samples.append(TaskSample(Gather(label + offset), Gather(label), DENOISE))
    return samples


class FakeClock(object):
    """Returns the given instants in order."""

    def __init__(self, instants):
        self.instants = list(instants)

    def __call__(self):
        return self.instants.pop(0)


class CountingModel(object):

    def __init__(self):
        self.calls = []

    def predict(self, gathers):
        self.calls.append(gathers.shape)
        return gathers
