"""Image-quality scores of a prediction against its label."""
from dataclasses import dataclass, field
import math

import numpy as np

from seisdata import DEMULTIPLE, DENOISE, INTERPOLATION
from tensorkit import Tensor, conv2d

from .errors import MetricsError


PSNR_CAP = 99.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _pair(a, b):
    a = np.asarray(getattr(a, 'samples', a), dtype=np.float64)
    b = np.asarray(getattr(b, 'samples', b), dtype=np.float64)
    if a.shape != b.shape:
        raise MetricsError("Cannot compare gathers of shape %s and %s" % (a.shape, b.shape))
    return a, b


def mse(a, b):
    a, b = _pair(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(a, b, peak):
    """Peak signal-to-noise ratio in dB, capped at PSNR_CAP for identical inputs."""
    if not peak > 0:
        raise MetricsError("PSNR peak must be positive, got %r" % peak)
    error = mse(a, b)
    if error == 0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * math.log10(peak ** 2 / error))


def gaussian_window(size=SSIM_WINDOW, sigma=SSIM_SIGMA):
    k = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-k ** 2 / (2.0 * sigma ** 2))
    window = np.outer(g, g)
    return window / window.sum()


def _tensor_pair(a, b):
    a, b = (x if isinstance(x, Tensor) else Tensor(np.asarray(getattr(x, 'samples', x), dtype=np.float64))
            for x in (a, b))
    if a.shape != b.shape:
        raise MetricsError("Cannot compare gathers of shape %s and %s" % (a.shape, b.shape))
    return a, b


def _local_mean(x, kernel):
    h, w = x.shape
    return conv2d(x.reshape(1, h, w), kernel, Tensor(np.zeros(1)))


def ssim_map(a, b, data_range, window=SSIM_WINDOW, sigma=SSIM_SIGMA, k1=SSIM_K1, k2=SSIM_K2):
    """SSIM of every valid (fully covered) window position, as a Tensor.

    Built from tensorkit primitives, so a Tensor input with requires_grad
    gets a gradient through backward().
    """
    a, b = _tensor_pair(a, b)
    if a.ndim != 2:
        raise MetricsError("SSIM compares 2-D gathers, got shape %s" % (a.shape,))
    if min(a.shape) < window:
        raise MetricsError("Gather %s is smaller than the %dx%d SSIM window" % (a.shape, window, window))
    if not data_range > 0:
        raise MetricsError("SSIM data range must be positive, got %r" % data_range)

    kernel = Tensor(gaussian_window(window, sigma)[None, None])
    mu_a, mu_b = _local_mean(a, kernel), _local_mean(b, kernel)
    var_a = _local_mean(a.square(), kernel) - mu_a.square()
    var_b = _local_mean(b.square(), kernel) - mu_b.square()
    cov = _local_mean(a * b, kernel) - mu_a * mu_b
    c1 = (k1 * data_range) ** 2
    c2 = (k2 * data_range) ** 2
    numerator = (2.0 * (mu_a * mu_b) + c1) * (2.0 * cov + c2)
    denominator = (mu_a.square() + mu_b.square() + c1) * (var_a + var_b + c2)
    h, w = a.shape
    return (numerator / denominator).reshape(h - window + 1, w - window + 1)


def ssim(a, b, data_range, window=SSIM_WINDOW, sigma=SSIM_SIGMA, k1=SSIM_K1, k2=SSIM_K2):
    """Mean SSIM: a float for arrays and gathers, a scalar Tensor when either input is a Tensor."""
    values = ssim_map(a, b, data_range, window, sigma, k1, k2)
    if isinstance(a, Tensor) or isinstance(b, Tensor):
        return values.mean()
    # Identical gathers score exactly one whatever the summation order.
    if np.array_equal(*_pair(a, b)):
        return 1.0
    return float(np.mean(values.data))


def label_range(label):
    """Dynamic range used for SSIM: max - min of the label."""
    label = np.asarray(getattr(label, 'samples', label))
    return float(label.max() - label.min())


def label_peak(label):
    """Peak used for PSNR: the label's largest absolute amplitude."""
    return float(np.abs(np.asarray(getattr(label, 'samples', label))).max())


@dataclass(frozen=True)
class CombinedScore:
    ssim_demultiple: float
    ssim_interpolation: float
    ssim_denoise: float
    combined: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'combined', self.ssim_demultiple + self.ssim_interpolation + self.ssim_denoise)


def combined_ssim(scores):
    """Sum of the three per-task SSIMs; `scores` maps task name to SSIM."""
    missing = [t for t in (DEMULTIPLE, INTERPOLATION, DENOISE) if t not in scores]
    if missing:
        raise MetricsError("Combined SSIM needs all three tasks, missing %s" % ", ".join(missing))
    return CombinedScore(float(scores[DEMULTIPLE]), float(scores[INTERPOLATION]), float(scores[DENOISE]))
