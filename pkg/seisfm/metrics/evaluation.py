from dataclasses import asdict, dataclass
import logging

import numpy as np

from .errors import MetricsError
from .quality import label_peak, label_range, mse, psnr, ssim


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetricsRecord:
    task: str
    mse: float
    psnr: float
    ssim: float
    params_encoder: int = 0
    params_total: int = 0
    throughput: float = 0.0
    latency: float = 0.0

    def __post_init__(self):
        if not self.mse >= 0:
            raise MetricsError("MSE must be non-negative, got %r" % self.mse)
        if not self.ssim <= 1.0:
            raise MetricsError("SSIM cannot exceed one, got %r" % self.ssim)

    def as_dict(self):
        return asdict(self)


def score(prediction, label):
    """(mse, psnr, ssim) of one prediction, with the label's peak and range."""
    return (mse(prediction, label), psnr(prediction, label, label_peak(label)),
            ssim(prediction, label, label_range(label)))


def evaluate(predict, samples, task, batch=16):
    """Mean scores of `predict` over held-out samples of one task.

    `predict` maps an (N, H, W) array of inputs to predictions of the same shape.
    """
    if not samples:
        raise MetricsError("No samples to evaluate for %s" % task)
    wrong = {s.task for s in samples} - {task}
    if wrong:
        raise MetricsError("Samples of task %s given for %s" % (", ".join(sorted(wrong)), task))
    scores = []
    for start in range(0, len(samples), batch):
        chunk = samples[start:start + batch]
        inputs = np.stack([s.input.samples for s in chunk])
        predictions = np.asarray(predict(inputs))
        if predictions.shape != inputs.shape:
            raise MetricsError("Predictions of shape %s for inputs %s" % (predictions.shape, inputs.shape))
        scores.extend(score(p, s.label.samples) for p, s in zip(predictions, chunk))
    means = np.mean(np.array(scores), axis=0)
    logger.info("Evaluated %d %s samples: mse=%.5f psnr=%.2f ssim=%.4f", len(samples), task, *means)
    return MetricsRecord(task, float(means[0]), float(means[1]), float(means[2]))
