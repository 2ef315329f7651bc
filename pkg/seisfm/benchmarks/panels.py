"""Qualitative panels: input, prediction and residual images as 8-bit PGM files."""
from collections import OrderedDict
import logging
import os

import numpy as np

from seisdata import DEMULTIPLE, DENOISE, INTERPOLATION

from .reports import ReportError


logger = logging.getLogger(__name__)


CLIP_SIGMAS = 3.0
RESIDUAL_GAIN = 10.0


def panel_arrays(sample, prediction, task):
    """Named panels of one sample, in display order.

    interpolation: gather G, decimated D(G), prediction G*, residual (G - G*) x 10
    denoise: gather G, noisy G+N, prediction G*, predicted noise (G+N) - G*
    demultiple: input P+M, predicted primaries P*, predicted multiples (P+M) - P*
    """
    if sample.task != task:
        raise ReportError("Sample of task %s given for %s panels" % (sample.task, task))
    given = np.asarray(sample.input.samples, dtype=np.float64)
    label = np.asarray(sample.label.samples, dtype=np.float64)
    prediction = np.asarray(prediction, dtype=np.float64)
    if prediction.shape != given.shape:
        raise ReportError("Prediction of shape %s for a %s gather" % (prediction.shape, given.shape))

    if task == INTERPOLATION:
        return OrderedDict([('gather', label), ('decimated', given), ('predicted', prediction),
                            ('residual_x10', (label - prediction) * RESIDUAL_GAIN)])
    if task == DENOISE:
        return OrderedDict([('gather', label), ('noisy', given), ('predicted', prediction),
                            ('noise', given - prediction)])
    if task == DEMULTIPLE:
        return OrderedDict([('input', given), ('primaries', prediction), ('multiples', given - prediction)])
    raise ReportError("No panels defined for task '%s'" % task)


def to_gray(values, sigma):
    """Maps amplitudes to 0..255 with zero at 128, clipped at +/- 3 sigma."""
    scale = CLIP_SIGMAS * sigma if sigma > 0 else 1.0
    scaled = np.clip(np.asarray(values, dtype=np.float64) / scale, -1.0, 1.0)
    return np.rint(128.0 + 127.0 * scaled).astype(np.uint8)


def write_pgm(path, values, sigma):
    """Writes a binary (P5) grayscale image; rows are time samples."""
    pixels = to_gray(values, sigma)
    height, width = pixels.shape
    with open(path, 'wb') as f:
        f.write(b'P5\n%d %d\n255\n' % (width, height))
        f.write(pixels.tobytes())
    return path


def read_pgm(path):
    with open(path, 'rb') as f:
        magic, size, depth, payload = f.read().split(b'\n', 3)
    if magic != b'P5' or depth != b'255':
        raise ReportError("%s is not an 8-bit binary PGM file" % path)
    width, height = (int(v) for v in size.split())
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width)


def emit_panels(predict, samples, task, directory):
    """Writes `<task>-<n>-<panel>.pgm` for every sample; returns the paths.

    All panels of one sample share the clip level of its input gather.
    """
    if not samples:
        raise ReportError("No samples to draw %s panels for" % task)
    os.makedirs(directory, exist_ok=True)
    predictions = np.asarray(predict(np.stack([s.input.samples for s in samples])))
    paths = []
    for i, (sample, prediction) in enumerate(zip(samples, predictions)):
        sigma = float(np.std(sample.input.samples))
        for name, values in panel_arrays(sample, prediction, task).items():
            path = os.path.join(directory, '%s-%03d-%s.pgm' % (task, i, name))
            paths.append(write_pgm(path, values, sigma))
    logger.info("Wrote %d %s panels to %s", len(paths), task, directory)
    return paths
