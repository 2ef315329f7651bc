"""Reconstruction losses on predicted and target gathers."""
import numpy as np

from tensorkit import ShapeError, Tensor


def _pair(pred, target):
    pred = pred if isinstance(pred, Tensor) else Tensor(np.asarray(pred, dtype=np.float64))
    if not isinstance(target, Tensor):
        target = Tensor(np.asarray(target, dtype=pred.dtype))
    if pred.shape != target.shape:
        raise ShapeError("Loss needs matching shapes, got %s and %s" % (pred.shape, target.shape))
    return pred, target


def l1_loss(pred, target):
    """Mean absolute difference, as a scalar Tensor."""
    pred, target = _pair(pred, target)
    return (pred - target).abs().mean()


def l2_loss(pred, target):
    """Mean squared difference, as a scalar Tensor."""
    pred, target = _pair(pred, target)
    return (pred - target).square().mean()


LOSSES = {
    'l1': l1_loss,
    'l2': l2_loss,
}
