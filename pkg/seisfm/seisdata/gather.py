from dataclasses import dataclass, field, replace

import numpy as np

from .errors import SeisDataError


DEMULTIPLE = 'demultiple'
INTERPOLATION = 'interpolation'
DENOISE = 'denoise'
TASKS = (DEMULTIPLE, INTERPOLATION, DENOISE)

DEFAULT_DT = 0.004
DEFAULT_TRACE_SPACING = 12.5


@dataclass(frozen=True, eq=False)
class Gather:
    """Traces (columns) over time samples (rows) at interval `dt` seconds."""
    samples: np.ndarray
    dt: float = DEFAULT_DT
    trace_spacing: float = DEFAULT_TRACE_SPACING

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim != 2 or min(samples.shape) < 1:
            raise SeisDataError("A gather is a non-empty 2-D array, got shape %s" % (samples.shape,))
        if not np.isfinite(samples).all():
            raise SeisDataError("Gather samples must be finite")
        if not self.dt > 0:
            raise SeisDataError("Sample interval must be positive, got %r" % self.dt)
        object.__setattr__(self, 'samples', samples)

    @property
    def shape(self):
        return self.samples.shape

    def with_samples(self, samples):
        return replace(self, samples=samples)


@dataclass(frozen=True)
class LayeredModel:
    """Flat-layered earth below a water layer.

    `layers` holds (thickness in two-way seconds, reflection coefficient)
    pairs, top to bottom, starting at the water bottom.
    """
    layers: tuple
    water_bottom_time: float
    water_bottom_r: float
    wavelet_peak_freq: float = 25.0

    def __post_init__(self):
        object.__setattr__(self, 'layers', tuple((float(t), float(r)) for t, r in self.layers))

    def validate(self):
        if not self.layers:
            raise SeisDataError("A layered model needs at least one layer")
        for thickness, r in self.layers:
            if not thickness > 0:
                raise SeisDataError("Layer thickness must be positive, got %r" % thickness)
            if not abs(r) < 1:
                raise SeisDataError("Reflection coefficients lie in (-1, 1), got %r" % r)
        if not abs(self.water_bottom_r) < 1:
            raise SeisDataError("Water-bottom coefficient lies in (-1, 1), got %r" % self.water_bottom_r)
        if not self.water_bottom_time > 0:
            raise SeisDataError("Water-bottom time must be positive")
        return self

    def reflector_times(self):
        """Two-way times of the layer-base reflectors at zero offset."""
        return tuple(float(self.water_bottom_time + t) for t in np.cumsum([t for t, _ in self.layers]))


@dataclass(frozen=True, eq=False)
class MaskedGather:
    base: Gather
    mask: np.ndarray

    @property
    def masked(self):
        return self.base.with_samples(np.where(self.mask[None, :], 0.0, self.base.samples))

    @property
    def masked_fraction(self):
        return float(self.mask.mean())


@dataclass(frozen=True, eq=False)
class TaskSample:
    input: Gather
    label: Gather
    task: str
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.task not in TASKS:
            raise SeisDataError("Unknown task '%s'" % self.task)
        if self.input.shape != self.label.shape:
            raise SeisDataError("Input %s and label %s differ in shape" % (self.input.shape, self.label.shape))
