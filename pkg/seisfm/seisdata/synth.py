"""Convolutional modeling of layered-earth gathers.

Events are rendered analytically: every reflection is a Ricker wavelet
centred on its (sub-sample) arrival time, so moveout never snaps to the
sample grid.
"""
from collections import namedtuple
import logging

import numpy as np

from .errors import SeisDataError
from .gather import DEMULTIPLE, Gather, LayeredModel, TaskSample


logger = logging.getLogger(__name__)


MAX_MULTIPLE_ORDER = 3
# Demultiple panels are rounded to this grid so that input - label is exact.
QUANTUM = 2.0 ** -24

Event = namedtuple('Event', 'time amplitude slope order')


def ricker(t, peak_freq):
    """The Ricker wavelet evaluated at times `t` (seconds)."""
    a = (np.pi * peak_freq * np.asarray(t, dtype=np.float64)) ** 2
    return (1.0 - 2.0 * a) * np.exp(-a)


def ricker_wavelet(peak_freq, dt, half_len):
    """Sampled Ricker wavelet of length 2 * half_len + 1, centred on the middle sample."""
    if not peak_freq * dt < 0.5:
        raise SeisDataError("Peak frequency %.1f Hz is above Nyquist for dt=%g s" % (peak_freq, dt))
    return ricker(np.arange(-half_len, half_len + 1) * dt, peak_freq)


def _seed(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_layered_model(rng, max_time, max_layers=8):
    """Draws a layered model whose reflectors all lie above 0.9 * max_time."""
    water_bottom_time = rng.uniform(0.08, 0.25) * max_time
    layers = []
    t = water_bottom_time
    while len(layers) < max_layers:
        thickness = rng.uniform(0.04, 0.15) * max_time
        if t + thickness > 0.9 * max_time:
            break
        t += thickness
        layers.append((thickness, rng.uniform(0.05, 0.3) * rng.choice([-1.0, 1.0])))
    if not layers:
        layers.append((0.5 * (0.9 * max_time - water_bottom_time), 0.2))
    return LayeredModel(tuple(layers), water_bottom_time, rng.uniform(0.3, 0.6), rng.uniform(15.0, 30.0))


def primary_events(model, moveout_s_per_trace):
    """Water-bottom and layer reflections; deeper events carry flatter moveout."""
    t_wb = model.water_bottom_time
    events = [Event(t_wb, model.water_bottom_r, moveout_s_per_trace, 0)]
    for t, (_, r) in zip(model.reflector_times(), model.layers):
        events.append(Event(t, r, moveout_s_per_trace * t_wb / t, 0))
    return events


def multiple_events(primaries, water_bottom_time, water_bottom_r, moveout_s_per_trace, max_order=MAX_MULTIPLE_ORDER):
    """Water-layer reverberations: order k arrives k water-bottom times later
    with amplitude (-r_wb)^k and k extra water-bottom moveout slopes.
    """
    events = []
    for p in primaries:
        for k in range(1, max_order + 1):
            events.append(Event(p.time + k * water_bottom_time, p.amplitude * (-water_bottom_r) ** k,
                                p.slope + k * moveout_s_per_trace, k))
    return events


def render(events, height, width, dt, peak_freq, offsets=None):
    """Sums wavelets for `events` on a (height, width) grid.

    With `offsets` (metres) events follow hyperbolic moveout
    t(x) = sqrt(t0^2 + (x * slope)^2), `slope` being a slowness; otherwise
    arrivals are t0 + slope * trace_index.
    """
    t = np.arange(height)[:, None] * dt
    out = np.zeros((height, width))
    traces = np.arange(width)
    for e in events:
        if offsets is None:
            tau = e.time + e.slope * traces
        else:
            tau = np.sqrt(e.time ** 2 + (offsets * e.slope) ** 2)
        out += e.amplitude * ricker(t - tau[None, :], peak_freq)
    return out


def _trace_gains(rng, width):
    """Smooth per-trace amplitude variation around one."""
    knots = rng.normal(0.0, 0.05, size=max(2, width // 64 + 2))
    return 1.0 + np.interp(np.linspace(0, len(knots) - 1, width), np.arange(len(knots)), knots)


def quantize(x):
    return np.round(x / QUANTUM) * QUANTUM


def synthesize_demultiple_pair(model, height=64, width=512, moveout_s_per_trace=2e-4, seed=0, dt=0.008):
    """CDP gather with water-layer multiples (input) and its primaries (label).

    Both panels are divided by the standard deviation of the input and
    rounded to a 2^-24 grid, so input - label equals the multiples exactly.
    `meta` carries the multiples panel and the event lists.
    """
    model.validate()
    if not model.wavelet_peak_freq * dt < 0.5:
        raise SeisDataError("Peak frequency %.1f Hz is above Nyquist for dt=%g s" % (model.wavelet_peak_freq, dt))
    primaries = primary_events(model, moveout_s_per_trace)
    for p in primaries:
        if p.time >= height * dt:
            raise SeisDataError("Reflector at %.3f s does not fit in %d samples of %g s" % (p.time, height, dt))
    multiples = multiple_events(primaries, model.water_bottom_time, model.water_bottom_r, moveout_s_per_trace)

    gains = _trace_gains(_seed(seed), width)
    p = render(primaries, height, width, dt, model.wavelet_peak_freq) * gains
    m = render(multiples, height, width, dt, model.wavelet_peak_freq) * gains
    scale = max(float(np.std(p + m)), 1e-12)
    p, m = quantize(p / scale), quantize(m / scale)
    meta = {'multiples': m, 'primary_events': primaries, 'multiple_events': multiples, 'scale': scale}
    return TaskSample(Gather(p + m, dt), Gather(p, dt), DEMULTIPLE, meta)


def synthesize_shot_gather(model, v1=1500.0, height=256, width=128, dt=0.004, trace_spacing=12.5, seed=0):
    """Shot gather with a direct arrival at offset / v1 and hyperbolic reflections.

    Returns (Gather, first_break) where first_break[j] = round(offset_j / v1 / dt).
    Samples above the first break are zero; reflections starting below the
    record are dropped.
    """
    model.validate()
    if not v1 > 0:
        raise SeisDataError("Near-surface velocity must be positive, got %r" % v1)
    if not model.wavelet_peak_freq * dt < 0.5:
        raise SeisDataError("Peak frequency %.1f Hz is above Nyquist for dt=%g s" % (model.wavelet_peak_freq, dt))
    offsets = np.arange(width) * trace_spacing
    first_break = np.round(offsets / v1 / dt).astype(np.int64)
    record = height * dt

    # Direct arrival: linear moveout at the near-surface velocity
    samples = render([Event(0.0, 1.0, trace_spacing / v1, 0)], height, width, dt, model.wavelet_peak_freq)
    reflections = []
    times = (model.water_bottom_time,) + model.reflector_times()
    coefficients = (model.water_bottom_r,) + tuple(r for _, r in model.layers)
    for t0, r in zip(times, coefficients):
        if t0 >= record:
            continue
        velocity = v1 + 800.0 * (t0 - model.water_bottom_time)
        reflections.append(Event(t0, r, 1.0 / velocity, 0))
    samples += render(reflections, height, width, dt, model.wavelet_peak_freq, offsets)
    samples *= _trace_gains(_seed(seed), width)[None, :]
    rows = np.arange(height)[:, None]
    samples[rows < first_break[None, :]] = 0.0
    return Gather(samples, dt, trace_spacing), first_break
