"""Parameterised building blocks shared by the encoders and the decoder.

Every block registers its tensors in a ParameterStore under a dotted name
prefix and a partition, then computes with tensorkit primitives on
(N, C, H, W) feature maps.
"""
import logging

import numpy as np

from tensorkit import (
    ShapeError, Tensor, attention, bilinear_upsample2x, channel_layernorm, conv2d, gelu, layernorm, linear, roll,
    transposed_conv2x, trunc_normal, window_merge, window_partition,
)


logger = logging.getLogger(__name__)


INIT_STD = 0.02
# Additive logit for token pairs the shifted-window mask separates.
MASKED_LOGIT = -100.0


class Block(object):
    """Base class: owns a name prefix in the store and a seeded generator."""

    def __init__(self, store, prefix, partition, rng):
        self.store = store
        self.prefix = prefix
        self.partition = partition
        self.rng = rng

    def weight(self, name, shape):
        return self.store.add(self._name(name), trunc_normal(self.rng, shape, INIT_STD, self.store.dtype), self.partition)

    def zeros(self, name, shape):
        return self.store.add(self._name(name), np.zeros(shape), self.partition)

    def ones(self, name, shape):
        return self.store.add(self._name(name), np.ones(shape), self.partition)

    def _name(self, name):
        return "%s.%s" % (self.prefix, name)

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)


class Conv(Block):
    def __init__(self, store, prefix, partition, rng, c_in, c_out, kernel, stride=1, padding=0, groups=1):
        super().__init__(store, prefix, partition, rng)
        self.stride, self.padding, self.groups = stride, padding, groups
        self.kernel = self.weight('kernel', (c_out, c_in // groups, kernel, kernel))
        self.bias = self.zeros('bias', (c_out,))

    def forward(self, x):
        return conv2d(x, self.kernel, self.bias, stride=self.stride, padding=self.padding, groups=self.groups)


class Dense(Block):
    def __init__(self, store, prefix, partition, rng, d_in, d_out):
        super().__init__(store, prefix, partition, rng)
        self.w = self.weight('weight', (d_out, d_in))
        self.b = self.zeros('bias', (d_out,))

    def forward(self, x):
        return linear(x, self.w, self.b)


class Norm(Block):
    """Layer norm over the last axis (`channels_last`) or the channel axis."""

    def __init__(self, store, prefix, partition, rng, dim, channels_last=True):
        super().__init__(store, prefix, partition, rng)
        self.channels_last = channels_last
        self.gamma = self.ones('gamma', (dim,))
        self.beta = self.zeros('beta', (dim,))

    def forward(self, x):
        if self.channels_last:
            return layernorm(x, self.gamma, self.beta)
        return channel_layernorm(x, self.gamma, self.beta)


class ConvNeXtBlock(Block):
    """Depthwise 7x7, layer norm, pointwise expand (GELU) and contract, residual."""

    def __init__(self, store, prefix, partition, rng, dim, expansion=4):
        super().__init__(store, prefix, partition, rng)
        self.dw = Conv(store, prefix + '.dw', partition, rng, dim, dim, 7, padding=3, groups=dim)
        self.norm = Norm(store, prefix + '.norm', partition, rng, dim)
        self.expand = Dense(store, prefix + '.expand', partition, rng, dim, expansion * dim)
        self.contract = Dense(store, prefix + '.contract', partition, rng, expansion * dim, dim)

    def forward(self, x):
        y = self.dw(x).transpose(0, 2, 3, 1)
        y = self.contract(gelu(self.expand(self.norm(y))))
        return x + y.transpose(0, 3, 1, 2)


class MultiHeadAttention(Block):
    """Multi-head self-attention over token sequences of shape (B, T, C)."""

    def __init__(self, store, prefix, partition, rng, dim, heads):
        super().__init__(store, prefix, partition, rng)
        self.heads = heads
        self.q = Dense(store, prefix + '.q', partition, rng, dim, dim)
        self.k = Dense(store, prefix + '.k', partition, rng, dim, dim)
        self.v = Dense(store, prefix + '.v', partition, rng, dim, dim)
        self.proj = Dense(store, prefix + '.proj', partition, rng, dim, dim)

    def split(self, x):
        b, t, c = x.shape
        return x.reshape(b, t, self.heads, c // self.heads).transpose(0, 2, 1, 3)

    def forward(self, x, mask=None):
        b, t, c = x.shape
        out = attention(self.split(self.q(x)), self.split(self.k(x)), self.split(self.v(x)), mask=mask)
        return self.proj(out.transpose(0, 2, 1, 3).reshape(b, t, c))


class Mlp(Block):
    def __init__(self, store, prefix, partition, rng, dim, ratio):
        super().__init__(store, prefix, partition, rng)
        self.fc1 = Dense(store, prefix + '.fc1', partition, rng, dim, ratio * dim)
        self.fc2 = Dense(store, prefix + '.fc2', partition, rng, ratio * dim, dim)

    def forward(self, x):
        return self.fc2(gelu(self.fc1(x)))


class TokenBlock(Block):
    """Pre-norm transformer block on (B, T, C) tokens."""

    def __init__(self, store, prefix, partition, rng, dim, heads, mlp_ratio):
        super().__init__(store, prefix, partition, rng)
        self.norm1 = Norm(store, prefix + '.norm1', partition, rng, dim)
        self.attn = MultiHeadAttention(store, prefix + '.attn', partition, rng, dim, heads)
        self.norm2 = Norm(store, prefix + '.norm2', partition, rng, dim)
        self.mlp = Mlp(store, prefix + '.mlp', partition, rng, dim, mlp_ratio)

    def forward(self, x, mask=None):
        x = x + self.attn(self.norm1(x), mask=mask)
        return x + self.mlp(self.norm2(x))


def to_tokens(x):
    n, c, h, w = x.shape
    return x.reshape(n, c, h * w).transpose(0, 2, 1)


def from_tokens(t, height, width):
    n, _, c = t.shape
    return t.transpose(0, 2, 1).reshape(n, c, height, width)


class GlobalAttentionBlock(TokenBlock):
    """Transformer block attending over every position of a feature map."""

    def forward(self, x, mask=None):
        _, _, h, w = x.shape
        return from_tokens(super().forward(to_tokens(x)), h, w)


def shifted_window_mask(height, width, window, shift):
    """Region mask of shape (windows, T, T) for cyclically shifted windows.

    Tokens that were not neighbours before the roll belong to different
    regions and must not attend to each other.
    """
    labels = np.zeros((height, width))
    count = 0
    bands = (slice(0, -window), slice(-window, -shift), slice(-shift, None))
    for hs in bands:
        for ws in bands:
            labels[hs, ws] = count
            count += 1
    nh, nw = height // window, width // window
    regions = labels.reshape(nh, window, nw, window).transpose(0, 2, 1, 3).reshape(nh * nw, window * window)
    different = regions[:, :, None] != regions[:, None, :]
    return np.where(different, MASKED_LOGIT, 0.0)


class WindowAttentionBlock(TokenBlock):
    """Transformer block attending within non-overlapping windows.

    Odd blocks of a stage shift the windows by half a window so that
    information crosses window borders.
    """

    def __init__(self, store, prefix, partition, rng, dim, heads, mlp_ratio, window, shifted):
        super().__init__(store, prefix, partition, rng, dim, heads, mlp_ratio)
        self.window = window
        self.shifted = shifted
        self._masks = {}

    def geometry(self, height, width):
        win = min(self.window, height, width)
        shift = win // 2 if self.shifted and min(height, width) > self.window else 0
        return win, shift

    def region_mask(self, batch, height, width, win, shift):
        key = (height, width, win, shift)
        if key not in self._masks:
            self._masks[key] = shifted_window_mask(height, width, win, shift)
        per_image = self._masks[key]
        return np.tile(per_image, (batch, 1, 1))[:, None, :, :]

    def forward(self, x, mask=None):
        n, c, h, w = x.shape
        win, shift = self.geometry(h, w)
        y = self.norm1(x.transpose(0, 2, 3, 1)).transpose(0, 3, 1, 2)
        if shift:
            y = roll(y, (-shift, -shift), (2, 3))
        windows, layout = window_partition(y, win)
        tokens = windows.reshape(windows.shape[0], c, win * win).transpose(0, 2, 1)
        regions = self.region_mask(n, h, w, win, shift) if shift else None
        out = self.attn(tokens, mask=regions)
        out = out.transpose(0, 2, 1).reshape(windows.shape[0], c, win, win)
        y = window_merge(out, layout)
        if shift:
            y = roll(y, (shift, shift), (2, 3))
        x = x + y
        z = self.mlp(self.norm2(x.transpose(0, 2, 3, 1)))
        return x + z.transpose(0, 3, 1, 2)


def sincos_embedding(dim, height, width):
    """Fixed 2-D sine-cosine position table of shape (height * width, dim)."""
    def axis_table(d, positions):
        omega = 1.0 / 10000 ** (np.arange(d // 2, dtype=np.float64) / (d / 2.0))
        angles = np.outer(positions.reshape(-1), omega)
        return np.concatenate([np.sin(angles), np.cos(angles)], axis=1)

    grid_w, grid_h = np.meshgrid(np.arange(width, dtype=np.float64), np.arange(height, dtype=np.float64))
    return np.concatenate([axis_table(dim // 2, grid_h), axis_table(dim // 2, grid_w)], axis=1)


class Upsample(Block):
    """2x spatial upsampling, bilinear or by transposed convolution."""

    def __init__(self, store, prefix, partition, rng, channels, method):
        super().__init__(store, prefix, partition, rng)
        self.method = method
        if method == 'transposed-conv':
            self.kernel = self.weight('kernel', (channels, channels, 2, 2))
            self.bias = self.zeros('bias', (channels,))

    def forward(self, x):
        if self.method == 'transposed-conv':
            return transposed_conv2x(x, self.kernel, self.bias)
        return bilinear_upsample2x(x)


def as_batch(gathers, dtype):
    """Stacks one (H, W) gather or a (N, H, W) batch into an (N, 1, H, W) Tensor.

    Tensors are reshaped in the graph so gradients reach the input; arrays
    are cast to `dtype`.
    """
    if isinstance(gathers, Tensor):
        if gathers.ndim not in (2, 3):
            raise ShapeError("Expected (H,W) or (N,H,W) gathers, got %s" % (gathers.shape,))
        n = gathers.shape[0] if gathers.ndim == 3 else 1
        return gathers.reshape(n, 1, gathers.shape[-2], gathers.shape[-1]), gathers.ndim == 3
    data = np.asarray(gathers)
    if data.ndim not in (2, 3):
        raise ShapeError("Expected (H,W) or (N,H,W) gathers, got %s" % (data.shape,))
    batched = data.ndim == 3
    if data.ndim == 2:
        data = data[None]
    return Tensor(data[:, None].astype(dtype, copy=False)), batched
