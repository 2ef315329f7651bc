"""Differentiable primitives and the functional layer built on them.

Shapes are strict: apart from the bias add inside `linear`, `conv2d` and the
upsampling primitives, binary operations need identical shapes. Spatial
primitives work on (N, C, H, W); the functional wrappers also accept a single
(C, H, W) panel.
"""
from collections import namedtuple
import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .tensor import Function, ShapeError, _describe


def _same_shape(name, a, b):
    if a.shape != b.shape:
        raise ShapeError("%s needs equal shapes, got %s and %s" % (name, _describe(a.shape), _describe(b.shape)))


# =============================================================================
# == Elementwise
# =============================================================================

class Add(Function):
    name = 'add'

    def forward(self, a, b):
        _same_shape(self.name, a, b)
        return a + b

    def backward(self, grad):
        return grad, grad


class Sub(Function):
    name = 'sub'

    def forward(self, a, b):
        _same_shape(self.name, a, b)
        return a - b

    def backward(self, grad):
        return grad, -grad


class Mul(Function):
    name = 'mul'

    def forward(self, a, b):
        _same_shape(self.name, a, b)
        self.saved['a'], self.saved['b'] = a, b
        return a * b

    def backward(self, grad):
        return grad * self.saved['b'], grad * self.saved['a']


class Div(Function):
    name = 'div'

    def forward(self, a, b):
        _same_shape(self.name, a, b)
        self.saved['a'], self.saved['b'] = a, b
        return a / b

    def backward(self, grad):
        a, b = self.saved['a'], self.saved['b']
        return grad / b, -grad * a / (b * b)


class AddConst(Function):
    """Adds a python scalar, or a constant array of identical shape."""
    name = 'add_const'

    def forward(self, a, value=0.0):
        if isinstance(value, np.ndarray) and value.shape != a.shape:
            raise ShapeError("add_const needs a constant of shape %s, got %s" % (_describe(a.shape), _describe(value.shape)))
        return (a + value).astype(a.dtype, copy=False)

    def backward(self, grad):
        return (grad,)


class MulConst(Function):
    name = 'mul_const'

    def forward(self, a, value=1.0):
        if isinstance(value, np.ndarray) and value.shape != a.shape:
            raise ShapeError("mul_const needs a constant of shape %s, got %s" % (_describe(a.shape), _describe(value.shape)))
        self.saved['value'] = value
        return (a * value).astype(a.dtype, copy=False)

    def backward(self, grad):
        return ((grad * self.saved['value']).astype(grad.dtype, copy=False),)


class Abs(Function):
    """Absolute value; the subgradient at zero is zero."""
    name = 'abs'

    def forward(self, a):
        self.saved['sign'] = np.sign(a)
        return np.abs(a)

    def backward(self, grad):
        return (grad * self.saved['sign'],)


class Square(Function):
    name = 'square'

    def forward(self, a):
        self.saved['a'] = a
        return a * a

    def backward(self, grad):
        return (2.0 * grad * self.saved['a'],)


GELU_SCALE = math.sqrt(2.0 / math.pi)


class Gelu(Function):
    """GELU, tanh approximation."""
    name = 'gelu'

    def forward(self, a):
        inner = GELU_SCALE * (a + 0.044715 * a ** 3)
        t = np.tanh(inner)
        self.saved['a'], self.saved['t'] = a, t
        return 0.5 * a * (1.0 + t)

    def backward(self, grad):
        a, t = self.saved['a'], self.saved['t']
        d_inner = GELU_SCALE * (1.0 + 3 * 0.044715 * a * a)
        local = 0.5 * (1.0 + t) + 0.5 * a * (1.0 - t * t) * d_inner
        return (grad * local,)


# =============================================================================
# == Reductions and layout
# =============================================================================

class Sum(Function):
    name = 'sum'

    def forward(self, a, axis=None):
        self.saved['shape'], self.saved['axis'] = a.shape, axis
        return np.asarray(a.sum(axis=axis))

    def backward(self, grad):
        shape, axis = self.saved['shape'], self.saved['axis']
        if axis is not None:
            grad = np.expand_dims(grad, axis)
        return (np.broadcast_to(grad, shape).copy(),)


class Mean(Function):
    name = 'mean'

    def forward(self, a, axis=None):
        self.saved['shape'], self.saved['axis'] = a.shape, axis
        if axis is None:
            self.saved['count'] = a.size
        else:
            axes = axis if isinstance(axis, tuple) else (axis,)
            self.saved['count'] = int(np.prod([a.shape[i] for i in axes]))
        return np.asarray(a.mean(axis=axis))

    def backward(self, grad):
        shape, axis = self.saved['shape'], self.saved['axis']
        if axis is not None:
            grad = np.expand_dims(grad, axis)
        return (np.broadcast_to(grad / self.saved['count'], shape).copy(),)


class Reshape(Function):
    name = 'reshape'

    def forward(self, a, shape=()):
        self.saved['shape'] = a.shape
        try:
            return a.reshape(shape)
        except ValueError:
            raise ShapeError("cannot reshape %s into %s" % (_describe(a.shape), _describe(shape)))

    def backward(self, grad):
        return (grad.reshape(self.saved['shape']),)


class Transpose(Function):
    name = 'transpose'

    def forward(self, a, axes=None):
        if axes is None or len(axes) == 0:
            axes = tuple(reversed(range(a.ndim)))
        self.saved['inverse'] = tuple(np.argsort(axes))
        return a.transpose(axes)

    def backward(self, grad):
        return (grad.transpose(self.saved['inverse']),)


class Concat(Function):
    name = 'concat'

    def forward(self, *arrays, axis=0):
        reference = list(arrays[0].shape)
        for a in arrays[1:]:
            other = list(a.shape)
            if len(other) != len(reference):
                raise ShapeError("concat needs equal ranks")
            other[axis] = reference[axis]
            if other != reference:
                raise ShapeError("concat shapes %s disagree off axis %d" % (
                    ", ".join(_describe(x.shape) for x in arrays), axis))
        self.saved['sizes'] = [a.shape[axis] for a in arrays]
        self.saved['axis'] = axis
        return np.concatenate(arrays, axis=axis)

    def backward(self, grad):
        edges = np.cumsum(self.saved['sizes'])[:-1]
        return tuple(np.split(grad, edges, axis=self.saved['axis']))


class Roll(Function):
    name = 'roll'

    def forward(self, a, shift=(0,), axis=(0,)):
        self.saved['shift'], self.saved['axis'] = shift, axis
        return np.roll(a, shift, axis=axis)

    def backward(self, grad):
        back = tuple(-s for s in self.saved['shift'])
        return (np.roll(grad, back, axis=self.saved['axis']),)


class Softmax(Function):
    """Softmax along the last axis."""
    name = 'softmax'

    def forward(self, a):
        shifted = a - a.max(axis=-1, keepdims=True)
        e = np.exp(shifted)
        y = e / e.sum(axis=-1, keepdims=True)
        self.saved['y'] = y
        return y

    def backward(self, grad):
        y = self.saved['y']
        return (y * (grad - (grad * y).sum(axis=-1, keepdims=True)),)


class MatMul(Function):
    """Batched matrix product over identical leading dimensions."""
    name = 'matmul'

    def forward(self, a, b):
        if a.ndim < 2 or a.ndim != b.ndim or a.shape[:-2] != b.shape[:-2] or a.shape[-1] != b.shape[-2]:
            raise ShapeError("matmul cannot combine %s and %s" % (_describe(a.shape), _describe(b.shape)))
        self.saved['a'], self.saved['b'] = a, b
        return np.matmul(a, b)

    def backward(self, grad):
        a, b = self.saved['a'], self.saved['b']
        return np.matmul(grad, np.swapaxes(b, -1, -2)), np.matmul(np.swapaxes(a, -1, -2), grad)


# =============================================================================
# == Neural primitives
# =============================================================================

class Linear(Function):
    name = 'linear'

    def forward(self, x, weight, bias):
        if weight.ndim != 2 or x.shape[-1] != weight.shape[1]:
            raise ShapeError("linear: input %s does not match weight %s" % (_describe(x.shape), _describe(weight.shape)))
        if bias.shape != (weight.shape[0],):
            raise ShapeError("linear: bias %s does not match weight %s" % (_describe(bias.shape), _describe(weight.shape)))
        self.saved['x'], self.saved['weight'] = x, weight
        return np.matmul(x, weight.T) + bias

    def backward(self, grad):
        x, weight = self.saved['x'], self.saved['weight']
        g2 = grad.reshape(-1, grad.shape[-1])
        x2 = x.reshape(-1, x.shape[-1])
        return np.matmul(grad, weight), g2.T @ x2, g2.sum(axis=0)


class LayerNorm(Function):
    """Normalisation over the last axis followed by a per-feature affine map."""
    name = 'layernorm'

    def forward(self, x, gamma, beta, eps=1e-6):
        d = x.shape[-1]
        if d < 1 or gamma.shape != (d,) or beta.shape != (d,):
            raise ShapeError("layernorm: input %s with gamma %s, beta %s" % (
                _describe(x.shape), _describe(gamma.shape), _describe(beta.shape)))
        mu = x.mean(axis=-1, keepdims=True)
        centred = x - mu
        var = (centred * centred).mean(axis=-1, keepdims=True)
        inv = 1.0 / np.sqrt(var + eps)
        xhat = centred * inv
        self.saved['xhat'], self.saved['inv'], self.saved['gamma'] = xhat, inv, gamma
        return xhat * gamma + beta

    def backward(self, grad):
        xhat, inv, gamma = self.saved['xhat'], self.saved['inv'], self.saved['gamma']
        dxhat = grad * gamma
        dx = inv * (dxhat - dxhat.mean(axis=-1, keepdims=True)
                    - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True))
        lead = tuple(range(grad.ndim - 1))
        return dx, (grad * xhat).sum(axis=lead), grad.sum(axis=lead)


class Conv2d(Function):
    """Grouped 2-D cross-correlation on (N, C, H, W)."""
    name = 'conv2d'

    def forward(self, x, kernel, bias, stride=1, padding=0, groups=1):
        if x.ndim != 4 or kernel.ndim != 4:
            raise ShapeError("conv2d needs (N,C,H,W) input and (O,C/g,kH,kW) kernel, got %s and %s" % (
                _describe(x.shape), _describe(kernel.shape)))
        n, c, h, w = x.shape
        o, cg, kh, kw = kernel.shape
        if stride < 1 or padding < 0:
            raise ShapeError("conv2d: stride must be >= 1 and padding >= 0")
        if cg * groups != c:
            raise ShapeError("conv2d: kernel expects %d input channels (groups=%d), input has %d" % (cg * groups, groups, c))
        if o % groups:
            raise ShapeError("conv2d: %d output channels not divisible into %d groups" % (o, groups))
        if bias.shape != (o,):
            raise ShapeError("conv2d: bias %s for %d output channels" % (_describe(bias.shape), o))
        if kh > h + 2 * padding or kw > w + 2 * padding:
            raise ShapeError("conv2d: kernel %dx%d larger than padded input %dx%d" % (kh, kw, h + 2 * padding, w + 2 * padding))
        xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding))) if padding else x
        windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
        ho, wo = windows.shape[2], windows.shape[3]
        win_g = windows.reshape(n, groups, cg, ho, wo, kh, kw)
        ker_g = kernel.reshape(groups, o // groups, cg, kh, kw)
        out = np.einsum('ngchwij,gocij->ngohw', win_g, ker_g, optimize=True).reshape(n, o, ho, wo)
        self.saved.update(win_g=win_g, ker_g=ker_g, padded=xp.shape, stride=stride, padding=padding,
                          groups=groups, kernel_shape=kernel.shape, out_hw=(ho, wo))
        return out + bias[None, :, None, None]

    def backward(self, grad):
        s = self.saved
        win_g, ker_g, stride, padding = s['win_g'], s['ker_g'], s['stride'], s['padding']
        groups = s['groups']
        o, cg, kh, kw = s['kernel_shape']
        n = grad.shape[0]
        ho, wo = s['out_hw']
        grad_g = grad.reshape(n, groups, o // groups, ho, wo)
        d_kernel = np.einsum('ngohw,ngchwij->gocij', grad_g, win_g, optimize=True).reshape(o, cg, kh, kw)
        d_bias = grad.sum(axis=(0, 2, 3))
        d_padded = np.zeros(s['padded'], dtype=grad.dtype)
        c = cg * groups
        for i in range(kh):
            for j in range(kw):
                contrib = np.einsum('ngohw,goc->ngchw', grad_g, ker_g[..., i, j], optimize=True).reshape(n, c, ho, wo)
                d_padded[:, :, i:i + stride * (ho - 1) + 1:stride, j:j + stride * (wo - 1) + 1:stride] += contrib
        if padding:
            d_padded = d_padded[:, :, padding:-padding, padding:-padding]
        return d_padded, d_kernel.astype(grad.dtype, copy=False), d_bias


class TransposedConv2x(Function):
    """Stride-2 transposed convolution with a 2x2 kernel of shape (C_in, C_out, 2, 2)."""
    name = 'transposed_conv2x'

    def forward(self, x, kernel, bias):
        if x.ndim != 4 or kernel.ndim != 4 or kernel.shape[2:] != (2, 2) or kernel.shape[0] != x.shape[1]:
            raise ShapeError("transposed_conv2x: input %s with kernel %s" % (_describe(x.shape), _describe(kernel.shape)))
        if bias.shape != (kernel.shape[1],):
            raise ShapeError("transposed_conv2x: bias %s for kernel %s" % (_describe(bias.shape), _describe(kernel.shape)))
        n, _, h, w = x.shape
        self.saved['x'], self.saved['kernel'] = x, kernel
        out = np.einsum('nchw,coij->nohiwj', x, kernel, optimize=True)
        return out.reshape(n, kernel.shape[1], 2 * h, 2 * w) + bias[None, :, None, None]

    def backward(self, grad):
        x, kernel = self.saved['x'], self.saved['kernel']
        n, _, h, w = x.shape
        g6 = grad.reshape(n, kernel.shape[1], h, 2, w, 2)
        d_x = np.einsum('nohiwj,coij->nchw', g6, kernel, optimize=True)
        d_kernel = np.einsum('nohiwj,nchw->coij', g6, x, optimize=True)
        return d_x, d_kernel, grad.sum(axis=(0, 2, 3))


def upsample_matrix(n, dtype=np.float64):
    """Interpolation matrix (2n x n) of align-corners-false bilinear doubling."""
    m = np.zeros((2 * n, n), dtype=dtype)
    for out in range(2 * n):
        src = max((out + 0.5) / 2.0 - 0.5, 0.0)
        lo = int(math.floor(src))
        hi = min(lo + 1, n - 1)
        frac = src - lo
        m[out, lo] += 1.0 - frac
        m[out, hi] += frac
    return m


class BilinearUpsample2x(Function):
    name = 'bilinear_upsample2x'

    def forward(self, x):
        if x.ndim != 4 or x.shape[2] < 1 or x.shape[3] < 1:
            raise ShapeError("bilinear_upsample2x needs (N,C,H,W), got %s" % _describe(x.shape))
        uh = upsample_matrix(x.shape[2], x.dtype)
        uw = upsample_matrix(x.shape[3], x.dtype)
        self.saved['uh'], self.saved['uw'] = uh, uw
        return np.matmul(np.matmul(uh, x), uw.T)

    def backward(self, grad):
        uh, uw = self.saved['uh'], self.saved['uw']
        return (np.matmul(uh.T, np.matmul(grad, uw)),)


# =============================================================================
# == Functional layer
# =============================================================================

def _batched(x):
    if x.ndim == 3:
        return x.reshape((1,) + x.shape), True
    if x.ndim == 4:
        return x, False
    raise ShapeError("expected (C,H,W) or (N,C,H,W), got %s" % _describe(x.shape))


def _unbatched(y, squeeze):
    if squeeze:
        return y.reshape(y.shape[1:])
    return y


def conv2d(x, kernel, bias, stride=1, padding=0, groups=1):
    """Cross-correlation; output size floor((H + 2p - kH) / stride) + 1."""
    xb, squeeze = _batched(x)
    y = Conv2d.apply(xb, kernel, bias, stride=stride, padding=padding, groups=groups)
    return _unbatched(y, squeeze)


def transposed_conv2x(x, kernel, bias):
    xb, squeeze = _batched(x)
    return _unbatched(TransposedConv2x.apply(xb, kernel, bias), squeeze)


def bilinear_upsample2x(x):
    xb, squeeze = _batched(x)
    return _unbatched(BilinearUpsample2x.apply(xb), squeeze)


def linear(x, weight, bias):
    return Linear.apply(x, weight, bias)


def layernorm(x, gamma, beta, eps=1e-6):
    return LayerNorm.apply(x, gamma, beta, eps=eps)


def channel_layernorm(x, gamma, beta, eps=1e-6):
    """Layer norm over the channel axis of an (N, C, H, W) tensor."""
    y = LayerNorm.apply(x.transpose(0, 2, 3, 1), gamma, beta, eps=eps)
    return y.transpose(0, 3, 1, 2)


def gelu(x):
    return Gelu.apply(x)


def softmax(x):
    return Softmax.apply(x)


def concat(tensors, axis=0):
    return Concat.apply(*tensors, axis=axis)


def roll(x, shift, axis):
    return Roll.apply(x, shift=tuple(shift), axis=tuple(axis))


def attention(q, k, v, mask=None):
    """softmax(q k^T / sqrt(D) + mask) v over the last two axes.

    `mask` is a constant array broadcastable to the logits, typically zeros
    and large negatives.
    """
    if q.shape != k.shape or q.shape != v.shape:
        raise ShapeError("attention needs matching q, k, v, got %s, %s, %s" % (
            _describe(q.shape), _describe(k.shape), _describe(v.shape)))
    axes = tuple(range(q.ndim - 2)) + (q.ndim - 1, q.ndim - 2)
    logits = MatMul.apply(q, k.transpose(axes)) * (1.0 / math.sqrt(q.shape[-1]))
    if mask is not None:
        logits = AddConst.apply(logits, value=np.broadcast_to(mask, logits.shape).astype(logits.dtype))
    return MatMul.apply(softmax(logits), v)


WindowLayout = namedtuple('WindowLayout', ['batch', 'channels', 'height', 'width', 'window', 'batched'])


def window_partition(x, win):
    """Splits (C,H,W) or (N,C,H,W) into windows of shape (C, win, win).

    Windows are stacked along a leading axis in row-major window order
    (batch, window row, window column). Returns the stacked windows and the
    layout needed by `window_merge`.
    """
    xb, squeeze = _batched(x)
    n, c, h, w = xb.shape
    if win < 1 or h % win or w % win:
        raise ShapeError("window %d does not divide spatial size %dx%d" % (win, h, w))
    nh, nw = h // win, w // win
    y = xb.reshape(n, c, nh, win, nw, win).transpose(0, 2, 4, 1, 3, 5)
    windows = y.reshape(n * nh * nw, c, win, win)
    return windows, WindowLayout(n, c, h, w, win, not squeeze)


def window_merge(windows, layout):
    n, c, h, w, win = layout.batch, layout.channels, layout.height, layout.width, layout.window
    y = windows.reshape(n, h // win, w // win, c, win, win).transpose(0, 3, 1, 4, 2, 5)
    y = y.reshape(n, c, h, w)
    if not layout.batched:
        return y.reshape(c, h, w)
    return y
