"""Dense tensors with reverse-mode automatic differentiation.

A `Tensor` wraps a numpy array. Every primitive is a `Function` subclass whose
`apply` runs the forward pass on raw arrays and, when any input requires a
gradient, links the result back to the function so that `backward` can walk
the recorded computation in reverse topological order.
"""
from collections import namedtuple
import logging

import numpy as np


logger = logging.getLogger(__name__)


class ShapeError(ValueError):
    """Raised for any shape mismatch between tensors or parameters."""


def _describe(shape):
    return "(%s)" % ",".join(str(d) for d in shape)


class Function(object):
    """Base class for differentiable primitives.

    Subclasses implement `forward(*arrays, **kwargs) -> array` and
    `backward(grad) -> tuple` returning one gradient (or None) per input.
    Anything the backward pass needs is kept in `self.saved`.
    """
    name = 'function'

    def __init__(self, *inputs):
        self.inputs = inputs
        self.saved = {}

    def forward(self, *arrays, **kwargs):
        raise NotImplementedError("%s has no forward pass" % type(self).__name__)

    def backward(self, grad):
        raise NotImplementedError("%s has no backward pass" % type(self).__name__)

    @classmethod
    def apply(cls, *inputs, **kwargs):
        for t in inputs:
            if not isinstance(t, Tensor):
                raise TypeError("%s expects Tensor inputs, got %s" % (cls.name, type(t).__name__))
        fn = cls(*inputs)
        data = fn.forward(*(t.data for t in inputs), **kwargs)
        out = Tensor(data)
        if any(t.requires_grad for t in inputs):
            out.requires_grad = True
            out.creator = fn
        return out


class Tensor(object):
    """An n-dimensional array that can take part in automatic differentiation."""

    def __init__(self, data, requires_grad=False, dtype=None):
        array = np.asarray(data, dtype=dtype)
        if array.dtype.kind != 'f':
            array = array.astype(np.float64)
        self.data = array
        self.requires_grad = requires_grad
        self.grad = None
        self.creator = None

    # -- introspection -------------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self):
        return self.data.size

    @property
    def is_leaf(self):
        return self.creator is None

    def numpy(self):
        return self.data

    def item(self):
        if self.data.size != 1:
            raise ShapeError("item() needs a single-element tensor, got %s" % _describe(self.shape))
        return float(self.data.reshape(()))

    def detach(self):
        return Tensor(self.data)

    def zero_grad(self):
        self.grad = None

    def backward(self):
        backward(self)

    def __repr__(self):
        flag = ", requires_grad=True" if self.requires_grad else ""
        return "Tensor(shape=%s, dtype=%s%s)" % (_describe(self.shape), self.dtype, flag)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        from . import ops
        if isinstance(other, Tensor):
            return ops.Add.apply(self, other)
        return ops.AddConst.apply(self, value=other)

    __radd__ = __add__

    def __sub__(self, other):
        from . import ops
        if isinstance(other, Tensor):
            return ops.Sub.apply(self, other)
        return ops.AddConst.apply(self, value=-other)

    def __rsub__(self, other):
        from . import ops
        return ops.AddConst.apply(ops.MulConst.apply(self, value=-1.0), value=other)

    def __mul__(self, other):
        from . import ops
        if isinstance(other, Tensor):
            return ops.Mul.apply(self, other)
        return ops.MulConst.apply(self, value=other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        from . import ops
        if isinstance(other, Tensor):
            return ops.Div.apply(self, other)
        return ops.MulConst.apply(self, value=1.0 / other)

    def __neg__(self):
        from . import ops
        return ops.MulConst.apply(self, value=-1.0)

    def __matmul__(self, other):
        from . import ops
        return ops.MatMul.apply(self, other)

    def abs(self):
        from . import ops
        return ops.Abs.apply(self)

    def square(self):
        from . import ops
        return ops.Square.apply(self)

    def sum(self, axis=None):
        from . import ops
        return ops.Sum.apply(self, axis=axis)

    def mean(self, axis=None):
        from . import ops
        return ops.Mean.apply(self, axis=axis)

    def reshape(self, *shape):
        from . import ops
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ops.Reshape.apply(self, shape=shape)

    def transpose(self, *axes):
        from . import ops
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return ops.Transpose.apply(self, axes=axes)


# A node of the traced computation: its position, the primitive that made
# it ('leaf' for inputs and parameters), and the positions of its inputs.
GraphNode = namedtuple('GraphNode', ['index', 'tensor', 'primitive', 'inputs'])


class Graph(object):
    """Topologically ordered record of the computation behind some outputs."""

    def __init__(self, nodes, outputs):
        self.nodes = nodes
        self.outputs = outputs

    @classmethod
    def trace(cls, *outputs):
        order = []
        index = {}
        for root in outputs:
            if id(root) in index:
                continue
            # Iterative post-order walk; deep conv stacks overflow recursion.
            stack = [(root, False)]
            while stack:
                tensor, expanded = stack.pop()
                if id(tensor) in index:
                    continue
                parents = tensor.creator.inputs if tensor.creator is not None else ()
                if expanded:
                    index[id(tensor)] = len(order)
                    order.append(tensor)
                    continue
                stack.append((tensor, True))
                for parent in parents:
                    if id(parent) not in index and parent.requires_grad:
                        stack.append((parent, False))
        nodes = []
        for i, tensor in enumerate(order):
            if tensor.creator is None:
                nodes.append(GraphNode(i, tensor, 'leaf', ()))
            else:
                inputs = tuple(index[id(p)] for p in tensor.creator.inputs if id(p) in index)
                nodes.append(GraphNode(i, tensor, tensor.creator.name, inputs))
        return cls(nodes, [index[id(o)] for o in outputs])

    def validate(self):
        """Checks that every input precedes its consumer."""
        for node in self.nodes:
            for parent in node.inputs:
                if parent >= node.index:
                    raise ValueError("Graph node %d (%s) consumes later node %d" % (node.index, node.primitive, parent))
        return True

    def leaves(self):
        return [n.tensor for n in self.nodes if n.primitive == 'leaf']

    def __len__(self):
        return len(self.nodes)


def backward(loss, graph=None):
    """Populates `.grad` on every requires_grad leaf reachable from `loss`.

    Leaves that do not require gradients (frozen parameters, data) are never
    touched. Gradients accumulate into existing `.grad` arrays.
    """
    if loss.data.shape != () and loss.data.size != 1:
        raise ShapeError("backward needs a scalar loss, got shape %s" % _describe(loss.shape))
    if not loss.requires_grad:
        logger.debug("backward called on a loss without gradient history")
        return graph
    if graph is None:
        graph = Graph.trace(loss)
    grads = {id(loss): np.ones_like(loss.data)}
    for node in reversed(graph.nodes):
        tensor = node.tensor
        grad = grads.pop(id(tensor), None)
        if grad is None:
            continue
        if tensor.creator is None:
            if tensor.requires_grad:
                tensor.grad = grad.copy() if tensor.grad is None else tensor.grad + grad
            continue
        input_grads = tensor.creator.backward(grad)
        for parent, parent_grad in zip(tensor.creator.inputs, input_grads):
            if parent_grad is None or not parent.requires_grad:
                continue
            if parent_grad.shape != parent.shape:
                raise ShapeError("%s produced gradient %s for input %s" % (
                    tensor.creator.name, _describe(parent_grad.shape), _describe(parent.shape)))
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + parent_grad
            else:
                grads[key] = parent_grad
    return graph


def trunc_normal(rng, shape, std=0.02, dtype=np.float32):
    """Samples a normal(0, std) array truncated at two standard deviations."""
    values = rng.standard_normal(shape)
    outside = np.abs(values) > 2.0
    while outside.any():
        values[outside] = rng.standard_normal(int(outside.sum()))
        outside = np.abs(values) > 2.0
    return (values * std).astype(dtype)
