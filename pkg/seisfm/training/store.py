"""Named parameter tensors split into encoder and decoder partitions."""
from collections import OrderedDict
import hashlib
import logging

import numpy as np

from seisfm.exceptions import ConfigurationError
from tensorkit import Tensor


logger = logging.getLogger(__name__)


ENCODER = 'encoder'
DECODER = 'decoder'
PARTITIONS = (ENCODER, DECODER)


class ParameterStore(object):
    """Owns every learnable tensor of a model.

    Each tensor carries a partition tag. Trainability is a property of the
    partition: freezing a partition clears `requires_grad` on all of its
    tensors, so backward() never produces gradients for them.
    """

    def __init__(self, dtype=np.float32):
        self.dtype = np.dtype(dtype)
        self._tensors = OrderedDict()
        self._partition = {}
        self._trainable = {ENCODER: True, DECODER: True}

    def add(self, name, array, partition):
        if partition not in PARTITIONS:
            raise ConfigurationError("Unknown partition '%s' for parameter %s" % (partition, name))
        if name in self._tensors:
            raise ConfigurationError("Duplicate parameter name %s" % name)
        tensor = Tensor(np.array(array, dtype=self.dtype), requires_grad=self._trainable[partition])
        self._tensors[name] = tensor
        self._partition[name] = partition
        return tensor

    def __getitem__(self, name):
        return self._tensors[name]

    def __contains__(self, name):
        return name in self._tensors

    def __len__(self):
        return len(self._tensors)

    def __iter__(self):
        return iter(self._tensors)

    def partition_of(self, name):
        return self._partition[name]

    def names(self, partition=None):
        return [n for n in self._tensors if partition is None or self._partition[n] == partition]

    def items(self, partition=None):
        return [(n, self._tensors[n]) for n in self.names(partition)]

    def is_trainable(self, partition):
        return self._trainable[partition]

    def set_trainable(self, partition, trainable):
        if partition not in PARTITIONS:
            raise ConfigurationError("Unknown partition '%s'" % partition)
        self._trainable[partition] = bool(trainable)
        for _, tensor in self.items(partition):
            tensor.requires_grad = bool(trainable)
            tensor.grad = None
        logger.debug("Partition %s trainable=%s", partition, trainable)

    def count(self, partition=None):
        """Number of scalar parameters, optionally within one partition."""
        return int(sum(t.size for _, t in self.items(partition)))

    def zero_grad(self):
        for tensor in self._tensors.values():
            tensor.grad = None

    def digest(self, partition=None):
        """SHA-256 over names, shapes and raw bytes, in insertion order."""
        h = hashlib.sha256()
        for name, tensor in self.items(partition):
            h.update(name.encode('utf-8'))
            h.update(str(tensor.shape).encode('ascii'))
            h.update(np.ascontiguousarray(tensor.data).tobytes())
        return h.hexdigest()

    def snapshot(self, partition=None):
        return OrderedDict((n, t.data.copy()) for n, t in self.items(partition))

    def diff(self, other, partition=None):
        """Returns (missing, unexpected, mismatched) names of `other` against this store."""
        mine = set(self.names(partition))
        theirs = set(other.names(partition))
        mismatched = sorted(n for n in mine & theirs if self[n].shape != other[n].shape)
        return sorted(mine - theirs), sorted(theirs - mine), mismatched

    def load_from(self, other, partition=None):
        """Copies values of `other` into the matching tensors of this store.

        Names, partitions and shapes must agree exactly for the loaded
        partition(s); tensors of other partitions are left untouched.
        """
        missing, unexpected, mismatched = self.diff(other, partition)
        if missing or unexpected or mismatched:
            raise ConfigurationError(
                "Parameters do not match: missing %s, unexpected %s, shape mismatch %s"
                % (missing, unexpected, mismatched))
        for name, tensor in other.items(partition):
            if self._partition[name] != other.partition_of(name):
                raise ConfigurationError("Parameter %s changes partition on load" % name)
            self._tensors[name].data[...] = tensor.data.astype(self.dtype)

    def merge(self, other):
        """Adds copies of every tensor of `other`; names must not collide."""
        for name, tensor in other.items():
            self.add(name, tensor.data.copy(), other.partition_of(name))
            if not other.is_trainable(other.partition_of(name)):
                self._tensors[name].requires_grad = False

    def subset(self, partition):
        store = ParameterStore(self.dtype)
        for name, tensor in self.items(partition):
            store.add(name, tensor.data.copy(), partition)
        store.set_trainable(partition, self._trainable[partition])
        return store
