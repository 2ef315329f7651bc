"""Binary checkpoints of a ParameterStore.

Layout (little-endian)::

    b"SPCK" | version u8 | count u32
    per tensor: name length u32 | name utf-8 | partition u8 | trainable u8
                | rank u8 | dims u32 * rank | float32 data (row-major)

Partition codes are 0 for the encoder and 1 for the decoder. A partition's
trainable flag is taken from its first tensor on load.
"""
import logging
import os
import struct

import numpy as np

from seisfm.exceptions import ConfigurationError

from .errors import CheckpointError
from .store import DECODER, ENCODER, ParameterStore


logger = logging.getLogger(__name__)


MAGIC = b'SPCK'
VERSION = 1
PARTITION_CODES = {ENCODER: 0, DECODER: 1}
PARTITION_NAMES = {code: name for name, code in PARTITION_CODES.items()}


def encode_checkpoint(store, partition=None):
    names = store.names(partition)
    chunks = [MAGIC, struct.pack('<BI', VERSION, len(names))]
    for name in names:
        tensor = store[name]
        part = store.partition_of(name)
        raw = name.encode('utf-8')
        chunks.append(struct.pack('<I', len(raw)))
        chunks.append(raw)
        chunks.append(struct.pack('<BBB', PARTITION_CODES[part], int(store.is_trainable(part)), tensor.ndim))
        chunks.append(struct.pack('<%dI' % tensor.ndim, *tensor.shape))
        chunks.append(np.ascontiguousarray(tensor.data, dtype='<f4').tobytes())
    return b''.join(chunks)


def save_checkpoint(store, path, partition=None):
    """Writes `store` (or one partition of it) to `path`; returns the byte size.

    Data is stored as float32, so float64 stores round-trip only to float32
    precision.
    """
    payload = encode_checkpoint(store, partition)
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'wb') as f:
        f.write(payload)
    logger.info("Saved %d tensors (%s) to %s", len(store.names(partition)), partition or 'all partitions', path)
    return len(payload)


class _Reader(object):

    def __init__(self, payload):
        self.payload = payload
        self.offset = 0

    def take(self, size, what):
        end = self.offset + size
        if size < 0 or end > len(self.payload):
            raise CheckpointError("Truncated checkpoint while reading %s: need %d bytes, %d left" % (
                what, size, len(self.payload) - self.offset), self.offset)
        chunk = self.payload[self.offset:end]
        self.offset = end
        return chunk

    def unpack(self, fmt, what):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def decode_checkpoint(payload, dtype=np.float32):
    """Parses checkpoint bytes into a new ParameterStore of `dtype`."""
    reader = _Reader(payload)
    if reader.take(4, "magic") != MAGIC:
        raise CheckpointError("Not a checkpoint (bad magic)", 0)
    version, count = reader.unpack('<BI', "header")
    if version != VERSION:
        raise CheckpointError("Unsupported checkpoint version %d" % version, 4)

    store = ParameterStore(dtype)
    flags = {}
    for i in range(count):
        start = reader.offset
        (length,) = reader.unpack('<I', "name length of tensor %d" % i)
        if length > len(payload) - reader.offset:
            raise CheckpointError("Name length %d of tensor %d exceeds the file" % (length, i), start)
        try:
            name = reader.take(length, "name").decode('utf-8')
        except UnicodeDecodeError:
            raise CheckpointError("Tensor %d has a name that is not UTF-8" % i, start + 4)
        code, trainable, rank = reader.unpack('<BBB', "flags of %s" % name)
        if code not in PARTITION_NAMES:
            raise CheckpointError("Unknown partition code %d for %s" % (code, name), reader.offset - 3)
        shape = reader.unpack('<%dI' % rank, "shape of %s" % name)
        size = int(np.prod(shape, dtype=np.int64))
        data = np.frombuffer(reader.take(4 * size, "data of %s" % name), dtype='<f4').reshape(shape)
        partition = PARTITION_NAMES[code]
        try:
            store.add(name, data, partition)
        except ConfigurationError as e:
            raise CheckpointError(str(e), start)
        flags.setdefault(partition, bool(trainable))
    if reader.offset != len(payload):
        raise CheckpointError("%d trailing bytes after the last tensor" % (len(payload) - reader.offset), reader.offset)
    for partition, trainable in flags.items():
        store.set_trainable(partition, trainable)
    return store


def load_checkpoint(path, dtype=np.float32):
    with open(path, 'rb') as f:
        payload = f.read()
    store = decode_checkpoint(payload, dtype)
    logger.info("Loaded %d tensors from %s", len(store), path)
    return store


def restore_encoder(store, path):
    """Loads the encoder partition of the checkpoint at `path` into `store`.

    The decoder partition of `store` is left untouched. Name or shape
    differences raise ConfigurationError listing the offending names.
    """
    checkpoint = load_checkpoint(path, store.dtype)
    missing, unexpected, mismatched = store.diff(checkpoint, ENCODER)
    if missing or unexpected or mismatched:
        raise ConfigurationError(
            "Checkpoint %s does not fit the encoder: missing %s, unexpected %s, shape mismatch %s"
            % (path, missing, unexpected, mismatched))
    store.load_from(checkpoint, ENCODER)
    return store
