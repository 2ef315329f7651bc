"""The native gather file.

Little-endian layout::

    b"SGTH" | version u8 (1) | dtype u8 (0 float32, 1 float64) | H u32 | W u32
    | H*W samples, row-major | dt f32 | trace_spacing f32

A header of 14 bytes and a trailer of 8, so a 64x512 float32 gather takes
22 + 64 * 512 * 4 bytes.
"""
import os
import struct

import numpy as np

from .errors import GatherFormatError
from .gather import Gather


MAGIC = b'SGTH'
VERSION = 1
DTYPES = {0: np.dtype('<f4'), 1: np.dtype('<f8')}
DTYPE_CODES = {np.dtype(np.float32): 0, np.dtype(np.float64): 1}
HEADER = struct.Struct('<4sBBII')
TRAILER = struct.Struct('<ff')


def encode_gather(gather):
    samples = gather.samples
    if samples.dtype not in DTYPE_CODES:
        samples = samples.astype(np.float64)
    code = DTYPE_CODES[samples.dtype]
    h, w = samples.shape
    return b''.join([
        HEADER.pack(MAGIC, VERSION, code, h, w),
        np.ascontiguousarray(samples, dtype=DTYPES[code]).tobytes(),
        TRAILER.pack(gather.dt, gather.trace_spacing),
    ])


def decode_gather(payload):
    if len(payload) < HEADER.size:
        raise GatherFormatError("Gather file is shorter than its %d-byte header" % HEADER.size)
    magic, version, code, h, w = HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise GatherFormatError("Not a gather file (magic %r)" % magic)
    if version != VERSION:
        raise GatherFormatError("Unsupported gather file version %d" % version)
    if code not in DTYPES:
        raise GatherFormatError("Unknown sample type code %d" % code)
    dtype = DTYPES[code]
    expected = HEADER.size + h * w * dtype.itemsize + TRAILER.size
    if len(payload) != expected:
        raise GatherFormatError("Gather file of %dx%d needs %d bytes, got %d" % (h, w, expected, len(payload)))
    end = HEADER.size + h * w * dtype.itemsize
    samples = np.frombuffer(payload, dtype=dtype, count=h * w, offset=HEADER.size).reshape(h, w)
    dt, spacing = TRAILER.unpack_from(payload, end)
    return Gather(samples.astype(dtype.newbyteorder('=')), dt, spacing)


def write_gather(path, gather):
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    payload = encode_gather(gather)
    with open(path, 'wb') as f:
        f.write(payload)
    return len(payload)


def read_gather(path):
    with open(path, 'rb') as f:
        return decode_gather(f.read())
