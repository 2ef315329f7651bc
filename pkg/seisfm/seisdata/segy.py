"""SEG-Y rev 1 subset: big-endian headers, IBM (format 1) or IEEE (format 5) samples.

Traces are grouped into gathers by their ensemble number (trace header
bytes 21-24) in order of first appearance.
"""
from collections import OrderedDict
from dataclasses import dataclass, field
import logging
import os
import struct

import numpy as np

from .errors import SegyError
from .gather import Gather


logger = logging.getLogger(__name__)


TEXT_HEADER_SIZE = 3200
BINARY_HEADER_SIZE = 400
TRACE_HEADER_SIZE = 240
IBM_FLOAT = 1
IEEE_FLOAT = 5
FORMATS = {IBM_FLOAT: "4-byte IBM floating point", IEEE_FLOAT: "4-byte IEEE floating point"}

# Byte offsets inside the binary header
BIN_INTERVAL = 16
BIN_SAMPLES = 20
BIN_FORMAT = 24
BIN_REVISION = 300
BIN_FIXED_LENGTH = 302
BIN_EXTENDED_HEADERS = 304

# Byte offsets inside a trace header
TR_SEQUENCE = 0
TR_ENSEMBLE = 20
TR_ENSEMBLE_TRACE = 24
TR_OFFSET = 36
TR_SAMPLES = 114
TR_INTERVAL = 116


def ibm_to_ieee(words):
    """Decodes big-endian IBM System/360 single-precision words (as uint32) to float64."""
    words = np.asarray(words, dtype=np.uint32).astype(np.int64)
    sign = (words >> 31) & 0x01
    exponent = ((words >> 24) & 0x7f) - 64
    mantissa = (words & 0x00ffffff) / float(1 << 24)
    return (1 - 2 * sign) * mantissa * np.power(16.0, exponent)


def ieee_to_ibm(values):
    """Encodes floats as IBM words (uint32), rounding the 24-bit hex fraction."""
    values = np.asarray(values, dtype=np.float64)
    sign = (values < 0).astype(np.int64)
    magnitude = np.abs(values)
    _, e = np.frexp(magnitude)
    exponent = -((-e) // 4)
    mantissa = np.round(magnitude / np.power(16.0, exponent) * (1 << 24)).astype(np.int64)
    carry = mantissa >= (1 << 24)
    mantissa = np.where(carry, mantissa >> 4, mantissa)
    exponent = np.clip(exponent + carry + 64, 0, 127)
    words = (sign << 31) | (exponent << 24) | mantissa
    return np.where(magnitude == 0, 0, words).astype(np.uint32)


@dataclass
class SegyEnsemble:
    number: int
    gather: Gather
    trace_headers: list = field(default_factory=list)


@dataclass
class SegyFile:
    text_header: str
    dt: float
    format_code: int
    samples_per_trace: int
    ensembles: list = field(default_factory=list)

    @property
    def gathers(self):
        return [e.gather for e in self.ensembles]

    @property
    def trace_count(self):
        return sum(e.gather.shape[1] for e in self.ensembles)


def _decode_text(raw):
    # Rev 1 text headers are EBCDIC; older files are often ASCII.
    if raw[:1] == b'C':
        return raw.decode('ascii', errors='replace')
    return raw.decode('cp500', errors='replace')


def parse_segy(payload, trace_spacing=1.0):
    size = len(payload)
    if size < TEXT_HEADER_SIZE + BINARY_HEADER_SIZE:
        raise SegyError("File of %d bytes is shorter than the 3600-byte file headers" % size, size)
    text = _decode_text(payload[:TEXT_HEADER_SIZE])
    binary = payload[TEXT_HEADER_SIZE:TEXT_HEADER_SIZE + BINARY_HEADER_SIZE]
    (interval,) = struct.unpack_from('>H', binary, BIN_INTERVAL)
    (samples,) = struct.unpack_from('>H', binary, BIN_SAMPLES)
    (code,) = struct.unpack_from('>h', binary, BIN_FORMAT)
    (extended,) = struct.unpack_from('>h', binary, BIN_EXTENDED_HEADERS)
    if code not in FORMATS:
        raise SegyError("Unsupported sample format code %d (supported: %s)" % (
            code, ", ".join("%d %s" % kv for kv in sorted(FORMATS.items()))), TEXT_HEADER_SIZE + BIN_FORMAT)
    if extended < 0:
        raise SegyError("Negative extended header count %d" % extended, TEXT_HEADER_SIZE + BIN_EXTENDED_HEADERS)

    position = TEXT_HEADER_SIZE + BINARY_HEADER_SIZE + extended * TEXT_HEADER_SIZE
    columns = OrderedDict()
    headers = OrderedDict()
    while position < size:
        if position + TRACE_HEADER_SIZE > size:
            raise SegyError("Truncated trace header", position)
        sequence, ensemble, ensemble_trace = struct.unpack_from('>i16xii', payload, position)
        (offset,) = struct.unpack_from('>i', payload, position + TR_OFFSET)
        (count,) = struct.unpack_from('>H', payload, position + TR_SAMPLES)
        if count == 0:
            count = samples
        if count != samples:
            raise SegyError("Trace %d has %d samples but the file declares %d" % (sequence, count, samples),
                            position + TR_SAMPLES)
        data_start = position + TRACE_HEADER_SIZE
        if data_start + 4 * count > size:
            raise SegyError("Truncated trace %d: needs %d data bytes, %d left" % (
                sequence, 4 * count, size - data_start), position)
        if code == IEEE_FLOAT:
            trace = np.frombuffer(payload, dtype='>f4', count=count, offset=data_start).astype(np.float32)
        else:
            trace = ibm_to_ieee(np.frombuffer(payload, dtype='>u4', count=count, offset=data_start))
        columns.setdefault(ensemble, []).append(trace)
        headers.setdefault(ensemble, []).append({'sequence': sequence, 'ensemble': ensemble,
                                                 'ensemble_trace': ensemble_trace, 'offset': offset})
        position = data_start + 4 * count

    dt = interval * 1e-6
    ensembles = [SegyEnsemble(number, Gather(np.stack(traces, axis=1), dt, trace_spacing), headers[number])
                 for number, traces in columns.items()]
    return SegyFile(text, dt, code, samples, ensembles)


def read_segy(path, trace_spacing=1.0):
    """Reads a SEG-Y file into one Gather per ensemble."""
    with open(path, 'rb') as f:
        payload = f.read()
    segy = parse_segy(payload, trace_spacing)
    logger.info("Read %d traces in %d ensembles (%s) from %s", segy.trace_count, len(segy.ensembles),
                FORMATS[segy.format_code], path)
    return segy


def _text_header(description):
    lines = ["C%2d %s" % (i + 1, description if i == 0 else "") for i in range(40)]
    return "".join(line[:80].ljust(80) for line in lines).encode('cp500')


def encode_segy(gathers, dt, format_code=IEEE_FLOAT, description="seisfm gathers"):
    if format_code not in FORMATS:
        raise SegyError("Unsupported sample format code %d" % format_code)
    heights = {g.shape[0] for g in gathers}
    if len(heights) > 1:
        raise SegyError("All gathers must share the number of samples, got %s" % sorted(heights))
    samples = heights.pop() if heights else 0
    interval = int(round(dt * 1e6))

    binary = bytearray(BINARY_HEADER_SIZE)
    struct.pack_into('>H', binary, BIN_INTERVAL, interval)
    struct.pack_into('>H', binary, BIN_SAMPLES, samples)
    struct.pack_into('>h', binary, BIN_FORMAT, format_code)
    struct.pack_into('>HHh', binary, BIN_REVISION, 0x0100, 1, 0)
    chunks = [_text_header(description), bytes(binary)]

    sequence = 0
    for number, gather in enumerate(gathers, start=1):
        for j in range(gather.shape[1]):
            sequence += 1
            header = bytearray(TRACE_HEADER_SIZE)
            struct.pack_into('>i16xii', header, TR_SEQUENCE, sequence, number, j + 1)
            struct.pack_into('>i', header, TR_OFFSET, int(round(j * gather.trace_spacing)))
            struct.pack_into('>HH', header, TR_SAMPLES, samples, interval)
            trace = gather.samples[:, j]
            if format_code == IEEE_FLOAT:
                data = np.asarray(trace, dtype='>f4').tobytes()
            else:
                data = ieee_to_ibm(trace).astype('>u4').tobytes()
            chunks.extend([bytes(header), data])
    return b''.join(chunks)


def write_segy(path, gathers, dt, format_code=IEEE_FLOAT, description="seisfm gathers"):
    """Writes gathers as consecutive ensembles numbered from 1."""
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    payload = encode_segy(gathers, dt, format_code, description)
    with open(path, 'wb') as f:
        f.write(payload)
    return len(payload)
