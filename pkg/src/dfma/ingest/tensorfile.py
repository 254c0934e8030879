"""``.dfma`` tensor files.

Layout, all little-endian::

    b"DFMA"              magic, 4 bytes
    uint16               version (= 1)
    uint8                rank
    uint32 * rank        dims
    float32 * prod(dims) payload, row-major
"""
from __future__ import annotations

import os
import struct

import numpy as np

from ..errors import FormatError, ShapeError

MAGIC = b"DFMA"
VERSION = 1
_HEAD = struct.Struct("<4sHB")
_MAX_PAYLOAD = 1 << 40  # bytes; guards against absurd dims in corrupt headers


def encode_tensor(array) -> bytes:
    a = np.asarray(array)
    if a.ndim > 255:
        raise ShapeError(f"rank {a.ndim} does not fit in one byte")
    if any(d >= 1 << 32 for d in a.shape):
        raise ShapeError(f"dimension too large for uint32: {a.shape}")
    head = _HEAD.pack(MAGIC, VERSION, a.ndim) + struct.pack(f"<{a.ndim}I", *a.shape)
    return head + np.ascontiguousarray(a, dtype="<f4").tobytes()


def decode_tensor(buf: bytes) -> np.ndarray:
    if len(buf) < _HEAD.size:
        raise FormatError("file too short for header")
    magic, version, rank = _HEAD.unpack_from(buf, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    off = _HEAD.size
    if len(buf) < off + 4 * rank:
        raise FormatError("truncated dimension table")
    dims = struct.unpack_from(f"<{rank}I", buf, off)
    off += 4 * rank
    count = 1
    for d in dims:
        count *= d
    nbytes = 4 * count
    if nbytes > _MAX_PAYLOAD:
        raise FormatError(f"dims {dims} overflow the payload limit")
    have = len(buf) - off
    if have < nbytes:
        raise FormatError(f"truncated payload: need {nbytes} bytes for dims {dims}, have {have}")
    if have > nbytes:
        raise FormatError(f"{have - nbytes} trailing bytes after payload")
    return np.frombuffer(buf, dtype="<f4", count=count, offset=off).reshape(dims).copy()


def write_tensor(array, path) -> None:
    """Write atomically: a partial file never appears under ``path``."""
    data = encode_tensor(array)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def read_tensor(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_tensor(fh.read())
