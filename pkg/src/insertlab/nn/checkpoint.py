"""Flat binary parameter container.

Layout (little-endian): magic b"NNC1", version u32, count u32, then per
parameter: name length u16, name bytes (utf-8), rank u8, dims u32 each,
raw float32 payload.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import ConfigurationError
from .layers import ParameterSet

MAGIC = b"NNC1"
VERSION = 1


def save_params(path, params) -> None:
    arrays = params.state_arrays() if isinstance(params, ParameterSet) else dict(params)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(arrays)))
        for name, arr in arrays.items():
            arr = np.asarray(arr, dtype=np.float32)
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<B", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(arr.tobytes(order="C"))


def load_params(path) -> dict[str, np.ndarray]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ConfigurationError(f"{path}: bad magic {magic!r}")
        version, count = struct.unpack("<II", fh.read(8))
        if version != VERSION:
            raise ConfigurationError(f"{path}: unsupported version {version}")
        arrays: dict[str, np.ndarray] = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<H", fh.read(2))
            name = fh.read(name_len).decode("utf-8")
            (rank,) = struct.unpack("<B", fh.read(1))
            dims = struct.unpack(f"<{rank}I", fh.read(4 * rank)) if rank else ()
            n_items = int(np.prod(dims)) if dims else 1
            payload = fh.read(4 * n_items)
            arr = np.frombuffer(payload, dtype="<f4").reshape(dims).astype(np.float32)
            arrays[name] = arr
    return arrays
