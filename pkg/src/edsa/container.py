"""Versioned parameter container: JSON manifest plus little-endian float32 blocks.

Layout::

    b"EDSA"  u32 version  u32 manifest_len  manifest (UTF-8 JSON)  blocks...

The manifest lists every block as ``{"name", "shape"}`` in file order.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"EDSA"
VERSION = 1
_F32 = np.dtype("<f4")


class ContainerError(ValueError):
    pass


def write(path: str | Path, manifest: dict, arrays: dict[str, np.ndarray]) -> None:
    blocks = [{"name": k, "shape": list(np.shape(v))} for k, v in arrays.items()]
    head = dict(manifest, blocks=blocks)
    raw = json.dumps(head, sort_keys=True, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(raw)))
        fh.write(raw)
        for v in arrays.values():
            fh.write(np.ascontiguousarray(v, dtype=_F32).tobytes())


def read(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    buf = Path(path).read_bytes()
    if buf[:4] != MAGIC:
        raise ContainerError(f"{path}: not a model container")
    version, n = struct.unpack_from("<II", buf, 4)
    if version != VERSION:
        raise ContainerError(f"{path}: unsupported container version {version}")
    offset = 12 + n
    manifest = json.loads(buf[12:offset].decode("utf-8"))
    arrays = {}
    for block in manifest["blocks"]:
        shape = tuple(block["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(buf, dtype=_F32, count=count, offset=offset).reshape(shape)
        arrays[block["name"]] = arr.astype(np.float64)
        offset += count * _F32.itemsize
    if offset != len(buf):
        raise ContainerError(f"{path}: {len(buf) - offset} trailing bytes")
    return manifest, arrays
