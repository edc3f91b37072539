"""Binary index container.

Layout (little-endian throughout)::

    "CTIX"  u32 version  u32 n_tags  { u16 len, utf-8 tag }*
    u32 n_sections  { u16 len, utf-8 name, u64 offset, u64 length, u64 fnv1a64 }*
    payload

Nested state dicts are flattened to "/"-joined keys. Every ndarray becomes its
own section (u8 dtype-len, dtype str, u8 ndim, u64 shape..., raw data); all
scalars go into one JSON section named "meta".
"""
from __future__ import annotations

import io
import json
import struct
from pathlib import Path

import numpy as np

from ._bits import fnv1a64_bytes
from .index import CategoricalIndex

MAGIC = b"CTIX"
VERSION = 1


class ContainerError(ValueError):
    pass


def _flatten(state, prefix="", arrays=None, scalars=None):
    if arrays is None:
        arrays, scalars = {}, {}
    for key, val in state.items():
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            _flatten(val, name + "/", arrays, scalars)
        elif isinstance(val, np.ndarray):
            arrays[name] = val
        elif isinstance(val, (np.integer, np.floating, np.bool_)):
            scalars[name] = val.item()
        else:
            scalars[name] = val
    return arrays, scalars


def _unflatten(flat: dict) -> dict:
    root: dict = {}
    for name, val in flat.items():
        node = root
        *parts, last = name.split("/")
        for p in parts:
            node = node.setdefault(p, {})
        node[last] = val
    return root


def _encode_array(arr: np.ndarray) -> bytes:
    arr = np.ascontiguousarray(arr)
    arr = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
    code = arr.dtype.str.encode()
    head = struct.pack("<B", len(code)) + code + struct.pack("<B", arr.ndim)
    head += struct.pack(f"<{arr.ndim}Q", *arr.shape)
    return head + arr.tobytes()


def _decode_array(buf: bytes) -> np.ndarray:
    k = buf[0]
    dtype = np.dtype(buf[1 : 1 + k].decode())
    pos = 1 + k
    ndim = buf[pos]
    pos += 1
    shape = struct.unpack_from(f"<{ndim}Q", buf, pos)
    pos += 8 * ndim
    count = int(np.prod(shape)) if ndim else 1
    if len(buf) - pos != count * dtype.itemsize:
        raise ContainerError("array section has the wrong length")
    return np.frombuffer(buf, dtype=dtype, count=count, offset=pos).reshape(shape).copy()


def dumps(idx: CategoricalIndex) -> bytes:
    arrays, scalars = _flatten(idx.state())
    sections = [("meta", json.dumps(scalars, sort_keys=True).encode())]
    sections += [(name, _encode_array(arr)) for name, arr in arrays.items()]

    head = io.BytesIO()
    head.write(MAGIC)
    tags = list(idx.engines)
    head.write(struct.pack("<II", VERSION, len(tags)))
    for tag in tags:
        raw = tag.encode()
        head.write(struct.pack("<H", len(raw)) + raw)
    head.write(struct.pack("<I", len(sections)))
    table_size = sum(2 + len(n.encode()) + 24 for n, _ in sections)
    offset = head.tell() + table_size
    for name, payload in sections:
        raw = name.encode()
        head.write(struct.pack("<H", len(raw)) + raw)
        head.write(struct.pack("<QQQ", offset, len(payload), fnv1a64_bytes(payload)))
        offset += len(payload)
    return head.getvalue() + b"".join(p for _, p in sections)


def loads(data: bytes) -> CategoricalIndex:
    try:
        return _loads(memoryview(data).tobytes())
    except ContainerError:
        raise
    except (struct.error, KeyError, ValueError, TypeError, IndexError, UnicodeDecodeError) as exc:
        raise ContainerError(f"malformed index: {exc}") from exc


def _loads(data: bytes) -> CategoricalIndex:
    if data[:4] != MAGIC:
        raise ContainerError("not an index file (bad magic)")
    version, n_tags = struct.unpack_from("<II", data, 4)
    if version != VERSION:
        raise ContainerError(f"unsupported format version {version}")
    pos = 12
    for _ in range(n_tags):
        (k,) = struct.unpack_from("<H", data, pos)
        pos += 2 + k
    (n_sections,) = struct.unpack_from("<I", data, pos)
    pos += 4
    flat = {}
    scalars = None
    for _ in range(n_sections):
        (k,) = struct.unpack_from("<H", data, pos)
        name = data[pos + 2 : pos + 2 + k].decode()
        pos += 2 + k
        off, length, checksum = struct.unpack_from("<QQQ", data, pos)
        pos += 24
        payload = data[off : off + length]
        if len(payload) != length:
            raise ContainerError(f"section {name!r} is truncated")
        if fnv1a64_bytes(payload) != checksum:
            raise ContainerError(f"checksum mismatch in section {name!r}")
        if name == "meta":
            scalars = json.loads(payload.decode())
        else:
            flat[name] = _decode_array(payload)
    if scalars is None:
        raise ContainerError("missing meta section")
    flat.update(scalars)
    return CategoricalIndex.from_state(_unflatten(flat))


def engine_tags(data: bytes) -> list[str]:
    if data[:4] != MAGIC:
        raise ContainerError("not an index file (bad magic)")
    _, n_tags = struct.unpack_from("<II", data, 4)
    pos, tags = 12, []
    for _ in range(n_tags):
        (k,) = struct.unpack_from("<H", data, pos)
        tags.append(data[pos + 2 : pos + 2 + k].decode())
        pos += 2 + k
    return tags


def save(idx: CategoricalIndex, path) -> int:
    data = dumps(idx)
    Path(path).write_bytes(data)
    return len(data)


def load(path) -> CategoricalIndex:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ContainerError(f"cannot read {path}: {exc}") from exc
    return loads(data)
