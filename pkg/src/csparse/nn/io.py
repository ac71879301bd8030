"""Versioned model container: JSON header + little-endian float64 payload.

Layout: 4-byte magic, uint32 header length, UTF-8 JSON header, then the
raw parameter payload in header order.  The header records the model
kind, its hyperparameters and every parameter's name and shape, so a
file is self-describing.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from ..errors import ModelError

MAGIC = b"CSNN"
FORMAT_VERSION = 1


def save_model(path, kind: str, hyper: dict, params: dict[str, np.ndarray]) -> None:
    entries = [{"name": name, "shape": list(arr.shape)} for name, arr in params.items()]
    header = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "hyper": hyper,
        "params": entries,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for arr in params.values():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_model(path, expect_kind: str | None = None) -> tuple[dict, dict[str, np.ndarray]]:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ModelError(f"cannot read model file {path}: {exc}") from None
    if raw[:4] != MAGIC:
        raise ModelError(f"{path}: not a model file (bad magic)")
    (hlen,) = struct.unpack("<I", raw[4:8])
    try:
        header = json.loads(raw[8 : 8 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelError(f"{path}: corrupt header: {exc}") from None
    if header.get("format_version") != FORMAT_VERSION:
        raise ModelError(
            f"{path}: unsupported format version {header.get('format_version')}"
        )
    if expect_kind is not None and header["kind"] != expect_kind:
        raise ModelError(
            f"{path}: model kind {header['kind']!r}, expected {expect_kind!r}"
        )
    params: dict[str, np.ndarray] = {}
    offset = 8 + hlen
    for entry in header["params"]:
        count = int(np.prod(entry["shape"])) if entry["shape"] else 1
        nbytes = 8 * count
        chunk = raw[offset : offset + nbytes]
        if len(chunk) != nbytes:
            raise ModelError(f"{path}: truncated payload at {entry['name']}")
        params[entry["name"]] = np.frombuffer(chunk, dtype="<f8").reshape(
            entry["shape"]
        ).astype(np.float64)
        offset += nbytes
    if offset != len(raw):
        raise ModelError(f"{path}: {len(raw) - offset} trailing bytes in payload")
    return header["hyper"], params
