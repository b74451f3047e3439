"""Binary model container: magic, version, JSON header, raw tensor payload.

Layout: b"CPKT" | version u32 LE | header length u64 LE | header JSON |
tensor payloads in manifest order as row-major little-endian float32.
The header carries the variant, config, vocabulary and training state;
serialization is byte-deterministic (sorted JSON keys, fixed dtypes).
"""

from __future__ import annotations

import dataclasses
import json
import struct
from typing import Optional

import numpy as np

from .config import ModelConfig
from .errors import ModelFormatError
from .parser import ParserModel
from .vocab import Vocab

MAGIC = b"CPKT"
VERSION = 1


def save_model(path: str, model: ParserModel, state: Optional[dict] = None) -> None:
    header = {
        "variant": model.cfg.variant,
        "config": dataclasses.asdict(model.cfg),
        "vocab": model.vocab.to_dict(),
        "state": state or {},
        "tensors": [
            {"name": name, "shape": list(p.data.shape)} for name, p in model.params.items()
        ],
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for _, p in model.params.items():
            fh.write(np.ascontiguousarray(p.data, dtype="<f4").tobytes())


def load_model(path: str) -> tuple[ParserModel, dict]:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise ModelFormatError(f"cannot read model file {path}: {e}") from e
    if len(raw) < 16 or raw[:4] != MAGIC:
        raise ModelFormatError("not a model file (bad magic)")
    (version,) = struct.unpack("<I", raw[4:8])
    if version > VERSION:
        raise ModelFormatError(f"unsupported model format version {version}")
    (hlen,) = struct.unpack("<Q", raw[8:16])
    if 16 + hlen > len(raw):
        raise ModelFormatError("truncated header")
    try:
        header = json.loads(raw[16 : 16 + hlen].decode("utf-8"))
        cfg = ModelConfig(**header["config"])
        vocab = Vocab.from_dict(header["vocab"])
        manifest = header["tensors"]
    except (ValueError, KeyError, TypeError, AssertionError) as e:
        raise ModelFormatError(f"corrupt model header: {e}") from e
    model = ParserModel(cfg, vocab, seed=0)
    offset = 16 + hlen
    by_name = dict(model.params.items())
    if [m["name"] for m in manifest] != list(by_name.keys()):
        raise ModelFormatError("tensor manifest does not match the architecture")
    for m in manifest:
        p = by_name[m["name"]]
        shape = tuple(m["shape"])
        if shape != p.data.shape:
            raise ModelFormatError(
                f"shape mismatch for {m['name']}: file {shape} vs model {p.data.shape}"
            )
        nbytes = int(np.prod(shape, dtype=np.int64)) * 4 if shape else 4
        chunk = raw[offset : offset + nbytes]
        if len(chunk) != nbytes:
            raise ModelFormatError(f"truncated tensor payload at {m['name']}")
        p.data = np.frombuffer(chunk, dtype="<f4").reshape(shape).astype(np.float32)
        offset += nbytes
    if offset != len(raw):
        raise ModelFormatError("trailing bytes after tensor payload")
    return model, header.get("state", {})
