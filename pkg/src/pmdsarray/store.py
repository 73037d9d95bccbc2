"""Shard files and byte <-> stripe ingestion.

Shard layout (little-endian)::

    magic "PMDA" | version u8 | spec sha256 (32) | group u16 | node u16 |
    ell u32 | symbol_width u8 | stripe_index u64 | ell symbols of symbol_width bytes
"""
from __future__ import annotations

import json
import os
import re
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .pmds import CodeInstance, StripeState

MAGIC = b"PMDA"
VERSION = 1
_HEADER = struct.Struct("<4sB32sHHIBQ")
HEADER_SIZE = _HEADER.size
TRAILER = struct.Struct("<Q")
MANIFEST = "manifest.json"
_NAME = re.compile(r"^g(\d+)_n(\d+)_s(\d+)\.shard$")


class StoreError(ValueError):
    pass


class CorruptHeader(StoreError):
    pass


class HashMismatch(CorruptHeader):
    pass


class ShortRead(StoreError):
    pass


class CorruptPayload(StoreError):
    pass


def symbol_width(q: int) -> int:
    return max(1, ((q - 1).bit_length() + 7) // 8)


def payload_bits(q: int) -> int:
    """floor(log2 q): every packed value is a valid field element."""
    return q.bit_length() - 1


def block_bytes(instance: CodeInstance) -> int:
    spec = instance.spec
    size = spec.k * spec.ell * payload_bits(spec.q) // 8
    if size < 1:
        raise StoreError("code too small to carry a whole byte per stripe")
    return size


@dataclass(frozen=True)
class ShardHeader:
    spec_hash: bytes
    group: int
    node: int
    ell: int
    symbol_width: int
    stripe_index: int
    magic: bytes = MAGIC
    version: int = VERSION

    def pack(self) -> bytes:
        return _HEADER.pack(self.magic, self.version, self.spec_hash, self.group, self.node,
                            self.ell, self.symbol_width, self.stripe_index)

    @classmethod
    def unpack(cls, raw: bytes) -> "ShardHeader":
        if len(raw) < HEADER_SIZE:
            raise ShortRead(f"header needs {HEADER_SIZE} bytes, got {len(raw)}")
        magic, version, digest, g, j, ell, width, idx = _HEADER.unpack(raw[:HEADER_SIZE])
        if magic != MAGIC:
            raise CorruptHeader(f"bad magic {magic!r}")
        if version != VERSION:
            raise CorruptHeader(f"unsupported version {version}")
        return cls(digest, g, j, ell, width, idx, magic, version)


# -- chunking ----------------------------------------------------------------------

def chunk(data: bytes, instance: CodeInstance) -> list[list[int]]:
    """Split bytes into info-symbol vectors; the stream ends with a u64 length."""
    size = block_bytes(instance)
    stream = bytes(data)
    pad = -(len(stream) + TRAILER.size) % size
    stream += b"\0" * pad + TRAILER.pack(len(data))
    bits = payload_bits(instance.spec.q)
    count = instance.spec.k * instance.spec.ell
    mask = (1 << bits) - 1
    out = []
    for off in range(0, len(stream), size):
        v = int.from_bytes(stream[off:off + size], "little")
        out.append([(v >> (bits * t)) & mask for t in range(count)])
    return out


def unchunk(blocks: Iterable[Sequence[int]], instance: CodeInstance) -> bytes:
    size = block_bytes(instance)
    bits = payload_bits(instance.spec.q)
    parts = []
    for syms in blocks:
        v = 0
        for t, x in enumerate(syms):
            if x >> bits:
                raise CorruptPayload(f"symbol {x} exceeds the {bits}-bit payload")
            v |= x << (bits * t)
        parts.append(v.to_bytes(size + 1, "little")[:size])
    stream = b"".join(parts)
    if len(stream) < TRAILER.size:
        raise CorruptPayload("stream shorter than its length trailer")
    (length,) = TRAILER.unpack(stream[-TRAILER.size:])
    if length > len(stream) - TRAILER.size:
        raise CorruptPayload(f"trailer claims {length} bytes, stream holds {len(stream) - TRAILER.size}")
    return stream[:length]


def info_symbols(instance: CodeInstance, stripe: StripeState) -> list[int]:
    return [v for g, j in instance.info_set for v in stripe.symbols[instance.node_index(g, j)]]


# -- shard files -------------------------------------------------------------------

def shard_name(g: int, j: int, stripe_index: int) -> str:
    return f"g{g}_n{j}_s{stripe_index}.shard"


def write_shards(instance: CodeInstance, stripe: StripeState, directory, stripe_index: int,
                 digest: bytes | None = None) -> list[Path]:
    spec = instance.spec
    digest = digest or spec.digest()
    width = symbol_width(spec.q)
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    for g in range(spec.mu):
        for j in range(spec.n):
            x = instance.node_index(g, j)
            if stripe.erased[x]:
                continue
            head = ShardHeader(digest, g, j, spec.ell, width, stripe_index).pack()
            body = b"".join(v.to_bytes(width, "little") for v in stripe.symbols[x])
            path = d / shard_name(g, j, stripe_index)
            path.write_bytes(head + body)
            written.append(path)
    return written


def read_shard(instance: CodeInstance, path, g: int, j: int, stripe_index: int,
               digest: bytes | None = None) -> list[int]:
    spec = instance.spec
    raw = Path(path).read_bytes()
    head = ShardHeader.unpack(raw)
    if head.spec_hash != (digest or spec.digest()):
        raise HashMismatch(f"{path}: shard belongs to a different code spec")
    expected = (g, j, spec.ell, symbol_width(spec.q), stripe_index)
    found = (head.group, head.node, head.ell, head.symbol_width, head.stripe_index)
    if found != expected:
        raise CorruptHeader(f"{path}: header fields {found} do not match {expected}")
    body = raw[HEADER_SIZE:]
    need = head.ell * head.symbol_width
    if len(body) < need:
        raise ShortRead(f"{path}: payload has {len(body)} of {need} bytes")
    if len(body) > need:
        raise CorruptPayload(f"{path}: {len(body) - need} trailing bytes")
    w = head.symbol_width
    vals = [int.from_bytes(body[t * w:(t + 1) * w], "little") for t in range(head.ell)]
    if any(v >= spec.q for v in vals):
        raise CorruptPayload(f"{path}: symbol outside GF({spec.q})")
    return vals


def read_shards(instance: CodeInstance, directory, stripe_index: int,
                digest: bytes | None = None) -> StripeState:
    """Missing shard files become erased nodes."""
    spec = instance.spec
    digest = digest or spec.digest()
    d = Path(directory)
    cols, erased = [], []
    for g in range(spec.mu):
        for j in range(spec.n):
            path = d / shard_name(g, j, stripe_index)
            if path.exists():
                cols.append(read_shard(instance, path, g, j, stripe_index, digest))
                erased.append(False)
            else:
                cols.append([0] * spec.ell)
                erased.append(True)
    return StripeState(cols, erased)


def stripe_count(directory) -> int:
    d = Path(directory)
    man = d / MANIFEST
    if man.exists():
        return int(json.loads(man.read_text())["stripes"])
    idx = [int(m.group(3)) for m in map(_NAME.match, os.listdir(d)) if m]
    return max(idx) + 1 if idx else 0


# -- whole files --------------------------------------------------------------------

def encode_bytes(instance: CodeInstance, data: bytes, directory) -> int:
    """chunk + encode + write shards and a manifest; returns the stripe count."""
    digest = instance.spec.digest()
    blocks = chunk(data, instance)
    for idx, info in enumerate(blocks):
        write_shards(instance, instance.encode(info), directory, idx, digest)
    manifest = {"stripes": len(blocks), "spec_sha256": digest.hex(), "bytes": len(data)}
    (Path(directory) / MANIFEST).write_text(json.dumps(manifest, sort_keys=True))
    return len(blocks)


def decode_bytes(instance: CodeInstance, directory) -> bytes:
    """read + decode + unchunk; raises Unrecoverable on a rank-deficient stripe."""
    digest = instance.spec.digest()
    blocks = []
    for idx in range(stripe_count(directory)):
        stripe = instance.decode(read_shards(instance, directory, idx, digest))
        blocks.append(info_symbols(instance, stripe))
    return unchunk(blocks, instance)


def erase_nodes(instance: CodeInstance, directory, nodes: Iterable[tuple[int, int]]) -> int:
    """Delete every stripe's shard for the given (group, node) pairs."""
    removed = 0
    d = Path(directory)
    targets = {(g, j) for g, j in nodes}
    for g, j in targets:
        instance.node_index(g, j)
    for name in os.listdir(d):
        m = _NAME.match(name)
        if m and (int(m.group(1)), int(m.group(2))) in targets:
            (d / name).unlink()
            removed += 1
    return removed
