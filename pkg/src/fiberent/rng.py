"""Deterministic, splittable random streams.

Every random quantity in this package is a pure function of a 64-bit root
seed plus a path of labels (strings, integers, coordinate tuples).  The
derivation is counter-based rather than stateful: stream i of a root seed
is ``mix64(seed, "traj", i)``, and the symbol at lattice site g is drawn
from ``uniform01(stream_seed, *g)``.  This makes results independent of
evaluation order and of how work is sharded across processes.

The mixing function is BLAKE2b with the seed as key, truncated to 64 bits.
Python's built-in ``hash`` is salted per process and must never be used
for this purpose.
"""

from __future__ import annotations

import struct
from hashlib import blake2b

_MASK64 = 0xFFFFFFFFFFFFFFFF


def _encode(parts: tuple) -> bytes:
    chunks = []
    for part in parts:
        if isinstance(part, bool):
            chunks.append(b"b1" if part else b"b0")
        elif isinstance(part, int):
            if -(2**63) <= part < 2**63:
                chunks.append(b"i" + struct.pack("<q", part))
            else:
                raw = str(part).encode()
                chunks.append(b"I" + struct.pack("<I", len(raw)) + raw)
        elif isinstance(part, str):
            raw = part.encode()
            chunks.append(b"s" + struct.pack("<I", len(raw)) + raw)
        elif isinstance(part, tuple):
            inner = _encode(part)
            chunks.append(b"(" + struct.pack("<I", len(inner)) + inner)
        else:
            raise TypeError(f"cannot encode {type(part).__name__} into a stream path")
    return b"".join(chunks)


def mix64(seed: int, *parts) -> int:
    """Derive a 64-bit value from a seed and a label path, deterministically."""
    key = (seed & _MASK64).to_bytes(8, "little")
    digest = blake2b(_encode(parts), key=key, digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(seed: int, *parts) -> int:
    """Child seed for an independent substream."""
    return mix64(seed, *parts)


def uniform01(seed: int, *parts) -> float:
    """Uniform float in [0, 1) with 53 random bits."""
    return (mix64(seed, *parts) >> 11) * (1.0 / (1 << 53))
