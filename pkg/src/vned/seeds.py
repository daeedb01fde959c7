"""Deterministic sub-seed derivation.

All randomness in a run flows from one root seed; component seeds are
derived by hashing the root together with string labels, so adding or
reordering pipeline steps never shifts another step's random stream.
"""

from __future__ import annotations

import hashlib


def derive_seed(root: int, *labels: str | int) -> int:
    """64-bit seed from a root seed and a labelled path."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(root)).encode())
    for label in labels:
        h.update(b"\x1f")
        h.update(str(label).encode())
    return int.from_bytes(h.digest(), "big")
