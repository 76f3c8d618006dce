"""Deterministic derivation of named sub-seeds from one master seed.

Every source of randomness in the toolkit (splitting, shuffling, weight
init, the SVD range finder, dropout) draws its own sub-seed so that a
single --seed value pins the whole run.
"""

import hashlib

# Sub-seed names used across the toolkit.
SPLIT = "split"
SHUFFLE = "shuffle"
INIT = "init"
SVD = "svd"
DROPOUT = "dropout"


def subseed(master: int, name: str) -> int:
    """Derive a stable 63-bit sub-seed for `name` from the master seed."""
    digest = hashlib.sha256(f"{master}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") >> 1
