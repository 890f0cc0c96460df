"""Deterministic seed derivation for every stochastic pipeline stage."""

from __future__ import annotations

import hashlib
from typing import Final

__all__ = ["derive_seed", "SEED_MASK"]

SEED_MASK: Final = (1 << 63) - 1


def derive_seed(master_seed: int, stage: str, index: int = 0) -> int:
    """Return a 63-bit seed for *stage* (and *index*) derived from *master_seed*.

    The derivation is the first eight bytes (big-endian) of
    ``sha256(f"{master_seed}:{stage}:{index}")`` masked to 63 bits, so a run
    can be reproduced by hand from the master seed alone.
    """
    digest = hashlib.sha256(f"{master_seed}:{stage}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big") & SEED_MASK
