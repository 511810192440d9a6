"""Splittable, replication-indexed random streams.

Every replication draws from a generator derived from
(seed, operation code, replication index) through ``numpy``'s SeedSequence
hashing.  Streams therefore never depend on worker count or scheduling, and
no stream is reused across operations.
"""

from __future__ import annotations

import numpy as np

__all__ = ["OP_CODES", "replication_rng"]

OP_CODES = {
    "supercrit": 1,
    "bsc": 2,
    "donsker": 3,
    "doob_meyer": 4,
    "local_time": 5,
    "oracle": 6,
    "dump": 7,
}


def replication_rng(seed: int, op: str, rep: int) -> np.random.Generator:
    """Generator for one replication of one operation."""
    code = OP_CODES[op]
    ss = np.random.SeedSequence(entropy=(int(seed), code, int(rep)))
    return np.random.default_rng(ss)
