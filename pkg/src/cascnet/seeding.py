"""Deterministic seed derivation for reproducible experiments.

Every random procedure in the library takes a :class:`RunSeed`.  A RunSeed
names a point in a tree of independent random streams: the root is a 64-bit
master seed and each ``derive(...)`` step appends indices to a path.  The
same (master, path) always yields the same stream, no matter how many
workers the surrounding computation is split across.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

_MASTER_BOUND = 1 << 64


def label_code(label: str) -> int:
    """Stable 32-bit code for a string label, usable as a derivation index."""
    return zlib.crc32(label.encode("utf-8"))


@dataclass(frozen=True)
class RunSeed:
    """Master seed plus a derivation path identifying one random stream."""

    master: int
    path: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.master < _MASTER_BOUND:
            raise ValueError(f"master seed must be a 64-bit unsigned integer, got {self.master}")
        for ix in self.path:
            if ix < 0:
                raise ValueError(f"derivation indices must be nonnegative, got {ix}")

    def derive(self, *indices: int) -> "RunSeed":
        """Child seed with `indices` appended to the derivation path."""
        return RunSeed(self.master, self.path + tuple(int(i) for i in indices))

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.master, spawn_key=self.path)

    def generator(self) -> np.random.Generator:
        """Fresh PCG64 generator positioned at the start of this stream."""
        return np.random.default_rng(self.seed_sequence())

    def key64(self) -> np.uint64:
        """64-bit key for counter-based (stateless) random draws."""
        return np.uint64(self.seed_sequence().generate_state(1, dtype=np.uint64)[0])
