"""Reproducible random streams keyed by integer paths.

A stream is identified by a path ``(master_seed, id_1, id_2, ...)``.  Two
streams with different paths are statistically independent, and the
generator a stream hands out depends only on the path, never on the order
in which streams are created or consumed.  Work scheduled across threads
therefore draws identical values regardless of the schedule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Stream:
    """Handle for one deterministic random stream."""

    key: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.key:
            raise ValueError("stream key must be non-empty")
        for part in self.key:
            if not isinstance(part, (int, np.integer)) or part < 0:
                raise ValueError("stream key parts must be non-negative integers")
        object.__setattr__(self, "key", tuple(int(p) for p in self.key))

    @classmethod
    def root(cls, master_seed: int) -> "Stream":
        return cls((master_seed,))

    def child(self, *ids: int) -> "Stream":
        return Stream(self.key + ids)

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.key[0], spawn_key=self.key[1:])
        return np.random.default_rng(seq)

    @property
    def label(self) -> str:
        return "/".join(str(p) for p in self.key)
