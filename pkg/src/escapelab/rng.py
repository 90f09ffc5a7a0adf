"""Counter-based random streams.

Every stochastic routine takes an RngStream.  Identical (seed, stream_id)
reproduce identical draws; distinct stream_ids are statistically
independent, so Monte Carlo paths can be farmed out to workers in any
order without changing results.  Backed by numpy's Philox counter-based
generator keyed through SeedSequence spawn keys.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream"]


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        """A fresh Generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(seq))

    def child(self, stream_id: int) -> "RngStream":
        """Stream with the same seed and a different id."""
        return RngStream(self.seed, stream_id)
