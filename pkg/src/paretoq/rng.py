"""Named, seedable random streams.

Every run draws all of its randomness from numpy PCG64 generators derived
from a single integer seed. Each component owns a separate stream so that
how much randomness one component consumes can never shift what another
component sees; this is what makes whole runs reproducible bit for bit.

Stream identities are frozen integers. Changing them (or the generator
family) is a breaking change for every recorded experiment.
"""

from __future__ import annotations

import numpy as np

STREAM_ENV = 0        # environment dynamics during training rollouts
STREAM_EXPLORE = 1    # epsilon-greedy coins and random actions
STREAM_BUFFER = 2     # replay batch draws
STREAM_EVAL = 3       # policy-evaluation episodes
STREAM_METRICS = 4    # Monte-Carlo metric estimation

_STREAM_NAMES = {
    "env": STREAM_ENV,
    "explore": STREAM_EXPLORE,
    "buffer": STREAM_BUFFER,
    "eval": STREAM_EVAL,
    "metrics": STREAM_METRICS,
}


def derive_stream(seed: int, stream_id: int) -> np.random.Generator:
    """PCG64 generator for the (seed, stream_id) pair."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, stream_id))))


class RunStreams:
    """All named streams of one run, derived from one seed."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        for name, sid in _STREAM_NAMES.items():
            setattr(self, name, derive_stream(self.seed, sid))

    def __repr__(self) -> str:  # pragma: no cover
        return f"RunStreams(seed={self.seed})"
