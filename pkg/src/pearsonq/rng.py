"""Counter-based random substreams.

Replication ``i`` of experiment ``e`` under master seed ``s`` always draws
from the same Philox stream, whatever the worker count or scheduling.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

_MASK = (1 << 64) - 1


def _splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def experiment_id(label: str) -> int:
    """Stable 64-bit id for a textual experiment label."""
    return int.from_bytes(hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest(), "little")


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    stream_id: int

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence([self.master_seed & _MASK, self.stream_id])
        return np.random.Generator(np.random.Philox(ss))


def substream(master_seed: int, experiment: int | str, replication: int) -> RngStream:
    """Stream for one replication: a splitmix64 chain over the three inputs."""
    exp = experiment_id(experiment) if isinstance(experiment, str) else int(experiment) & _MASK
    sid = _splitmix64(_splitmix64(_splitmix64(int(master_seed) & _MASK) ^ exp) ^ int(replication))
    return RngStream(int(master_seed) & _MASK, sid)


def draw_rows(spec, n, master_seed, experiment, start, stop):
    """Replications ``start..stop-1`` of ``n`` variates each, one row per replication."""
    from .distributions import draw

    out = np.empty((stop - start, n))
    for row, i in enumerate(range(start, stop)):
        out[row] = draw(spec, substream(master_seed, experiment, i).generator(), n)
    return out
