"""Seedable, splittable random streams for reproducible simulation.

Every stochastic operation in the package draws from a substream derived
from a master seed plus a tuple of purpose tags, so results do not depend
on the order in which independent pieces of work are executed.
"""

from __future__ import annotations

import zlib

import numpy as np


def _tag_to_int(tag) -> int:
    if isinstance(tag, (int, np.integer)):
        return int(tag)
    if isinstance(tag, str):
        return zlib.crc32(tag.encode("utf-8"))
    raise TypeError(f"substream tag must be int or str, got {type(tag).__name__}")


def substream(seed: int, *tags) -> np.random.Generator:
    """Return an independent generator for (seed, *tags).

    The same (seed, tags) tuple always yields the same stream; distinct
    tag tuples yield statistically independent streams.
    """
    key = tuple(_tag_to_int(t) for t in tags)
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=key))
