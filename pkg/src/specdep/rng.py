"""Reproducible random number streams.

All stochastic code in this package draws from numpy ``Generator`` objects
built here.  A single 64-bit root seed plus an integer task key (for example
``(channel, epoch)`` or ``(channel, epoch, replicate)``) is mapped to an
independent PCG64 stream through ``numpy.random.SeedSequence`` spawn keys.
Streams keyed this way do not depend on scheduling order, so parallel and
serial executions of the same work produce identical results.
"""

from __future__ import annotations

import numpy as np

__all__ = ["task_rng"]


def task_rng(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for task ``key`` under the given root seed.

    Parameters
    ----------
    seed : int
        Root seed shared by the whole run.
    *key : int
        Task coordinates, e.g. ``task_rng(seed, channel, epoch)``.  An empty
        key yields the root stream itself.

    Returns
    -------
    numpy.random.Generator
    """
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)
