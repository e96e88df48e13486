"""Deterministic random number generation.

All samplers in this package draw from a Philox counter-based generator.
The same seed reproduces the same stream bit for bit, and because every
sampler draws its variates in one vectorized request the output does not
depend on thread or worker count.
"""

import numpy as np

from .errors import ParameterError


def make_rng(seed):
    """Return a ``numpy.random.Generator`` backed by Philox.

    Parameters
    ----------
    seed : int
        Explicit nonnegative seed. ``None`` is rejected: reproducibility
        contracts forbid hidden entropy.
    """
    if seed is None:
        raise ParameterError("an explicit integer seed is required")
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ParameterError(f"seed must be a nonnegative integer, got {seed!r}")
    return np.random.Generator(np.random.Philox(seed))
