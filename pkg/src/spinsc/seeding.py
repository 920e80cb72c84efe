"""Deterministic per-instance random streams.

Every stochastic component owns a numpy Generator derived from the master
seed plus a (domain, index) key, so simulations are reproducible bit for bit
and independent instances never share a stream.
"""

from __future__ import annotations

import numpy as np

# Domain tags keep streams for different subsystems disjoint even when the
# integer indices collide.
DOMAIN_DEVICE = 1
DOMAIN_PROCESS_VARIATION = 2
DOMAIN_READINGS = 3


def rng_for(master_seed: int, domain: int, index: int = 0) -> np.random.Generator:
    """Generator for one simulated instance, unique per (seed, domain, index)."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(domain), int(index)))
    return np.random.default_rng(seq)
