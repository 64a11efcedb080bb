"""Deterministic seed derivation.

Every stochastic operation in the package draws from a generator spawned off a
single master seed plus a derivation path, so results never depend on loop
order, parallel scheduling, or ambient global RNG state.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["spawn_rng", "derive_seed"]


def _key_to_int(item) -> int:
    """Map one path element to a non-negative integer entropy word."""
    if isinstance(item, (bool, np.bool_)):
        raise TypeError("booleans are ambiguous seed-path elements")
    if isinstance(item, (int, np.integer)):
        if item < 0:
            raise ValueError(f"seed-path integers must be non-negative, got {item}")
        return int(item)
    if isinstance(item, (float, np.floating)):
        # bit pattern, so distinct floats never collide and 0.1 != index 0
        return int(np.float64(item).view(np.uint64))
    if isinstance(item, str):
        digest = hashlib.sha256(item.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "little")
    raise TypeError(f"unsupported seed-path element of type {type(item).__name__}")


def spawn_rng(master_seed: int, *path) -> np.random.Generator:
    """Return a Generator keyed by (master_seed, *path).

    Path elements may be non-negative ints, floats (keyed by bit pattern), or
    strings (hashed). The same (master_seed, path) always yields the same
    stream; distinct paths yield independent streams.
    """
    if master_seed < 0:
        raise ValueError(f"master_seed must be non-negative, got {master_seed}")
    entropy = [int(master_seed)] + [_key_to_int(item) for item in path]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(master_seed: int, *path) -> int:
    """Collapse (master_seed, *path) into a single non-negative child seed.

    Useful when an operation takes a plain integer seed but must be keyed
    into the master stream.
    """
    if master_seed < 0:
        raise ValueError(f"master_seed must be non-negative, got {master_seed}")
    entropy = [int(master_seed)] + [_key_to_int(item) for item in path]
    state = np.random.SeedSequence(entropy).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)
