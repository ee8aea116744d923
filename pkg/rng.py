#!/usr/bin/env python3
"""
Seeded random streams for reproducible measurement runs.

Every run is driven by numpy's PCG64 generator. Shot k of a run reads the
k-th 64-bit output of the stream; the stream can jump straight to any shot,
so a single actualization and a whole experiment see the same draws.
"""
import hashlib

import numpy as np

from errors import InvariantViolation

GENERATOR_NAME = "PCG64"
SEED_LIMIT = 2 ** 64


def draw_seed():
    """Fresh seed from OS entropy (printed by the caller for transcripts)"""
    return int(np.random.SeedSequence().entropy) % SEED_LIMIT


class ShotStream:
    """Deterministic uniform draws indexed by shot number"""

    def __init__(self, seed):
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
            raise InvariantViolation(f"Seed must be an integer, got {seed!r}")
        seed = int(seed)
        if not 0 <= seed < SEED_LIMIT:
            raise InvariantViolation(f"Seed must be in [0, 2**64), got {seed}")
        self.seed = seed

    def uniform(self, shot):
        """The draw for one shot, without generating the earlier ones"""
        if shot < 0:
            raise InvariantViolation(f"Shot index must be >= 0, got {shot}")
        bit_generator = np.random.PCG64(self.seed)
        bit_generator.advance(shot)
        return float(np.random.Generator(bit_generator).random())

    def uniforms(self, shots):
        """Draws for shots 0..shots-1 in one vectorized call"""
        return np.random.Generator(np.random.PCG64(self.seed)).random(shots)

    def for_path(self, *path_components):
        """Child stream with a seed derived from a path (one per experiment block)"""
        path = "/".join(str(c) for c in path_components)
        digest = hashlib.sha256(f"{self.seed:016x}/{path}".encode()).hexdigest()
        return ShotStream(int(digest[:16], 16))

    def __repr__(self):
        return f"ShotStream({GENERATOR_NAME}, seed={self.seed})"
