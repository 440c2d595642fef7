"""Deterministic random-number streams.

Every stochastic component in this package draws from an :class:`RngStream`,
a value object naming a (seed, path) pair. Child streams derived with
:meth:`RngStream.child` are statistically independent, and the same
(seed, path) always reproduces the same draw sequence, so results do not
depend on evaluation order and adding work units (more trees, more runs)
never perturbs earlier ones.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError


def _key_to_int(key) -> int:
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise InvalidInputError(f"stream keys must be non-negative, got {key}")
        return int(key)
    if isinstance(key, str):
        # stable across platforms and sessions, unlike hash()
        return zlib.crc32(key.encode("utf-8"))
    raise InvalidInputError(f"stream key must be int or str, got {type(key).__name__}")


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible random stream: a root seed plus a derivation path."""

    seed: int
    path: tuple = field(default_factory=tuple)

    def child(self, *keys) -> "RngStream":
        """Derive an independent sub-stream. Keys may be ints or short strings."""
        return RngStream(self.seed, self.path + tuple(_key_to_int(k) for k in keys))

    def generator(self) -> np.random.Generator:
        """A fresh numpy Generator; repeated calls restart the same sequence."""
        return np.random.Generator(np.random.PCG64(self._seq()))

    def state_int(self) -> int:
        """A 32-bit integer derived from this stream, for seeding external RNGs."""
        return int(self._seq().generate_state(1, np.uint32)[0])

    def _seq(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.seed, spawn_key=self.path)
