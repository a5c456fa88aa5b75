"""Counter-based random streams.

Each (master seed, graph, repetition, k) key selects an independent Philox
stream; shot ``i`` consumes raw 64-bit word ``i`` of that stream. Results do
not depend on execution order or chunking.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

_MASK64 = (1 << 64) - 1
_CHUNK = 1 << 18


def _key(*keys: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(k) & _MASK64 for k in keys])


def derive_seed(*keys: int) -> int:
    """A 64-bit seed deterministically derived from integer keys."""
    return int(_key(*keys).generate_state(1, np.uint64)[0])


def shot_stream(seed: int, graph: int = 0, rep: int = 0, k: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(_key(seed, graph, rep, k)))


def raw_words(stream: np.random.Generator, count: int) -> Iterator[np.ndarray]:
    """Yield ``count`` raw uint64 words in fixed-size chunks."""
    bitgen = stream.bit_generator
    done = 0
    while done < count:
        size = min(_CHUNK, count - done)
        yield bitgen.random_raw(size)
        done += size
