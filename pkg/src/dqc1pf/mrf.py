"""Binary pairwise Markov random fields with energy ``F(x) = x^T Theta x``.

Weights are stored upper-triangular and 0-indexed. Model files are JSON with
1-indexed ``[i, j, value]`` triples::

    {"n": 5, "theta": [[1, 1, 0.05], [1, 2, 0.1], ...]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .errors import ModelFormatError

Entry = tuple[int, int]

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class MrfModel:
    """Immutable binary pairwise MRF.

    ``theta[(i, i)]`` is the node weight of variable ``i`` and ``theta[(i, j)]``
    with ``i < j`` the edge weight. ``scale`` is the L1 mass of the model this
    one was normalized from (1.0 when built already normalized).
    """

    n: int
    theta: Mapping[Entry, float]
    scale: float = 1.0
    _l1: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n <= 0:
            raise ModelFormatError(f"node count must be a positive integer, got {self.n!r}")
        clean: dict[Entry, float] = {}
        for (i, j), value in sorted(self.theta.items()):
            if not (0 <= i <= j < self.n):
                raise ModelFormatError(f"entry ({i}, {j}) outside upper triangle of a {self.n}-node model")
            value = float(value)
            if not math.isfinite(value):
                raise ModelFormatError(f"entry ({i}, {j}) is not finite")
            if value != 0.0:
                clean[(int(i), int(j))] = value
        if not clean:
            raise ModelFormatError("all-zero theta: normalization undefined")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ModelFormatError(f"scale must be positive, got {self.scale!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "theta", MappingProxyType(clean))
        object.__setattr__(self, "_l1", math.fsum(abs(v) for v in clean.values()))

    def __reduce__(self):
        return (MrfModel, (self.n, dict(self.theta), self.scale))

    @property
    def l1(self) -> float:
        """Sum of absolute weights."""
        return self._l1

    @property
    def is_normalized(self) -> bool:
        return abs(self._l1 - 1.0) <= NORMALIZATION_TOL

    @property
    def nodes(self) -> list[tuple[int, float]]:
        return [(i, v) for (i, j), v in self.theta.items() if i == j]

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [(i, j, v) for (i, j), v in self.theta.items() if i != j]

    def matrix(self) -> np.ndarray:
        """Dense upper-triangular ``Theta``."""
        out = np.zeros((self.n, self.n))
        for (i, j), v in self.theta.items():
            out[i, j] = v
        return out


def energy(model: MrfModel, config: Sequence[int]) -> float:
    """Energy of one configuration given as a 0/1 sequence of length ``n``."""
    if len(config) != model.n:
        raise ValueError(f"config has length {len(config)}, model has {model.n} nodes")
    on = [bool(b) for b in config]
    return math.fsum(v for (i, j), v in model.theta.items() if on[i] and on[j])


def config_bits(index: int, n: int) -> list[int]:
    """Little-endian bit vector of a basis index: bit ``i`` is node ``i``."""
    return [(index >> i) & 1 for i in range(n)]


def energies(model: MrfModel) -> np.ndarray:
    """Energies of all ``2**n`` configurations, indexed by little-endian encoding."""
    idx = np.arange(1 << model.n, dtype=np.int64)
    bits = [((idx >> i) & 1).astype(np.float64) for i in range(model.n)]
    out = np.zeros(1 << model.n)
    for (i, j), v in model.theta.items():
        if i == j:
            out += v * bits[i]
        else:
            out += v * (bits[i] * bits[j])
    return out


def normalize(model: MrfModel) -> MrfModel:
    """Rescale so the weights have unit L1 mass; the factor is folded into ``scale``."""
    s = model.l1
    theta = {key: v / s for key, v in model.theta.items()}
    return MrfModel(model.n, theta, scale=model.scale * s)


def random_model(n: int, seed: int, density: float = 1.0) -> MrfModel:
    """Random normalized model: every node weighted, each edge kept with prob. ``density``.

    Weights are uniform on [-1, 1] before normalization. The returned model has
    ``scale == 1``: it is the normalized instance itself, not a rescaled view of
    the raw draw.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < density <= 1.0:
        raise ValueError("density must lie in (0, 1]")
    substream = 0
    while True:
        rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFF_FFFF_FFFF_FFFF, n, substream]))
        theta: dict[Entry, float] = {}
        for i in range(n):
            theta[(i, i)] = rng.uniform(-1.0, 1.0)
        for i in range(n):
            for j in range(i + 1, n):
                keep, w = rng.random(), rng.uniform(-1.0, 1.0)
                if keep < density:
                    theta[(i, j)] = w
        if any(v != 0.0 for v in theta.values()):
            return MrfModel(n, normalize(MrfModel(n, theta)).theta)
        substream += 1


# -- file format ---------------------------------------------------------------


def parse_model(text: str) -> MrfModel:
    """Parse the JSON model format (1-indexed, upper-triangular, no duplicates)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or set(doc) != {"n", "theta"}:
        raise ModelFormatError('model must be an object with exactly the keys "n" and "theta"')
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n <= 0:
        raise ModelFormatError(f'"n" must be a positive integer, got {n!r}')
    if not isinstance(doc["theta"], list):
        raise ModelFormatError('"theta" must be a list of [i, j, value] triples')
    theta: dict[Entry, float] = {}
    for row in doc["theta"]:
        if not (isinstance(row, list) and len(row) == 3):
            raise ModelFormatError(f"bad entry {row!r}: expected [i, j, value]")
        i, j, value = row
        if any(isinstance(v, bool) or not isinstance(v, int) for v in (i, j)):
            raise ModelFormatError(f"bad indices in {row!r}")
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ModelFormatError(f"bad value in {row!r}")
        if not (1 <= i <= n and 1 <= j <= n):
            raise ModelFormatError(f"index out of range in {row!r} for n={n}")
        if i > j:
            raise ModelFormatError(f"lower-triangular entry {row!r}; only i <= j is allowed")
        key = (i - 1, j - 1)
        if key in theta:
            raise ModelFormatError(f"duplicate entry ({i}, {j})")
        theta[key] = float(value)
    return MrfModel(n, theta)


def serialize_model(model: MrfModel) -> str:
    """Canonical JSON text, entries sorted by (i, j). Round-trips through :func:`parse_model`."""
    rows = [[i + 1, j + 1, v] for (i, j), v in sorted(model.theta.items())]
    return json.dumps({"n": model.n, "theta": rows}) + "\n"


def load_model(path: str | Path) -> MrfModel:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def five_node_example() -> MrfModel:
    """The 5-node radar example graph (normalized, Sum|theta| = 1)."""
    return load_model(Path(__file__).parent / "data" / "five_node.json")
