"""Signed Pauli-Z string decomposition of ``H = -H_theta``.

With ``B = (I - Z)/2`` each node weight expands into two Z strings and each
edge weight into four. Terms are never merged, so the weights of a normalized
model sum to exactly one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .mrf import MrfModel

DEFAULT_ENUM_CAP = 24


@dataclass(frozen=True)
class SignedZTerm:
    sign: int
    support: frozenset[int]
    weight: float
    padding: bool = False

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.padding:
            if self.weight != 0.0 or self.support or self.sign != 1:
                raise ValueError("padding terms are weight-0 identity terms with sign +1")
        elif not self.weight > 0.0:
            raise ValueError("term weight must be strictly positive")
        if any(q < 0 for q in self.support):
            raise ValueError("negative qubit index in support")

    @property
    def mask(self) -> int:
        out = 0
        for q in self.support:
            out |= 1 << q
        return out


def term_eigenvalue(term: SignedZTerm, basis_index: int) -> int:
    """Eigenvalue (+1 or -1) of the Z string at a computational basis state."""
    return -term.sign if (basis_index & term.mask).bit_count() & 1 else term.sign


@dataclass(frozen=True)
class Lcu:
    n: int
    terms: tuple[SignedZTerm, ...]
    m: int
    scale: float = 1.0

    def __post_init__(self) -> None:
        if len(self.terms) != 1 << self.m:
            raise ValueError(f"term count {len(self.terms)} is not 2^{self.m}")
        for t in self.terms:
            if max(t.support, default=-1) >= self.n:
                raise ValueError("term support outside the system register")

    @property
    def m_prime(self) -> int:
        return self.m + 1

    @property
    def raw_terms(self) -> int:
        return sum(not t.padding for t in self.terms)

    @property
    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.terms])

    @property
    def weight_sum(self) -> float:
        return math.fsum(t.weight for t in self.terms)

    @property
    def masks(self) -> np.ndarray:
        return np.array([t.mask for t in self.terms], dtype=np.int64)

    @property
    def signs(self) -> np.ndarray:
        return np.array([t.sign for t in self.terms], dtype=np.int64)


def decompose(model: MrfModel) -> Lcu:
    """Expand a normalized model into an LCU padded to a power-of-two term count.

    Order: node terms by ascending index, then edges in lexicographic order.
    Signs already carry the global negation ``H = -H_theta``.
    """
    if not model.is_normalized:
        raise ValueError(f"model is not normalized (sum |theta| = {model.l1!r})")
    terms: list[SignedZTerm] = []
    for i, v in model.nodes:
        s = 1 if v > 0 else -1
        half = abs(v) / 2
        terms.append(SignedZTerm(-s, frozenset(), half))
        terms.append(SignedZTerm(s, frozenset({i}), half))
    for i, j, v in model.edges:
        s = 1 if v > 0 else -1
        quarter = abs(v) / 4
        terms.append(SignedZTerm(-s, frozenset(), quarter))
        terms.append(SignedZTerm(s, frozenset({i}), quarter))
        terms.append(SignedZTerm(s, frozenset({j}), quarter))
        terms.append(SignedZTerm(-s, frozenset({i, j}), quarter))
    m = max(1, (len(terms) - 1).bit_length())
    pad = SignedZTerm(1, frozenset(), 0.0, padding=True)
    terms.extend([pad] * ((1 << m) - len(terms)))
    return Lcu(model.n, tuple(terms), m, model.scale)


def eigen_table(lcu: Lcu) -> np.ndarray:
    """``table[l, x]`` = eigenvalue of term ``l`` at basis state ``x``; shape ``(2^m, 2^n)``."""
    x = np.arange(1 << lcu.n, dtype=np.int64)
    parity = np.bitwise_count(lcu.masks[:, None] & x[None, :]) & 1
    return lcu.signs[:, None] * (1 - 2 * parity.astype(np.int64))


def diagonal(lcu: Lcu, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """Diagonal of ``sum_l weight_l * sign_l * Z_support`` over all ``2^n`` basis states."""
    if lcu.n > cap:
        raise CapacityError(f"n={lcu.n} exceeds enumeration cap {cap}")
    x = np.arange(1 << lcu.n, dtype=np.int64)
    out = np.zeros(1 << lcu.n)
    for t in lcu.terms:
        if t.padding:
            continue
        parity = np.bitwise_count(x & t.mask) & 1
        out += t.sign * t.weight * (1.0 - 2.0 * parity)
    return out


def amplitudes(lcu: Lcu) -> np.ndarray:
    """Prepare-oracle amplitudes ``sqrt(weight_l)``."""
    return np.sqrt(lcu.weights)


def lcu_to_dict(lcu: Lcu) -> dict:
    return {
        "n": lcu.n,
        "m": lcu.m,
        "m_prime": lcu.m_prime,
        "raw_terms": lcu.raw_terms,
        "weight_sum": lcu.weight_sum,
        "terms": [
            {"sign": t.sign, "support": sorted(t.support), "weight": t.weight, "padding": t.padding}
            for t in lcu.terms
        ],
    }


def dump_lcu(lcu: Lcu) -> str:
    return json.dumps(lcu_to_dict(lcu), indent=1) + "\n"
