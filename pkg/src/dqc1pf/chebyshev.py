"""Scalar numerics for the Chebyshev expansion of ``exp(-beta H)``.

Modified Bessel coefficients, Chebyshev polynomials, the truncation order and
shot budget formulas, and assembly of the truncated trace
``Tr(S_K) = I_0 2^n + 2 sum_k (-1)^k I_k chi_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

KMode = Literal["ceil", "table"]
LogMode = Literal["natural", "base10"]

_SERIES_RTOL = 1e-17


def bessel_i(k: int, beta: float) -> float:
    """Modified Bessel function of the first kind ``I_k(beta)`` by its power series."""
    if k < 0:
        raise ValueError("order must be non-negative")
    if beta < 0:
        raise ValueError("argument must be non-negative")
    if beta == 0.0:
        return 1.0 if k == 0 else 0.0
    half = 0.5 * beta
    term = 1.0
    for i in range(1, k + 1):
        term *= half / i
    total = term
    quarter_sq = half * half
    j = 0
    while True:
        j += 1
        term *= quarter_sq / (j * (j + k))
        total += term
        if term <= _SERIES_RTOL * total:
            return total


def bessel_coefficients(K: int, beta: float) -> tuple[float, ...]:
    """``(I_0(beta), ..., I_K(beta))``."""
    return tuple(bessel_i(k, beta) for k in range(K + 1))


def chebyshev_T(k: int, x: float) -> float:
    """Chebyshev polynomial of the first kind via the three-term recurrence.

    Arguments within 1e-12 outside [-1, 1] are clamped.
    """
    if k < 0:
        raise ValueError("degree must be non-negative")
    if abs(x) > 1.0 + 1e-12:
        raise ValueError(f"x={x!r} outside [-1, 1]")
    x = min(1.0, max(-1.0, x))
    prev, cur = 1.0, x
    if k == 0:
        return prev
    for _ in range(k - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def chebyshev_table(K: int, x: np.ndarray) -> np.ndarray:
    """Rows ``T_0(x) .. T_K(x)`` for an array of arguments, shape ``(K + 1, len(x))``."""
    x = np.clip(np.asarray(x, dtype=np.float64), -1.0, 1.0)
    out = np.empty((K + 1,) + x.shape)
    out[0] = 1.0
    if K >= 1:
        out[1] = x
    for k in range(1, K):
        out[k + 1] = 2.0 * x * out[k] - out[k - 1]
    return out


def truncation_order(m: int, eps_abs: float, mode: KMode = "ceil") -> int:
    """Number of Chebyshev terms ``K`` from ``m + e + log2(1/eps) + 2``.

    ``ceil`` applies the ceiling literally; ``table`` rounds to nearest and
    gives K = 10, 11, 12 at m = 2, 3, 4 with eps = 0.1.
    """
    if not 0.0 < eps_abs < 1.0:
        raise ValueError("eps_abs must lie in (0, 1)")
    value = m + math.e + math.log2(1.0 / eps_abs) + 2.0
    if mode == "ceil":
        return math.ceil(value)
    if mode == "table":
        return math.floor(value + 0.5)
    raise ValueError(f"unknown K mode {mode!r}")


def sample_budget(
    n: int,
    m_prime: int,
    K: int,
    delta: float,
    eps_abs: float,
    log_mode: LogMode = "natural",
) -> int:
    """Shot count ``Q = ceil(2^(2(n+m')+1) log(2K/delta) / (eps/2e)^2)`` as an exact int.

    The power of two is applied in rational arithmetic, so large ``n`` never
    overflows a float.
    """
    if not (0.0 < delta < 1.0 and 0.0 < eps_abs < 1.0):
        raise ValueError("delta and eps_abs must lie in (0, 1)")
    if K < 1:
        raise ValueError("K must be >= 1")
    if log_mode == "natural":
        log = math.log(2 * K / delta)
    elif log_mode == "base10":
        log = math.log10(2 * K / delta)
    else:
        raise ValueError(f"unknown log mode {log_mode!r}")
    base = log / (eps_abs / (2.0 * math.e)) ** 2
    return math.ceil(Fraction(base) * 2 ** (2 * (n + m_prime) + 1))


@dataclass(frozen=True)
class ChebyshevBudget:
    K: int
    Q: int
    beta_eff: float
    bessel: tuple[float, ...]
    eps_abs: float
    delta: float
    k_mode: KMode = "ceil"
    log_mode: LogMode = "natural"
    K_overridden: bool = False
    Q_overridden: bool = False

    def __post_init__(self) -> None:
        if self.K < 0 or self.Q < 1 or self.beta_eff < 0:
            raise ValueError("invalid budget")
        if len(self.bessel) != self.K + 1:
            raise ValueError("need K + 1 Bessel coefficients")


def make_budget(
    n: int,
    m: int,
    beta_eff: float,
    eps_abs: float = 0.1,
    delta: float = 0.1,
    *,
    K: int | None = None,
    Q: int | None = None,
    k_mode: KMode = "ceil",
    log_mode: LogMode = "natural",
) -> ChebyshevBudget:
    """Budget for an ``n``-qubit system with an ``m``-qubit LCU index (``m' = m + 1``)."""
    K_val = truncation_order(m, eps_abs, k_mode) if K is None else K
    Q_val = sample_budget(n, m + 1, max(K_val, 1), delta, eps_abs, log_mode) if Q is None else Q
    return ChebyshevBudget(
        K=K_val,
        Q=Q_val,
        beta_eff=beta_eff,
        bessel=bessel_coefficients(K_val, beta_eff),
        eps_abs=eps_abs,
        delta=delta,
        k_mode=k_mode,
        log_mode=log_mode,
        K_overridden=K is not None,
        Q_overridden=Q is not None,
    )


def assemble_trace(n: int, budget: ChebyshevBudget, chi: Sequence[float]) -> float:
    """Truncated series trace from ``chi_1 .. chi_K`` (``chi[0]`` is ``chi_1``)."""
    if len(chi) != budget.K:
        raise ValueError(f"expected {budget.K} chi values, got {len(chi)}")
    terms = [budget.bessel[0] * 2.0**n]
    for k, c in enumerate(chi, start=1):
        terms.append(2.0 * (-1) ** k * budget.bessel[k] * c)
    return math.fsum(terms)
