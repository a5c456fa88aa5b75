"""Exact classical ground truth by enumeration of all ``2^n`` configurations.

The block-encoded Hamiltonian ``H = -H_theta`` of a normalized model is
diagonal, with eigenvalue ``-F(x)`` at basis state ``x``. The inverse
temperature used throughout is ``beta_eff = beta * model.scale``, which makes
every quantity refer to the original (un-normalized) model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chebyshev import assemble_trace, bessel_coefficients, chebyshev_table, make_budget
from .errors import CapacityError
from .lcu import DEFAULT_ENUM_CAP
from .mrf import MrfModel, energies


@dataclass(frozen=True)
class SpectrumView:
    n: int
    eigenvalues: np.ndarray


def _check(model: MrfModel, cap: int) -> None:
    if model.n > cap:
        raise CapacityError(f"n={model.n} exceeds enumeration cap {cap}")
    if not model.is_normalized:
        raise ValueError("oracle requires a normalized model")


def _fsum(values: np.ndarray) -> float:
    # exactly rounded, so independent of how the enumeration is partitioned
    return math.fsum(values.tolist())


def spectrum(model: MrfModel, cap: int = DEFAULT_ENUM_CAP) -> SpectrumView:
    _check(model, cap)
    return SpectrumView(model.n, -energies(model))


def exact_partition(model: MrfModel, beta: float = 1.0, cap: int = DEFAULT_ENUM_CAP) -> float:
    """``sum_x exp(beta * F_orig(x))``."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    _check(model, cap)
    return _fsum(np.exp(beta * model.scale * energies(model)))


def exact_chis(model: MrfModel, K: int, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """``chi_0 .. chi_K`` where ``chi_k = sum_x T_k(lambda_x)``."""
    lam = spectrum(model, cap).eigenvalues
    table = chebyshev_table(K, lam)
    return np.array([_fsum(row) for row in table])


def exact_chi(model: MrfModel, k: int, cap: int = DEFAULT_ENUM_CAP) -> float:
    if k < 0:
        raise ValueError("k must be non-negative")
    return float(exact_chis(model, k, cap)[k])


def exact_sk_trace(model: MrfModel, beta: float, K: int, cap: int = DEFAULT_ENUM_CAP) -> float:
    """Trace of the order-``K`` Chebyshev truncation of ``exp(-beta_eff H)``."""
    chis = exact_chis(model, K, cap)
    budget = make_budget(model.n, 1, beta * model.scale, K=K, Q=1)
    return assemble_trace(model.n, budget, list(chis[1:]))


def sk_eigenvalues(lam: np.ndarray, beta_eff: float, K: int) -> np.ndarray:
    """Eigenvalues of ``S_K`` on a diagonal spectrum."""
    coeffs = bessel_coefficients(K, beta_eff)
    table = chebyshev_table(K, lam)
    out = coeffs[0] * table[0]
    for k in range(1, K + 1):
        out = out + 2.0 * (-1) ** k * coeffs[k] * table[k]
    return out


def truncation_error(model: MrfModel, beta: float, K: int, cap: int = DEFAULT_ENUM_CAP) -> float:
    """Trace-norm distance ``||S_K - exp(-beta_eff H)||_1``."""
    lam = spectrum(model, cap).eigenvalues
    beta_eff = beta * model.scale
    return _fsum(np.abs(sk_eigenvalues(lam, beta_eff, K) - np.exp(-beta_eff * lam)))
