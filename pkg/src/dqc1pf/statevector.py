"""Dense state-vector simulation of the walk-operator circuits.

Qubit order is ``clean | system (n) | index (m') | paired index (m') | purifiers``
with the clean qubit as qubit 0 and little-endian order inside every register.
The index register holds the LCU label ``l`` in its low ``m`` bits and the
ancilla ``a`` in its top bit. Viewed as a C-ordered tensor the amplitudes have
shape ``(D_pur, D_pair, D_index, D_sys, D_clean)``.

Operator kernels act on arrays whose trailing axes are ``(D_index, D_sys)``
(or ``(D_pair, D_index, D_sys)`` for :func:`uk_operator`); any leading axes
are treated as a batch.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import CapacityError
from .lcu import Lcu, amplitudes, eigen_table

DEFAULT_CAPACITY = 26
_SQRT_HALF = 1.0 / math.sqrt(2.0)
_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) * _SQRT_HALF

Operator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RegisterLayout:
    n: int
    m: int
    has_a: bool = True
    pairing: Literal["none", "purified"] = "none"
    clean: bool = False
    mixed_ancillas: bool = False

    def __post_init__(self) -> None:
        if not self.has_a:
            raise ValueError("the walk operator needs the extra ancilla a (m' = m + 1)")
        if self.pairing not in ("none", "purified"):
            raise ValueError(f"unknown pairing {self.pairing!r}")

    @property
    def m_prime(self) -> int:
        return self.m + 1

    @property
    def mixed_qubits(self) -> int:
        """Qubits of the work register that the DQC1 model treats as maximally mixed."""
        return self.n + self.m_prime * (2 if self.pairing == "purified" else 1)

    @property
    def total_qubits(self) -> int:
        q = self.mixed_qubits
        return q + (q if self.mixed_ancillas else 0) + (1 if self.clean else 0)

    @property
    def shape(self) -> tuple[int, int, int, int, int]:
        return (
            1 << self.mixed_qubits if self.mixed_ancillas else 1,
            1 << self.m_prime if self.pairing == "purified" else 1,
            1 << self.m_prime,
            1 << self.n,
            2 if self.clean else 1,
        )

    def check_capacity(self, capacity: int = DEFAULT_CAPACITY) -> None:
        if self.total_qubits > capacity:
            raise CapacityError(f"{self.total_qubits} qubits exceed state-vector capacity {capacity}")


@dataclass
class StateVector:
    layout: RegisterLayout
    amps: np.ndarray

    def __post_init__(self) -> None:
        if self.amps.shape != (1 << self.layout.total_qubits,):
            raise ValueError("amplitude vector does not match layout")

    @classmethod
    def zero(cls, layout: RegisterLayout, capacity: int = DEFAULT_CAPACITY) -> StateVector:
        return cls.basis(layout, 0, capacity)

    @classmethod
    def basis(cls, layout: RegisterLayout, index: int, capacity: int = DEFAULT_CAPACITY) -> StateVector:
        layout.check_capacity(capacity)
        amps = np.zeros(1 << layout.total_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(layout, amps)

    def tensor(self) -> np.ndarray:
        return self.amps.reshape(self.layout.shape)

    def work_view(self) -> np.ndarray:
        """View with the clean axis moved first: ``(D_clean, D_pur, D_pair, D_index, D_sys)``."""
        return np.moveaxis(self.tensor(), -1, 0)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> StateVector:
        return StateVector(self.layout, self.amps.copy())


@dataclass(frozen=True)
class WalkContext:
    """Precomputed oracle data for one LCU.

    ``select_diag[j, x]`` is the eigenvalue of ``S'`` on ``|x, j>``; rows with
    ``a = 1`` hold the ``S^dagger`` branch. ``householder`` is the unit vector
    ``u`` with ``(I - 2uu^T)|0> = |P'>``, used as the unitary completion of the
    prepare oracle.
    """

    lcu: Lcu
    prep_amps: np.ndarray
    select_diag: np.ndarray
    householder: np.ndarray | None

    @classmethod
    def from_lcu(cls, lcu: Lcu) -> WalkContext:
        prep = np.concatenate([amplitudes(lcu), amplitudes(lcu)]) * _SQRT_HALF
        eig = eigen_table(lcu).astype(np.complex128)
        select = np.concatenate([eig, np.conj(eig)], axis=0)
        diff = -prep.copy()
        diff[0] += 1.0
        norm = np.linalg.norm(diff)
        u = None if norm < 1e-15 else diff / norm
        return cls(lcu, prep, select, u)

    @property
    def n(self) -> int:
        return self.lcu.n

    @property
    def m_prime(self) -> int:
        return self.lcu.m_prime


# -- kernels on (..., D_index, D_sys) arrays -----------------------------------


def _select(psi: np.ndarray, ctx: WalkContext) -> np.ndarray:
    return psi * ctx.select_diag


def _flip_a(psi: np.ndarray, m: int) -> np.ndarray:
    lead = psi.shape[:-2]
    split = psi.reshape(lead + (2, 1 << m, psi.shape[-1]))
    return split[..., ::-1, :, :].reshape(psi.shape)


def _overlap(v: np.ndarray, psi: np.ndarray) -> np.ndarray:
    # contraction over the index axis; matmul avoids tensordot's transposes
    return v.astype(psi.dtype) @ psi


def _reflect(psi: np.ndarray, v: np.ndarray) -> np.ndarray:
    return 2.0 * v[:, None] * _overlap(v, psi)[..., None, :] - psi


def _prepare(psi: np.ndarray, ctx: WalkContext) -> np.ndarray:
    if ctx.householder is None:
        return psi
    u = ctx.householder
    return psi - 2.0 * u[:, None] * _overlap(u, psi)[..., None, :]


def _walk(psi: np.ndarray, ctx: WalkContext, k: int) -> np.ndarray:
    m = ctx.lcu.m
    for _ in range(k):
        psi = _reflect(_flip_a(_select(psi, ctx), m), ctx.prep_amps)
    return psi


def _pair(psi: np.ndarray) -> np.ndarray:
    """CNOT from every index qubit onto its partner: ``|j, j2> -> |j, j2 ^ j>``."""
    d_pair, d_index = psi.shape[-3], psi.shape[-2]
    j = np.arange(d_index)[None, :]
    src = np.arange(d_pair)[:, None] ^ j
    return psi[..., src, j, :]


def reduced_operator(ctx: WalkContext, k: int) -> Operator:
    """``P'^dagger W^k P'`` on the (system, index) registers."""

    def op(psi: np.ndarray) -> np.ndarray:
        return _prepare(_walk(_prepare(psi, ctx), ctx, k), ctx)

    return op


def uk_operator(ctx: WalkContext, k: int) -> Operator:
    """``U_k``: index pairing, then ``P'^dagger W^k P'`` on (system, first index)."""
    inner = reduced_operator(ctx, k)

    def op(psi: np.ndarray) -> np.ndarray:
        return inner(_pair(psi))

    return op


# -- primitives on StateVector -------------------------------------------------


def _check_ctx(state: StateVector, ctx: WalkContext) -> None:
    if (state.layout.n, state.layout.m) != (ctx.lcu.n, ctx.lcu.m):
        raise ValueError("layout does not match the walk context")


def _apply_work(state: StateVector, fn: Operator) -> StateVector:
    out = state.copy()
    view = out.work_view()
    view[...] = fn(view)
    return out


def prepare_Pprime(state: StateVector, ctx: WalkContext) -> StateVector:
    """Inject ``|P'>`` into an index register that is in ``|0>``."""
    _check_ctx(state, ctx)
    view = state.work_view()
    if np.any(view[..., 1:, :] != 0):
        raise ValueError("index register is not in the all-zero state")
    out = state.copy()
    out_view = out.work_view()
    out_view[...] = view[..., :1, :] * ctx.prep_amps[:, None]
    return out


def apply_select(state: StateVector, ctx: WalkContext) -> StateVector:
    _check_ctx(state, ctx)
    return _apply_work(state, lambda psi: _select(psi, ctx))


def apply_walk(state: StateVector, ctx: WalkContext, k: int = 1) -> StateVector:
    """``k`` applications of ``W_H = (2|P'><P'| - I) X_a S'``."""
    _check_ctx(state, ctx)
    if k < 0:
        raise ValueError("k must be non-negative")
    return _apply_work(state, lambda psi: _walk(psi, ctx, k))


def apply_Uk(state: StateVector, ctx: WalkContext, k: int) -> StateVector:
    _check_ctx(state, ctx)
    if state.layout.pairing != "purified":
        raise ValueError("U_k needs the paired index register")
    return _apply_work(state, uk_operator(ctx, k))


def projected_chi(ctx: WalkContext, k: int, capacity: int = DEFAULT_CAPACITY) -> float:
    """``Re sum_x <x, P'| W^k |x, P'>``, all system basis states propagated together."""
    if k < 0:
        raise ValueError("k must be non-negative")
    RegisterLayout(ctx.n, ctx.lcu.m).check_capacity(capacity)
    psi = np.repeat(ctx.prep_amps.astype(np.complex128)[:, None], 1 << ctx.n, axis=1)
    psi = _walk(psi, ctx, k)
    per_x = (ctx.prep_amps @ psi).real
    return math.fsum(per_x.tolist())


def walk_matrix(ctx: WalkContext) -> np.ndarray:
    """Dense ``W_H`` on (system, index); row/column index ``x + 2^n j``."""
    dim = (1 << ctx.m_prime) * (1 << ctx.n)
    basis = np.eye(dim, dtype=np.complex128).reshape(dim, 1 << ctx.m_prime, 1 << ctx.n)
    return _walk(basis, ctx, 1).reshape(dim, dim).T


def operator_matrix(op: Operator, dims: tuple[int, ...]) -> np.ndarray:
    """Dense matrix of a kernel operator on trailing axes ``dims``."""
    dim = int(np.prod(dims))
    basis = np.eye(dim, dtype=np.complex128).reshape((dim,) + dims)
    return op(basis).reshape(dim, dim).T


# -- generic gates on batched flat vectors (B, 2^N) ---------------------------


def apply_1q(psi: np.ndarray, gate: np.ndarray, qubit: int) -> np.ndarray:
    b, dim = psi.shape
    view = psi.reshape(b, dim >> (qubit + 1), 2, 1 << qubit)
    return np.einsum("ab,nibj->niaj", gate, view).reshape(b, dim)


def apply_cx(psi: np.ndarray, control: int, target: int) -> np.ndarray:
    dim = psi.shape[1]
    idx = np.arange(dim, dtype=np.int64)
    src = idx ^ (((idx >> control) & 1) << target)
    return psi[:, src]


def purification_prep(layout: RegisterLayout) -> Callable[[np.ndarray], np.ndarray]:
    """Maximally mix the work register: ``H`` on each work qubit, then CNOT onto its purifier."""
    if not layout.mixed_ancillas:
        raise ValueError("layout has no purification register")
    offset = 1 if layout.clean else 0
    q = layout.mixed_qubits

    def prep(psi: np.ndarray) -> np.ndarray:
        for i in range(q):
            psi = apply_1q(psi, _HADAMARD, offset + i)
            psi = apply_cx(psi, offset + i, offset + q + i)
        return psi

    return prep


def hadamard_test_p0(
    layout: RegisterLayout,
    controlled_op: Operator,
    initial_basis: int | np.ndarray = 0,
    prepare: Callable[[np.ndarray], np.ndarray] | None = None,
    capacity: int = DEFAULT_CAPACITY,
) -> float | np.ndarray:
    """Probability of reading 0 on the clean qubit after ``H - controlled op - H``.

    ``initial_basis`` indexes the non-clean qubits (one index or a batch).
    ``controlled_op`` acts on the work tensor ``(..., D_pair, D_index, D_sys)``
    and is applied to the clean = 1 branch only. ``prepare`` optionally maps
    the batch of initial states before the first Hadamard.
    """
    if not layout.clean:
        raise ValueError("layout has no clean qubit")
    layout.check_capacity(capacity)
    scalar = np.isscalar(initial_basis)
    basis = np.atleast_1d(np.asarray(initial_basis, dtype=np.int64))
    dim = 1 << layout.total_qubits
    psi = np.zeros((basis.size, dim), dtype=np.complex128)
    psi[np.arange(basis.size), 2 * basis] = 1.0
    if prepare is not None:
        psi = prepare(psi)
    psi = apply_1q(psi, _HADAMARD, 0)
    view = psi.reshape((basis.size,) + layout.shape)
    view[..., 1] = controlled_op(view[..., 1])
    psi = apply_1q(psi, _HADAMARD, 0)
    p0 = np.sum(np.abs(psi.reshape(basis.size, -1, 2)[..., 0]) ** 2, axis=1)
    p0 = np.clip(p0, 0.0, 1.0)
    return float(p0[0]) if scalar else p0


def nonzero_amplitudes(state: StateVector, tol: float = 0.0) -> list[dict]:
    out = []
    for idx in np.flatnonzero(np.abs(state.amps) > tol):
        a = state.amps[idx]
        out.append({"index": int(idx), "re": float(a.real), "im": float(a.imag)})
    return out


def dump_state(state: StateVector, tol: float = 1e-15) -> str:
    doc = {
        "layout": {
            "n": state.layout.n,
            "m": state.layout.m,
            "pairing": state.layout.pairing,
            "clean": state.layout.clean,
            "total_qubits": state.layout.total_qubits,
        },
        "amplitudes": nonzero_amplitudes(state, tol),
    }
    return json.dumps(doc, indent=1) + "\n"
