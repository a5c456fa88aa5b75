"""DQC1 estimation of Chebyshev traces and the partition function.

Sampling modes differ in how the maximally mixed register is realised:

``reduced``
    only the system register is mixed; the index register starts in ``|0>``.
    Expectation of the clean-qubit bias is ``chi_k / 2^n``.
``basis_sampled``
    a uniform basis state of all ``n + 2m'`` work qubits per shot, running
    the paired ``U_k``. Bias expectation ``chi_k / 2^(n+m')``.
``purified``
    the full ``2(n + 2m') + 1``-qubit circuit with CNOT purification; one
    exact clean-qubit probability shared by all shots.
``analytic``
    no shots; the exact projected trace.

Every shot is one Bernoulli draw against the exact clean-qubit probability of
its circuit. Probabilities are memoised per distinct initial basis state.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Literal, Sequence

import numpy as np

from .chebyshev import ChebyshevBudget, KMode, LogMode, assemble_trace, make_budget
from .errors import CapacityError
from .lcu import DEFAULT_ENUM_CAP, decompose
from .mrf import MrfModel, normalize, random_model, serialize_model
from .oracle import exact_partition
from .rng import derive_seed, raw_words, shot_stream
from .statevector import (
    DEFAULT_CAPACITY,
    RegisterLayout,
    WalkContext,
    hadamard_test_p0,
    projected_chi,
    purification_prep,
    reduced_operator,
    uk_operator,
)

Mode = Literal["analytic", "reduced", "basis_sampled", "purified"]
MODES: tuple[str, ...] = ("analytic", "reduced", "basis_sampled", "purified")

_U_BITS = 38
_U_MASK = (1 << _U_BITS) - 1
_BATCH_AMPS = 1 << 20


@dataclass(frozen=True)
class EstimatorConfig:
    beta: float = 1.0
    eps_abs: float = 0.1
    delta: float = 0.1
    K_override: int | None = None
    Q_override: int | None = None
    mode: Mode = "reduced"
    log_mode: LogMode = "natural"
    k_mode: KMode = "ceil"
    seed: int = 0
    split: Literal["even", "weighted"] = "even"
    oracle_cap: int = DEFAULT_ENUM_CAP
    capacity: int = DEFAULT_CAPACITY

    def __post_init__(self) -> None:
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if not (0 < self.eps_abs < 1 and 0 < self.delta < 1):
            raise ValueError("eps_abs and delta must lie in (0, 1)")
        for name in ("K_override", "Q_override"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.split not in ("even", "weighted"):
            raise ValueError(f"unknown split {self.split!r}")


@dataclass(frozen=True)
class ChiEstimate:
    k: int
    value: float
    stderr: float
    shots_used: int
    mode: str
    zeros: int = 0


@dataclass
class EstimateReport:
    model_digest: str
    n: int
    m: int
    m_prime: int
    config: EstimatorConfig
    K: int
    Q: int
    beta_eff: float
    chi: list[ChiEstimate]
    z_hat: float
    z_exact: float | None
    rel_error: float | None
    wall_time: dict[str, float] = field(default_factory=dict)

    def to_dict(self, timing: bool = False) -> dict:
        doc = {
            "model_digest": self.model_digest,
            "n": self.n,
            "m": self.m,
            "m_prime": self.m_prime,
            "config": asdict(self.config),
            "K": self.K,
            "Q": self.Q,
            "beta_eff": self.beta_eff,
            "chi": [asdict(c) for c in self.chi],
            "z_hat": self.z_hat,
            "z_exact": self.z_exact,
            "rel_error": self.rel_error,
        }
        if timing:
            doc["wall_time"] = self.wall_time
        return doc

    def csv_row(self, timing: bool = False) -> list[str]:
        wall = f"{1000 * sum(self.wall_time.values()):.3f}" if timing else ""
        return [
            str(self.n),
            str(self.m),
            str(self.m_prime),
            str(self.K),
            str(self.Q),
            self.config.mode,
            str(self.config.seed),
            repr(self.z_hat),
            "" if self.z_exact is None else repr(self.z_exact),
            "" if self.rel_error is None else repr(100 * self.rel_error),
            wall,
        ]


CSV_COLUMNS = ["n", "m", "m_prime", "K", "Q", "mode", "seed", "z_hat", "z_exact", "rel_error_pct", "wall_ms"]


def model_digest(model: MrfModel) -> str:
    text = serialize_model(model) + f"scale={model.scale!r}"
    return hashlib.sha256(text.encode()).hexdigest()[:16]


# -- per-k estimation ----------------------------------------------------------


def _sampling_circuit(ctx: WalkContext, k: int, mode: str):
    """Layout, operator and trace-dimension factor for a sampling mode."""
    if mode == "reduced":
        layout = RegisterLayout(ctx.n, ctx.lcu.m, clean=True)
        return layout, reduced_operator(ctx, k), ctx.n, ctx.n
    if mode in ("basis_sampled", "purified"):
        layout = RegisterLayout(
            ctx.n, ctx.lcu.m, pairing="purified", clean=True, mixed_ancillas=(mode == "purified")
        )
        q = ctx.n + 2 * ctx.m_prime
        return layout, uk_operator(ctx, k), q, ctx.n + ctx.m_prime
    raise ValueError(f"{mode!r} is not a sampling mode")


def _p0_table(layout, op, basis: np.ndarray, capacity: int) -> np.ndarray:
    batch = max(1, _BATCH_AMPS >> layout.total_qubits)
    out = np.empty(basis.size)
    for start in range(0, basis.size, batch):
        chunk = basis[start : start + batch]
        out[start : start + chunk.size] = hadamard_test_p0(layout, op, chunk, capacity=capacity)
    return out


def shot_p0(ctx: WalkContext, k: int, mode: str, basis: int, capacity: int = DEFAULT_CAPACITY) -> float:
    """Exact clean-qubit probability for one shot's circuit."""
    layout, op, _, _ = _sampling_circuit(ctx, k, mode)
    if mode == "purified":
        return hadamard_test_p0(layout, op, 0, prepare=purification_prep(layout), capacity=capacity)
    return hadamard_test_p0(layout, op, basis, capacity=capacity)


def estimate_chi(
    ctx: WalkContext,
    k: int,
    shots: int,
    mode: str,
    stream: np.random.Generator | None = None,
    capacity: int = DEFAULT_CAPACITY,
) -> ChiEstimate:
    """Estimate ``chi_k = Re Tr T_k(H)`` with ``shots`` clean-qubit measurements."""
    if mode == "analytic":
        return ChiEstimate(k, projected_chi(ctx, k, capacity), 0.0, 0, mode)
    if shots < 1:
        raise ValueError("sampling modes need at least one shot")
    if stream is None:
        raise ValueError("sampling modes need a random stream")
    layout, op, q, trace_bits = _sampling_circuit(ctx, k, mode)
    layout.check_capacity(capacity)
    if mode == "purified":
        p0_fixed = hadamard_test_p0(layout, op, 0, prepare=purification_prep(layout), capacity=capacity)
    memo: dict[int, float] = {}
    zeros = 0
    for words in raw_words(stream, shots):
        u = (words & np.uint64(_U_MASK)).astype(np.float64) * (1.0 / (1 << _U_BITS))
        if mode == "purified":
            p0 = np.full(words.size, p0_fixed)
        else:
            basis = (words >> np.uint64(64 - q)).astype(np.int64)
            uniq, inverse = np.unique(basis, return_inverse=True)
            missing = np.array([b for b in uniq.tolist() if b not in memo], dtype=np.int64)
            if missing.size:
                memo.update(zip(missing.tolist(), _p0_table(layout, op, missing, capacity).tolist()))
            p0 = np.array([memo[b] for b in uniq.tolist()])[inverse]
        zeros += int(np.count_nonzero(u < p0))
    ones = shots - zeros
    d = (zeros - ones) / shots
    factor = float(1 << trace_bits)
    stderr = factor * math.sqrt(max(0.0, 1.0 - d * d) / shots)
    return ChiEstimate(k, factor * d, stderr, shots, mode, zeros)


def split_shots(budget: ChebyshevBudget, how: str = "even") -> list[int]:
    """Shots per ``k = 1..K``; the remainder goes to ``k = 1``."""
    K, Q = budget.K, budget.Q
    if K == 0:
        return []
    weights = np.array(budget.bessel[1:], dtype=np.float64)
    if how == "weighted" and weights.sum() > 0:
        shares = [int(Q * w / weights.sum()) for w in weights]
    else:
        shares = [Q // K] * K
    shares[0] += Q - sum(shares)
    return shares


def estimate_partition(
    model: MrfModel, config: EstimatorConfig, graph: int = 0, rep: int = 0
) -> EstimateReport:
    """normalize, decompose, budget, estimate ``chi_1..chi_K``, assemble."""
    times: dict[str, float] = {}
    t0 = time.perf_counter()
    norm = model if model.is_normalized else normalize(model)
    lcu = decompose(norm)
    ctx = WalkContext.from_lcu(lcu)
    beta_eff = config.beta * norm.scale
    budget = make_budget(
        norm.n,
        lcu.m,
        beta_eff,
        config.eps_abs,
        config.delta,
        K=config.K_override,
        Q=config.Q_override,
        k_mode=config.k_mode,
        log_mode=config.log_mode,
    )
    t1 = time.perf_counter()
    times["setup"] = t1 - t0

    shots = split_shots(budget, config.split)
    if config.mode != "analytic" and any(s < 1 for s in shots):
        raise ValueError(f"Q={budget.Q} is too small to give every k = 1..{budget.K} a shot")
    chi = [
        estimate_chi(ctx, k, s, config.mode, shot_stream(config.seed, graph, rep, k), config.capacity)
        for k, s in zip(range(1, budget.K + 1), shots)
    ]
    z_hat = assemble_trace(norm.n, budget, [c.value for c in chi])
    t2 = time.perf_counter()
    times["estimate"] = t2 - t1

    z_exact = rel = None
    if norm.n <= config.oracle_cap:
        z_exact = exact_partition(norm, config.beta, config.oracle_cap)
        rel = abs(z_hat - z_exact) / z_exact
    times["oracle"] = time.perf_counter() - t2

    return EstimateReport(
        model_digest=model_digest(norm),
        n=norm.n,
        m=lcu.m,
        m_prime=lcu.m_prime,
        config=config,
        K=budget.K,
        Q=budget.Q,
        beta_eff=beta_eff,
        chi=chi,
        z_hat=z_hat,
        z_exact=z_exact,
        rel_error=rel,
        wall_time=times,
    )


# -- experiment cells ----------------------------------------------------------


def fit_index_width(model: MrfModel, m: int, seed: int) -> MrfModel:
    """Keep every node weight and a random subset of edges so the LCU has at most ``2^m`` terms."""
    room = (1 << m) - 2 * len(model.nodes)
    if room < 0:
        raise ValueError(f"{len(model.nodes)} node terms do not fit in m={m}")
    edges = model.edges
    order = np.random.default_rng(derive_seed(seed, 0x6D3D6E)).permutation(len(edges))
    theta = {(i, i): v for i, v in model.nodes}
    for idx in order[: room // 4]:
        i, j, v = edges[idx]
        theta[(i, j)] = v
    return MrfModel(model.n, normalize(MrfModel(model.n, theta)).theta)


def cell_model(n: int, seed: int, graph: int, m_equals_n: bool = False) -> MrfModel:
    """Random complete-graph instance ``graph`` of a cell."""
    gseed = derive_seed(seed, n, graph)
    model = random_model(n, gseed, 1.0)
    if m_equals_n:
        model = fit_index_width(model, n, gseed)
    return model


@dataclass(frozen=True)
class CellTask:
    n: int
    graph: int
    rep: int
    config: EstimatorConfig
    m_equals_n: bool = False


def run_task(task: CellTask) -> float:
    model = cell_model(task.n, task.config.seed, task.graph, task.m_equals_n)
    report = estimate_partition(model, task.config, graph=task.graph, rep=task.rep)
    assert report.rel_error is not None
    return report.rel_error


def run_tasks(tasks: Sequence[CellTask], workers: int = 1) -> list[float]:
    """Relative errors in task order; identical for any worker count."""
    if workers <= 1:
        return [run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


@dataclass(frozen=True)
class CellSummary:
    n: int
    Q: int
    K: int
    mean_rel_error_pct: float
    rel_errors: tuple[float, ...]


def cell_tasks(
    n: int, Q: int, K: int, graphs: int, seeds: int, config: EstimatorConfig, m_equals_n: bool = False
) -> list[CellTask]:
    if min(n, Q, K, graphs, seeds) < 1:
        raise ValueError("cell parameters must be positive")
    cfg = replace(config, K_override=K, Q_override=Q)
    return [CellTask(n, g, r, cfg, m_equals_n) for g in range(graphs) for r in range(seeds)]


def summarize(n: int, Q: int, K: int, errors: Iterable[float]) -> CellSummary:
    errs = tuple(errors)
    return CellSummary(n, Q, K, 100.0 * math.fsum(errs) / len(errs), errs)


def run_cell(
    n: int,
    Q: int,
    K: int,
    graphs: int,
    seeds: int,
    config: EstimatorConfig,
    m_equals_n: bool = False,
    workers: int = 1,
) -> CellSummary:
    """Mean relative error (percent) over ``graphs`` random models times ``seeds`` repetitions."""
    tasks = cell_tasks(n, Q, K, graphs, seeds, config, m_equals_n)
    return summarize(n, Q, K, run_tasks(tasks, workers))


def report_json(report: EstimateReport, manifest: str | None = None, timing: bool = False) -> str:
    doc = report.to_dict(timing)
    if manifest is not None:
        doc = {"manifest": manifest, **doc}
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"
