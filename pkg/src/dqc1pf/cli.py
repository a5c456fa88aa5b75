"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 input-format error, 4 capacity error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Sequence

from . import __version__
from .chebyshev import sample_budget, truncation_order
from .errors import CapacityError, ModelFormatError
from .estimator import (
    CSV_COLUMNS,
    EstimatorConfig,
    cell_model,
    cell_tasks,
    estimate_partition,
    report_json,
    run_tasks,
    summarize,
)
from .lcu import DEFAULT_ENUM_CAP, decompose, dump_lcu
from .mrf import load_model, normalize, random_model, serialize_model
from .oracle import exact_chis, exact_partition, exact_sk_trace, truncation_error
from .statevector import (
    RegisterLayout,
    StateVector,
    WalkContext,
    dump_state,
    reduced_operator,
)

EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_CAPACITY = 4

DESK_MAX_SHOTS = 10**5
DESK_MAX_SIZE = 4
CSV_SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunManifest:
    command: str
    params: dict
    tool_version: str
    seed: int | None
    outputs: tuple[str, ...]

    @property
    def digest(self) -> str:
        doc = {"command": self.command, "params": self.params, "tool_version": self.tool_version}
        text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def to_json(self) -> str:
        doc = {**asdict(self), "outputs": list(self.outputs), "config_hash": self.digest}
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _int_list(text: str) -> list[int]:
    try:
        values = [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("values must be positive")
    return values


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _add_estimator_flags(p: argparse.ArgumentParser, shots_default: int | None = None) -> None:
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--eps-abs", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--mode", choices=["analytic", "reduced", "basis-sampled", "purified"], default="reduced")
    p.add_argument("--log-mode", choices=["natural", "base10"], default="natural")
    p.add_argument("--k-mode", choices=["ceil", "table"], default="ceil")
    p.add_argument("--split", choices=["even", "weighted"], default="even")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--cap", type=int, default=DEFAULT_ENUM_CAP, help="oracle enumeration cap")


def _add_output_flags(p: argparse.ArgumentParser, fmt_default: str = "csv") -> None:
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=["csv", "json"], default=fmt_default)


def _config(args: argparse.Namespace, **overrides) -> EstimatorConfig:
    return EstimatorConfig(
        beta=args.beta,
        eps_abs=args.eps_abs,
        delta=args.delta,
        mode=args.mode.replace("-", "_"),
        log_mode=args.log_mode,
        k_mode=args.k_mode,
        seed=args.seed,
        split=args.split,
        oracle_cap=args.cap,
        **overrides,
    )


def _csv_text(schema: str, manifest: str | None, header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    tag = f"# schema={schema}/{CSV_SCHEMA_VERSION}"
    if manifest is not None:
        tag += f" manifest={manifest}"
    buf.write(tag + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _params(args: argparse.Namespace) -> dict:
    skip = {"func", "out", "workers"}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args: argparse.Namespace, render) -> None:
    """Write ``render(manifest_hash)`` to --out (plus a manifest) or to stdout."""
    if args.out is None:
        sys.stdout.write(render(None))
        return
    manifest = RunManifest(
        command=args.command,
        params=_params(args),
        tool_version=__version__,
        seed=getattr(args, "seed", None),
        outputs=(str(args.out),),
    )
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(render(manifest.digest), encoding="utf-8", newline="\n")
    Path(str(args.out) + ".manifest.json").write_text(manifest.to_json(), encoding="utf-8", newline="\n")
    print(args.out)


def _desk_check(args: argparse.Namespace, sizes: Sequence[int], shots: Sequence[int]) -> None:
    if args.full:
        return
    if max(shots) > DESK_MAX_SHOTS:
        raise UsageError(f"shots above {DESK_MAX_SHOTS} need --full")
    if max(sizes) > DESK_MAX_SIZE:
        raise UsageError(f"sizes above {DESK_MAX_SIZE} need --full")


# -- commands -------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> None:
    if args.m_equals_n:
        model = cell_model(args.n, args.seed, args.graph, True)
    else:
        model = random_model(args.n, args.seed, args.density)
    _emit(args, lambda _: serialize_model(model))


def cmd_validate(args: argparse.Namespace) -> None:
    model = load_model(args.model)
    lcu = decompose(normalize(model))
    print(f"n={model.n} entries={len(model.theta)} nodes={len(model.nodes)} edges={len(model.edges)}")
    print(f"sum_abs_theta={model.l1!r} lcu_terms={lcu.raw_terms} m={lcu.m} m_prime={lcu.m_prime}")


def cmd_exact(args: argparse.Namespace) -> None:
    model = normalize(load_model(args.model))
    z = exact_partition(model, args.beta, args.cap)
    print(f"{z:.17g}")


def cmd_estimate(args: argparse.Namespace) -> None:
    model = load_model(args.model)
    config = _config(args, K_override=args.order, Q_override=args.shots)
    report = estimate_partition(model, config)

    def render(manifest: str | None) -> str:
        if args.format == "json":
            return report_json(report, manifest, args.timing)
        return _csv_text("estimate", manifest, CSV_COLUMNS, [report.csv_row(args.timing)])

    _emit(args, render)


def cmd_lcu(args: argparse.Namespace) -> None:
    lcu = decompose(normalize(load_model(args.model)))
    _emit(args, lambda _: dump_lcu(lcu))


def budget_rows(n: int, m_prime: int, eps: float, delta: float, order: int | None) -> list[list]:
    rows = []
    for log_mode in ("natural", "base10"):
        for k_mode in ("ceil", "table"):
            k_th = truncation_order(m_prime - 1, eps, k_mode)
            k_used = order if order is not None else k_th
            q = sample_budget(n, m_prime, k_used, delta, eps, log_mode)
            rows.append([n, m_prime, eps, delta, log_mode, k_mode, k_th, k_used, q])
    return rows


BUDGET_COLUMNS = ["n", "m_prime", "eps_abs", "delta", "log_mode", "k_mode", "K_th", "K_used", "Q"]


def cmd_budget(args: argparse.Namespace) -> None:
    sizes = args.n
    rows = []
    for n in sizes:
        m_prime = args.m_prime if args.m_prime is not None else n + 1
        rows.extend(budget_rows(n, m_prime, args.eps_abs, args.delta, args.order))
    _emit(args, lambda manifest: _csv_text("budget", manifest, BUDGET_COLUMNS, rows))


def _grid(args: argparse.Namespace, sizes, columns, shots_of, order_of) -> dict[tuple[int, int], float]:
    config = _config(args)
    keys, tasks = [], []
    for n in sizes:
        for col in columns:
            cell = cell_tasks(n, shots_of(col), order_of(col), args.graphs, args.seeds, config, args.m_equals_n)
            keys.append((n, col, len(cell)))
            tasks.extend(cell)
    errors = run_tasks(tasks, args.workers)
    out, pos = {}, 0
    for n, col, size in keys:
        out[(n, col)] = summarize(n, shots_of(col), order_of(col), errors[pos : pos + size]).mean_rel_error_pct
        pos += size
    return out


def _lcu_width(args: argparse.Namespace, n: int) -> int:
    return decompose(cell_model(n, args.seed, 0, args.m_equals_n)).m


def cmd_table1(args: argparse.Namespace) -> None:
    _desk_check(args, args.sizes, args.shots_list)
    grid = _grid(args, args.sizes, args.shots_list, lambda q: q, lambda _: args.order)
    header = ["n", "m", "m_prime", "Q_th"] + [f"err_pct_Q{q}" for q in args.shots_list]
    rows = []
    for n in args.sizes:
        q_th = sample_budget(n, n + 1, args.order, args.delta, args.eps_abs, args.log_mode)
        m = _lcu_width(args, n)
        rows.append([n, m, m + 1, q_th] + [f"{grid[(n, q)]:.6f}" for q in args.shots_list])
    _emit(args, lambda manifest: _render_table(args, "table1", manifest, header, rows))


def cmd_table2(args: argparse.Namespace) -> None:
    _desk_check(args, args.sizes, [args.shots])
    grid = _grid(args, args.sizes, args.orders, lambda _: args.shots, lambda k: k)
    header = ["n", "m", "m_prime", "K_th"] + [f"err_pct_K{k}" for k in args.orders]
    rows = []
    for n in args.sizes:
        k_th = truncation_order(n, args.eps_abs, args.k_mode)
        m = _lcu_width(args, n)
        rows.append([n, m, m + 1, k_th] + [f"{grid[(n, k)]:.6f}" for k in args.orders])
    _emit(args, lambda manifest: _render_table(args, "table2", manifest, header, rows))


def _render_table(args, schema: str, manifest: str | None, header, rows) -> str:
    if args.format == "json":
        doc = {"schema": f"{schema}/{CSV_SCHEMA_VERSION}", "manifest": manifest,
               "rows": [dict(zip(header, r)) for r in rows]}
        return json.dumps(doc, indent=1) + "\n"
    return _csv_text(schema, manifest, header, rows)


def cmd_golden(args: argparse.Namespace) -> None:
    model = normalize(load_model(args.model))
    chis = exact_chis(model, args.order)
    doc = {
        "model": serialize_model(model).strip(),
        "beta": args.beta,
        "z_exact": exact_partition(model, args.beta),
        "chi": [float(c) for c in chis],
        "sk_trace": {str(k): exact_sk_trace(model, args.beta, k) for k in range(args.order + 1)},
        "truncation_error": {str(k): truncation_error(model, args.beta, k) for k in range(args.order + 1)},
    }
    _emit(args, lambda _: json.dumps(doc, indent=1) + "\n")


def cmd_dump_state(args: argparse.Namespace) -> None:
    model = normalize(load_model(args.model))
    ctx = WalkContext.from_lcu(decompose(model))
    layout = RegisterLayout(model.n, ctx.lcu.m)
    state = StateVector.basis(layout, args.basis)
    view = state.work_view()
    view[...] = reduced_operator(ctx, args.k)(view)
    _emit(args, lambda _: dump_state(state))


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dqc1pf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random model file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--density", type=float, default=1.0)
    p.add_argument("--m-equals-n", action="store_true", help="thin edges so the LCU fits m = n")
    p.add_argument("--graph", type=int, default=0, help="graph index used with --m-equals-n")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="check a model file and print its summary")
    p.add_argument("--model", type=Path, required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("exact", help="exact partition function by enumeration")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--cap", type=int, default=DEFAULT_ENUM_CAP)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("estimate", help="DQC1 estimate of the partition function")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--order", type=int, help="truncation order K (default: from eps-abs)")
    p.add_argument("--shots", type=int, help="total shot budget Q (default: from eps-abs, delta)")
    p.add_argument("--timing", action="store_true", help="include wall times (breaks byte-stability)")
    _add_estimator_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("lcu", help="dump the signed Z-string decomposition")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_lcu)

    p = sub.add_parser("budget", help="truncation order and shot budget under all flag variants")
    p.add_argument("--n", type=_int_list, required=True, help="system size(s), comma separated")
    p.add_argument("--m-prime", type=int, help="index register width m' (default n + 1)")
    p.add_argument("--eps-abs", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--order", type=int, help="K used in the shot budget (default: K_th of the row)")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_budget)

    for name, helptext in (("table1", "error versus shot budget Q"), ("table2", "error versus order K")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--sizes", type=_int_list, default=[2, 3, 4])
        p.add_argument("--graphs", type=int, default=10)
        p.add_argument("--seeds", type=int, default=1)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--m-equals-n", action="store_true")
        p.add_argument("--full", action="store_true", help="lift the desk-scale caps")
        _add_estimator_flags(p)
        p.set_defaults(log_mode="base10", k_mode="table")
        _add_output_flags(p)
        if name == "table1":
            p.add_argument("--shots", dest="shots_list", type=_int_list, default=[10**3, 10**4, 10**5])
            p.add_argument("--order", type=int, default=3)
            p.set_defaults(func=cmd_table1)
        else:
            p.add_argument("--orders", type=_int_list, default=[1, 2, 3, 4, 5])
            p.add_argument("--shots", type=int, default=10**5)
            p.set_defaults(func=cmd_table2)

    p = sub.add_parser("golden", help="exact oracle values for fixture files")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--order", type=int, default=5)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_golden)

    p = sub.add_parser("dump-state", help="nonzero amplitudes of P'^dag W^k P' |x, 0>")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--basis", type=int, default=0, help="basis index of the (system, index) registers")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_dump_state)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelFormatError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0
