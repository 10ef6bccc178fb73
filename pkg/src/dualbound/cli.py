"""Command-line entry point for verification jobs.

Subcommands: verify, bound, ratio, compare, sweep. Results are written as
CSV or JSON records with a fixed column set; wall_time_s is the only
nondeterministic column, everything else is reproducible given the seeds.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .datasets import DatasetError, load_dataset
from .network import ModelFormatError, load_network
from .propagation import GradientUnder, MonteCarloUnder, PropagationConfig
from .relaxation import Strategy
from .verifier import certified_lower_bound, compare_strategies, verify_robust

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_FILE = 3
EXIT_DATASET = 4

COLUMNS = ["input_id", "strategy", "under_method", "eps_or_bound", "status",
           "margins_min", "wall_time_s"]

_STRATEGIES = {s.value: s for s in Strategy}


class UsageError(ValueError):
    pass


def parse_under(spec: str):
    """Parse an under-method flag: none, mc:N:seed=S, or grad:A."""
    if spec == "none":
        return None
    parts = spec.split(":")
    if parts[0] == "mc":
        if len(parts) != 3 or not parts[2].startswith("seed="):
            raise UsageError(f"bad --under value {spec!r}, expected mc:N:seed=S")
        return MonteCarloUnder(n=int(parts[1]), seed=int(parts[2][5:]))
    if parts[0] == "grad":
        if len(parts) != 2:
            raise UsageError(f"bad --under value {spec!r}, expected grad:A")
        return GradientUnder(step_fraction=float(parts[1]))
    raise UsageError(f"bad --under value {spec!r}")


def parse_config(strategy: str, under: str) -> PropagationConfig:
    if strategy not in _STRATEGIES:
        raise UsageError(f"unknown strategy {strategy!r}")
    try:
        return PropagationConfig(strategy=_STRATEGIES[strategy], under=parse_under(under))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def parse_eps_range(spec: str) -> list[float]:
    try:
        lo, hi, step = (float(v) for v in spec.split(":"))
    except ValueError:
        raise UsageError(f"bad --eps-range {spec!r}, expected lo:hi:step") from None
    if step <= 0 or hi < lo:
        raise UsageError(f"bad --eps-range {spec!r}")
    out = []
    v = lo
    while v <= hi + 1e-12:
        out.append(round(v, 12))
        v += step
    return out


def _resolve_inputs(args) -> list[tuple[np.ndarray, int | None]]:
    """Inputs from --dataset and/or --input (idx:K, file:path, or a CSV vector)."""
    dataset = None
    if args.dataset:
        dataset = load_dataset(args.dataset, limit=args.limit)
    if args.input:
        spec = args.input
        if spec.startswith("idx:"):
            if dataset is None:
                raise UsageError("--input idx:K needs --dataset")
            k = int(spec[4:])
            if not (0 <= k < len(dataset)):
                raise UsageError(f"dataset index {k} out of range")
            return [dataset[k]]
        if spec.startswith("file:"):
            with open(spec[5:]) as fh:
                row = json.load(fh)
            return [(np.asarray(row["input"], dtype=np.float64),
                     int(row["label"]) if "label" in row else None)]
        vec = np.array([float(v) for v in spec.split(",")])
        return [(vec, None)]
    if dataset is None:
        raise UsageError("provide --dataset or --input")
    return dataset


def _write_rows(rows: list[dict], out_path: str | None, fmt: str) -> None:
    if fmt == "json":
        text = json.dumps(rows, indent=2)
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        text = buf.getvalue()
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _row(input_id, cfg: PropagationConfig, eps_or_bound, status, margins_min, wall):
    return {
        "input_id": input_id,
        "strategy": cfg.strategy.value,
        "under_method": cfg.describe_under(),
        "eps_or_bound": repr(float(eps_or_bound)),
        "status": status,
        "margins_min": repr(float(margins_min)) if margins_min is not None else "",
        "wall_time_s": f"{wall:.6f}",
    }


def _verify_one(net, x, eps, cfg):
    outcome = verify_robust(net, x, eps, cfg)
    return outcome.status, outcome.min_margin, outcome.label, outcome.time_s


def _run_parallel(fn, tasks, jobs: int):
    if jobs <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn, *t) for t in tasks]
        return [f.result() for f in futures]


def cmd_verify(args) -> list[dict]:
    net = load_network(args.model)
    cfg = parse_config(args.strategy, args.under)
    inputs = _resolve_inputs(args)
    results = _run_parallel(_verify_one,
                            [(net, x, args.eps, cfg) for x, _ in inputs], args.jobs)
    rows = []
    for idx, ((x, label), (status, min_margin, pred, wall)) in enumerate(zip(inputs, results)):
        if label is not None and pred != label:
            status = "misclassified"
        rows.append(_row(idx, cfg, args.eps, status, min_margin, wall))
    return rows


def _bound_one(net, x, cfg):
    t0 = time.perf_counter()
    cb = certified_lower_bound(net, x, cfg)
    return cb.epsilon, time.perf_counter() - t0


def cmd_bound(args) -> list[dict]:
    net = load_network(args.model)
    cfg = parse_config(args.strategy, args.under)
    inputs = _resolve_inputs(args)
    results = _run_parallel(_bound_one, [(net, x, cfg) for x, _ in inputs], args.jobs)
    return [_row(idx, cfg, eps, "robust" if eps > 0 else "unknown", None, wall)
            for idx, (eps, wall) in enumerate(results)]


def cmd_ratio(args) -> list[dict]:
    net = load_network(args.model)
    cfg = parse_config(args.strategy, args.under)
    inputs = _resolve_inputs(args)
    results = _run_parallel(_verify_one,
                            [(net, x, args.eps, cfg) for x, _ in inputs], args.jobs)
    rows = []
    verified = 0
    for idx, ((x, label), (status, min_margin, pred, wall)) in enumerate(zip(inputs, results)):
        ok = status == "robust" and (label is None or pred == label)
        verified += ok
        if label is not None and pred != label:
            status = "misclassified"
        rows.append(_row(idx, cfg, args.eps, status, min_margin, wall))
    ratio = verified / len(inputs)
    rows.append(_row("ratio", cfg, args.eps, "ratio", ratio, 0.0))
    return rows


def cmd_sweep(args) -> list[dict]:
    net = load_network(args.model)
    cfg = parse_config(args.strategy, args.under)
    inputs = _resolve_inputs(args)
    eps_values = parse_eps_range(args.eps_range)
    rows = []
    for eps in eps_values:
        t0 = time.perf_counter()
        results = _run_parallel(_verify_one,
                                [(net, x, eps, cfg) for x, _ in inputs], args.jobs)
        verified = sum(status == "robust" and (label is None or pred == label)
                       for (x, label), (status, _, pred, _) in zip(inputs, results))
        ratio = verified / len(inputs)
        rows.append(_row("*", cfg, eps, "sweep", ratio, time.perf_counter() - t0))
    return rows


def cmd_compare(args) -> list[dict]:
    net = load_network(args.model)
    strategies = [s.strip() for s in args.strategies.split(",")]
    if len(strategies) < 2:
        raise UsageError("compare needs at least two --strategies")
    cfgs = [parse_config(s, args.under if s == "dual" else
                         (args.under if args.under_all else "none")) for s in strategies]
    inputs = _resolve_inputs(args)
    table = compare_strategies(net, [x for x, _ in inputs], cfgs, baseline_index=-1)
    sys.stderr.write(table.format() + "\n")
    rows = []
    for pos, (cfg, row) in enumerate(zip(cfgs, table.rows)):
        for idx, bound in enumerate(row.bounds):
            rows.append(_row(idx, cfg, bound, "bound", None, 0.0))
        is_base = pos == table.baseline_index
        rows.append(_row("mean", cfg, row.mean_bound,
                         "baseline" if is_base else "improvement",
                         row.mean_improvement, row.time_s))
    return rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dualbound",
                                     description="Certified robustness verification "
                                                 "for S-curve networks")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, eps=False):
        p.add_argument("--model", required=True)
        p.add_argument("--dataset")
        p.add_argument("--input")
        p.add_argument("--limit", type=int)
        p.add_argument("--strategy", default="dual",
                       choices=sorted(_STRATEGIES))
        p.add_argument("--under", default="mc:1000:seed=0")
        p.add_argument("--out")
        p.add_argument("--format", default="csv", choices=["csv", "json"])
        p.add_argument("--jobs", type=int, default=1)
        if eps:
            p.add_argument("--eps", type=float, required=True)

    common(sub.add_parser("verify", help="verify robustness at a fixed radius"), eps=True)
    common(sub.add_parser("bound", help="certified lower bound per input"))
    common(sub.add_parser("ratio", help="verified robustness ratio at a fixed radius"),
           eps=True)
    p = sub.add_parser("sweep", help="robustness ratio across a radius range")
    common(p)
    p.add_argument("--eps-range", required=True, dest="eps_range")
    p = sub.add_parser("compare", help="compare strategies by certified bound")
    common(p)
    p.add_argument("--strategies", required=True,
                   help="comma list; last one is the improvement baseline")
    p.add_argument("--under-all", action="store_true",
                   help="apply --under to every strategy, not only dual")
    return parser


_COMMANDS = {"verify": cmd_verify, "bound": cmd_bound, "ratio": cmd_ratio,
             "sweep": cmd_sweep, "compare": cmd_compare}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows = _COMMANDS[args.command](args)
        _write_rows(rows, args.out, args.format)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, ModelFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FILE
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATASET
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports and exits
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
