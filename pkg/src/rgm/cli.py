"""Command-line entry point.

One subcommand per task: ``gen``, ``train``, ``eval``, ``convex``,
``bounds``, ``push``, ``plot``. Every command reads a JSON config
(``--config``), applies ``--override key.path=value`` patches and the
``--seed`` shortcut, runs, and writes ``report.json`` into the output
directory (``--out``, default current directory). The report echoes the
resolved config; rerunning from that echo reproduces the results section
byte for byte.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .config import ConfigError, _check_keys, _count, _number, _string
from .errors import ParseError, RgmError
from .gwbounds import ORACLE_LIMIT, NetworkSpace, entropic_gw, flb2, gm2_oracle, slb2
from .kernels import fit_standardization, gram
from .maps import load_model, save_model
from .measures import DatasetPair, gen_circle, gen_gaussian, gen_segment, read_csv, write_csv
from .representer import build_problem, minimize
from .rng import make_rng
from .svgplot import line_chart_svg, scatter_svg
from .training import TrainConfig, evaluate, pushforward, train


def _out_path(out_dir: Path, name: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / name


def _write_report(out_dir: Path, command: str, doc: dict, results: dict, seed, elapsed: float) -> Path:
    report = {
        "command": command,
        "config": doc,
        "seed": seed,
        "results": results,
        "wall_clock_sec": elapsed,
    }
    path = _out_path(out_dir, "report.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return path


def _resolve_kernel(doc, where, cloud):
    spec, fit = cfgmod.parse_kernel(doc, where)
    if fit:
        spec = fit_standardization(spec, cloud)
    return spec


def _load_pair(doc, where="config"):
    source = read_csv(_string(doc, "source_csv", where))
    target = read_csv(_string(doc, "target_csv", where))
    return DatasetPair(source=source, target=target)


def cmd_gen(doc: dict, out_dir: Path) -> dict:
    _check_keys(doc, "config", {"kind", "n", "out_csv"}, {"dim", "covariance", "seed", "start", "end"})
    kind = _string(doc, "kind", "config")
    n = _count(doc, "n", "config", minimum=1)
    out_csv = _string(doc, "out_csv", "config")
    if kind == "segment":
        measure = gen_segment(n, start=doc.get("start", (-1.0, -1.0)), end=doc.get("end", (1.0, 1.0)))
    elif kind == "circle":
        measure = gen_circle(n)
    elif kind == "gaussian":
        dim = _count(doc, "dim", "config", minimum=1) if "dim" in doc else 2
        cov = np.asarray(doc.get("covariance", np.eye(dim).tolist()), dtype=float)
        measure = gen_gaussian(n, dim, cov, make_rng(doc.get("seed", 0)))
    else:
        raise ConfigError(f"config.kind: expected segment, circle, or gaussian, got {kind!r}")
    write_csv(measure, out_csv)
    return {"kind": kind, "rows": measure.n, "dim": measure.dim, "out_csv": out_csv}


def _train_config(doc: dict, data: DatasetPair) -> TrainConfig:
    _check_keys(
        doc,
        "config",
        {
            "source_csv", "target_csv", "cost_x", "cost_y", "kernel_x", "kernel_y",
            "weights", "model_f", "model_b", "iterations", "learning_rate",
        },
        {"penalty", "halving_period", "batch_size", "seed", "log_every"},
    )
    return TrainConfig(
        cost_x=_resolve_kernel(doc.get("cost_x"), "config.cost_x", data.source),
        cost_y=_resolve_kernel(doc.get("cost_y"), "config.cost_y", data.target),
        kernel_x=_resolve_kernel(doc.get("kernel_x"), "config.kernel_x", data.source),
        kernel_y=_resolve_kernel(doc.get("kernel_y"), "config.kernel_y", data.target),
        weights=cfgmod.parse_weights(doc.get("weights"), "config.weights"),
        model_f=cfgmod.parse_model(doc.get("model_f"), "config.model_f"),
        model_b=cfgmod.parse_model(doc.get("model_b"), "config.model_b"),
        iterations=_count(doc, "iterations", "config"),
        learning_rate=_number(doc, "learning_rate", "config"),
        halving_period=_count(doc, "halving_period", "config") if "halving_period" in doc else 500,
        batch_size=_count(doc, "batch_size", "config") if "batch_size" in doc else 0,
        seed=_count(doc, "seed", "config") if "seed" in doc else 0,
        log_every=_count(doc, "log_every", "config", minimum=1) if "log_every" in doc else 10,
        penalty=cfgmod.parse_penalty(doc.get("penalty"), "config.penalty"),
    )


def _write_trace(trace, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("iteration,C0,l1,l2,l3,L\n")
        for it, b in trace.entries:
            fh.write(f"{it},{b.c0:.17g},{b.l1:.17g},{b.l2:.17g},{b.l3:.17g},{b.total:.17g}\n")


def cmd_train(doc: dict, out_dir: Path) -> dict:
    data = _load_pair(doc)
    cfg = _train_config(doc, data)
    model_f, model_b, trace = train(data, cfg)
    path_f = _out_path(out_dir, "checkpoint_f.json")
    path_b = _out_path(out_dir, "checkpoint_b.json")
    save_model(model_f, path_f)
    save_model(model_b, path_b)
    trace_path = _out_path(out_dir, "trace.csv")
    _write_trace(trace, trace_path)
    return {
        "final": trace.last().to_dict(),
        "iterations": cfg.iterations,
        "checkpoint_f": str(path_f),
        "checkpoint_b": str(path_b),
        "trace_csv": str(trace_path),
    }


def cmd_eval(doc: dict, out_dir: Path) -> dict:
    data = _load_pair(doc)
    _check_keys(
        doc,
        "config",
        {
            "source_csv", "target_csv", "checkpoint_f", "checkpoint_b",
            "cost_x", "cost_y", "kernel_x", "kernel_y", "weights",
        },
        {"penalty", "seed"},
    )
    model_f = load_model(_string(doc, "checkpoint_f", "config"))
    model_b = load_model(_string(doc, "checkpoint_b", "config"))
    cfg = TrainConfig(
        cost_x=_resolve_kernel(doc.get("cost_x"), "config.cost_x", data.source),
        cost_y=_resolve_kernel(doc.get("cost_y"), "config.cost_y", data.target),
        kernel_x=_resolve_kernel(doc.get("kernel_x"), "config.kernel_x", data.source),
        kernel_y=_resolve_kernel(doc.get("kernel_y"), "config.kernel_y", data.target),
        weights=cfgmod.parse_weights(doc.get("weights"), "config.weights"),
        model_f=cfgmod.parse_model({"kind": "linear", "in_dim": 1, "out_dim": 1}, "config"),
        model_b=cfgmod.parse_model({"kind": "linear", "in_dim": 1, "out_dim": 1}, "config"),
        iterations=0,
        learning_rate=0.0,
        penalty=cfgmod.parse_penalty(doc.get("penalty"), "config.penalty"),
    )
    breakdown = evaluate(model_f, model_b, data, cfg)
    return {"breakdown": breakdown.to_dict()}


def cmd_convex(doc: dict, out_dir: Path) -> dict:
    _check_keys(
        doc,
        "config",
        {"source_csv", "target_csv", "kernel_x", "kernel_y", "lambda1", "lambda2", "lambda3"},
        {"tolerance", "max_iterations", "seed"},
    )
    data = _load_pair(doc)
    kx = gram(_resolve_kernel(doc.get("kernel_x"), "config.kernel_x", data.source), data.source, data.source)
    ky = gram(_resolve_kernel(doc.get("kernel_y"), "config.kernel_y", data.target), data.target, data.target)
    prob = build_problem(
        kx, ky,
        _number(doc, "lambda1", "config"),
        _number(doc, "lambda2", "config"),
        _number(doc, "lambda3", "config"),
    )
    tol = _number(doc, "tolerance", "config") if "tolerance" in doc else 1e-7
    max_iters = _count(doc, "max_iterations", "config", minimum=1) if "max_iterations" in doc else 50_000
    _, breakdown, iterations = minimize(prob, tol=tol, max_iters=max_iters)
    return {"breakdown": breakdown.to_dict(), "iterations": iterations}


def cmd_bounds(doc: dict, out_dir: Path) -> dict:
    _check_keys(
        doc,
        "config",
        {"source_csv", "target_csv", "cost_x", "cost_y"},
        {"entropic", "oracle", "seed"},
    )
    data = _load_pair(doc)
    space_x = NetworkSpace(
        measure=data.source, cost=_resolve_kernel(doc.get("cost_x"), "config.cost_x", data.source)
    )
    space_y = NetworkSpace(
        measure=data.target, cost=_resolve_kernel(doc.get("cost_y"), "config.cost_y", data.target)
    )
    ent = doc.get("entropic", {})
    _check_keys(ent, "config.entropic", set(), {"epsilon", "outer_iterations", "max_iterations", "tolerance"})
    q_value, _ = entropic_gw(
        space_x,
        space_y,
        epsilon=_number(ent, "epsilon", "config.entropic") if "epsilon" in ent else None,
        outer_iterations=_count(ent, "outer_iterations", "config.entropic", minimum=1)
        if "outer_iterations" in ent
        else 50,
        sinkhorn_max_iterations=_count(ent, "max_iterations", "config.entropic", minimum=1)
        if "max_iterations" in ent
        else 10_000,
        sinkhorn_tolerance=_number(ent, "tolerance", "config.entropic") if "tolerance" in ent else 1e-9,
    )
    results = {
        "flb2": flb2(space_x, space_y),
        "slb2": slb2(space_x, space_y),
        "gw2_entropic": q_value,
        "gm2_oracle": None,
    }
    want_oracle = doc.get("oracle", data.source.n == data.target.n and data.source.n <= ORACLE_LIMIT)
    if want_oracle:
        value, _ = gm2_oracle(space_x, space_y)
        results["gm2_oracle"] = value
    return results


def cmd_push(doc: dict, out_dir: Path) -> dict:
    _check_keys(doc, "config", {"checkpoint", "input_csv", "output_csv"}, {"seed"})
    model = load_model(_string(doc, "checkpoint", "config"))
    cloud = read_csv(_string(doc, "input_csv", "config"))
    mapped = pushforward(model, cloud)
    out_csv = _string(doc, "output_csv", "config")
    write_csv(mapped, out_csv)
    return {"rows": mapped.n, "dim": mapped.dim, "output_csv": out_csv}


def _read_trace_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if len(lines) < 2:
        raise ParseError(f"{path}: trace has no data rows")
    rows = []
    for ln in lines[1:]:
        rows.append([float(v) for v in ln.split(",")])
    return np.asarray(rows)


def cmd_plot(doc: dict, out_dir: Path) -> dict:
    kind = _string(doc, "kind", "config")
    if kind == "trace":
        _check_keys(doc, "config", {"kind", "trace_csv", "out_svg"}, {"seed"})
        rows = _read_trace_csv(_string(doc, "trace_csv", "config"))
        out_svg = _string(doc, "out_svg", "config")
        its = rows[:, 0]
        names = ["C0", "l1", "l2", "l3", "L"]
        line_chart_svg([(its, rows[:, k + 1], names[k]) for k in range(5)], out_svg)
    elif kind == "scatter":
        _check_keys(doc, "config", {"kind", "csvs", "out_svg"}, {"seed"})
        paths = doc.get("csvs")
        if not isinstance(paths, list) or not paths:
            raise ConfigError("config.csvs: expected a non-empty list of CSV paths")
        clouds = [(read_csv(p).points, Path(p).stem) for p in paths]
        out_svg = _string(doc, "out_svg", "config")
        scatter_svg(clouds, out_svg)
    elif kind == "alignment":
        _check_keys(doc, "config", {"kind", "source_csv", "mapped_csv", "cost_x", "cost_y", "out_svg"}, {"seed"})
        source = read_csv(_string(doc, "source_csv", "config"))
        mapped = read_csv(_string(doc, "mapped_csv", "config"))
        if source.n != mapped.n:
            raise ConfigError("alignment plot needs equally many source and mapped points")
        cost_x = _resolve_kernel(doc.get("cost_x"), "config.cost_x", source)
        cost_y = _resolve_kernel(doc.get("cost_y"), "config.cost_y", mapped)
        cx = gram(cost_x, source, source).ravel()
        cy = gram(cost_y, mapped, mapped).ravel()
        out_svg = _string(doc, "out_svg", "config")
        scatter_svg([(np.column_stack([cx, cy]), "cost pairs")], out_svg, diagonal=True)
    else:
        raise ConfigError(f"config.kind: expected trace, scatter, or alignment, got {kind!r}")
    return {"out_svg": out_svg}


_RUNNERS = {
    "gen": cmd_gen,
    "train": cmd_train,
    "eval": cmd_eval,
    "convex": cmd_convex,
    "bounds": cmd_bounds,
    "push": cmd_push,
    "plot": cmd_plot,
}


def run_command(command: str, doc: dict, out_dir: Path) -> dict:
    """Run one command from a resolved config; returns the full report dict."""
    started = time.perf_counter()
    results = _RUNNERS[command](doc, out_dir)
    elapsed = time.perf_counter() - started
    report_path = _write_report(out_dir, command, doc, results, doc.get("seed"), elapsed)
    return {"report": str(report_path), "results": results}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rgm",
        description="Transform-sampler experiments: generate data, train map pairs, "
        "solve the convex relaxation, and compare spaces with lower bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=".", help="output directory for report and artifacts")
        p.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="dotted-path config override; value parsed as JSON when possible",
        )
    args = parser.parse_args(argv)

    try:
        doc = cfgmod.load_json(args.config)
        doc = cfgmod.apply_overrides(doc, args.override)
        if args.seed is not None:
            doc["seed"] = args.seed
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        outcome = run_command(args.command, doc, Path(args.out))
    except (ConfigError, ParseError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RgmError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    print(json.dumps(outcome["results"], indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
