"""Command-line interface: dataset statistics, evaluation, parameter
sweeps, training, and prediction.

Every option can come from a flat key=value config file (``--config``);
explicit flags win over config values. All randomness flows from the
single ``seed`` option, so reruns with identical inputs produce identical
artifacts (report headers carry the only non-deterministic content, the
elapsed-time comment).
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

from .chaos import GlsParams
from .classifier import load_model, save_model, NeurochaosClassifier
from .evaluation import (
    ParamGrid,
    StagedSearchConfig,
    evaluate_pipeline,
    grid_search,
    staged_search,
    stratified_split,
    write_sweep_csv,
)
from .graph import LoadingStrategy, assemble_inputs, homophily, load_graph


class CliError(Exception):
    """Input or configuration problem; maps to exit code 2."""


def _load_config(path: str) -> dict[str, str]:
    p = Path(path)
    if not p.exists():
        raise CliError(f"config file not found: {p}")
    out: dict[str, str] = {}
    for i, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"{p}: line {i}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


_CONVERTERS = {
    "nodes": str,
    "edges": str,
    "strategy": str,
    "q": float,
    "b": float,
    "eps": float,
    "max_iters": int,
    "k": int,
    "ratio": float,
    "seed": int,
    "out": str,
    "model": str,
    "q_grid": str,
    "b_grid": str,
    "eps_grid": str,
    "staged": lambda s: str(s).lower() in ("1", "true", "yes"),
    "n_jobs": int,
}


def _resolve(args: argparse.Namespace, config: dict[str, str]) -> argparse.Namespace:
    """Fill unset flags from the config file; flags win."""
    for key, conv in _CONVERTERS.items():
        current = getattr(args, key, None)
        unset = current is None or (key == "staged" and current is False)
        if unset and key in config:
            try:
                setattr(args, key, conv(config[key]))
            except ValueError as exc:
                raise CliError(f"config key {key}: {exc}") from exc
    return args


def _require(args, *keys):
    for key in keys:
        if getattr(args, key, None) is None:
            raise CliError(f"missing required option --{key.replace('_', '-')}")


def _params_from_args(args) -> GlsParams:
    try:
        return GlsParams(args.q, args.b, args.eps, args.max_iters)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _load(args):
    try:
        return load_graph(args.nodes, args.edges)
    except FileNotFoundError as exc:
        raise CliError(str(exc)) from exc
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _parse_grid_axis(text: str, name: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise CliError(f"--{name} must be lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(v) for v in parts)
    except ValueError as exc:
        raise CliError(f"--{name}: {exc}") from exc
    return lo, hi, step


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_stats(args) -> int:
    _require(args, "nodes", "edges")
    graph = _load(args)
    print(f"nodes={graph.num_nodes}")
    print(f"features={graph.num_features}")
    print(f"classes={graph.num_classes}")
    print(f"edges={graph.num_edges}")
    print(f"duplicate_edges_dropped={graph.dropped_duplicate_edges}")
    print(f"self_loops_dropped={graph.dropped_self_loops}")
    report = homophily(graph)
    print(f"homophily={report.homophily:.3f}")
    print(f"heterophily={report.heterophily:.3f}")
    return 0


def _cmd_eval(args) -> int:
    _require(args, "nodes", "edges", "q", "b", "eps", "out")
    params = _params_from_args(args)
    strategy = LoadingStrategy(args.strategy)
    graph = _load(args)
    started = time.perf_counter()
    result = evaluate_pipeline(graph, strategy, params, seed=args.seed, ratio=args.ratio)
    runtime = time.perf_counter() - started
    lines = [f"# eval report runtime_s={runtime:.3f}"]
    lines.append(f"nodes={graph.num_nodes}")
    lines.append(f"edges={graph.num_edges}")
    lines.append(f"classes={graph.num_classes}")
    lines.append(f"strategy={strategy.value}")
    lines.append(f"q={params.q!r}")
    lines.append(f"b={params.b!r}")
    lines.append(f"epsilon={params.epsilon!r}")
    lines.append(f"max_iters={params.max_iters}")
    lines.append(f"seed={args.seed}")
    lines.append(f"ratio={args.ratio!r}")
    lines.append(f"train_macro_f1={result.train_macro_f1!r}")
    lines.append(f"test_macro_f1={result.test_macro_f1!r}")
    for c, score in enumerate(result.test_per_class_f1):
        lines.append(f"test_f1_class_{c}={score!r}")
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"strategy={strategy.value} train_macro_f1={result.train_macro_f1:.4f} "
          f"test_macro_f1={result.test_macro_f1:.4f}")
    print(f"report written to {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    _require(args, "nodes", "edges", "out")
    strategy = LoadingStrategy(args.strategy)
    graph = _load(args)
    X = assemble_inputs(graph, strategy)
    y = graph.labels
    plan = stratified_split(y, args.ratio, args.seed)
    X_train, y_train = X[plan.train_indices], y[plan.train_indices]
    kw = dict(
        k=args.k,
        seed=args.seed,
        num_classes=graph.num_classes,
        max_iters=args.max_iters,
        n_jobs=args.n_jobs,
    )
    if args.staged:
        best, records = staged_search(X_train, y_train, **kw)
    else:
        if not (args.q_grid and args.b_grid and args.eps_grid):
            raise CliError("sweep needs --staged or all of --q-grid/--b-grid/--eps-grid")
        grid = ParamGrid.from_ranges(
            _parse_grid_axis(args.q_grid, "q-grid"),
            _parse_grid_axis(args.b_grid, "b-grid"),
            _parse_grid_axis(args.eps_grid, "eps-grid"),
        )
        best, records = grid_search(X_train, y_train, grid, **kw)
    write_sweep_csv(records, args.out)
    best_score = max(
        r.mean_cv_macro_f1
        for r in records
        if (r.q, r.b, r.epsilon) == (best.q, best.b, best.epsilon)
    )
    print(f"records={len(records)}")
    print(
        f"best q={best.q!r} b={best.b!r} epsilon={best.epsilon!r} "
        f"mean_cv_macro_f1={best_score:.4f}"
    )
    print(f"sweep written to {args.out}")
    return 0


def _cmd_train(args) -> int:
    _require(args, "nodes", "edges", "q", "b", "eps", "out")
    params = _params_from_args(args)
    strategy = LoadingStrategy(args.strategy)
    graph = _load(args)
    X = assemble_inputs(graph, strategy)
    clf = NeurochaosClassifier(
        q=params.q,
        b=params.b,
        epsilon=params.epsilon,
        max_iters=params.max_iters,
        n_classes=graph.num_classes,
    ).fit(X, graph.labels)
    save_model(args.out, clf, strategy)
    print(f"model written to {args.out}")
    return 0


def _cmd_predict(args) -> int:
    _require(args, "nodes", "edges", "model", "out")
    model_path = Path(args.model)
    if not model_path.exists():
        raise CliError(f"model file not found: {model_path}")
    try:
        clf, strategy = load_model(model_path)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    graph = _load(args)
    X = assemble_inputs(graph, strategy or args.strategy)
    if X.shape[1] != clf.n_features_in_:
        raise CliError(
            f"dimensionality mismatch: model expects {clf.n_features_in_} "
            f"input columns, assembled input has {X.shape[1]}"
        )
    pred = clf.predict(X)
    with Path(args.out).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "predicted_label"])
        for node_id, label in zip(graph.node_ids, pred):
            writer.writerow([int(node_id), int(label)])
    print(f"predictions written to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(sp):
    sp.add_argument("--nodes", help="nodes.csv path")
    sp.add_argument("--edges", help="edges.csv path")
    sp.add_argument("--config", help="key=value config file; flags override it")
    sp.add_argument("--strategy", choices=[s.value for s in LoadingStrategy],
                    default=None, help="feature loading strategy (default dual)")
    sp.add_argument("--q", type=float, help="initial neural activity, in (0,1)")
    sp.add_argument("--b", type=float, help="discrimination threshold, in (0,1)")
    sp.add_argument("--eps", type=float, help="recognition radius, in (0,1)")
    sp.add_argument("--max-iters", dest="max_iters", type=int, default=None,
                    help="iteration cap per trace (default 5000)")
    sp.add_argument("--k", type=int, default=None, help="CV folds (default 5)")
    sp.add_argument("--ratio", type=float, default=None,
                    help="train fraction for the stratified split (default 0.8)")
    sp.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    sp.add_argument("--out", help="output artifact path")
    sp.add_argument("--n-jobs", dest="n_jobs", type=int, default=None,
                    help="parallel workers for sweeps (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neurochaos",
        description="Chaotic-feature node classification on graph CSV exports",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("stats", help="node/edge/class counts and homophily")
    _add_common(sp)
    sp.set_defaults(func=_cmd_stats)

    sp = sub.add_parser("eval", help="train/test evaluation at fixed parameters")
    _add_common(sp)
    sp.set_defaults(func=_cmd_eval)

    sp = sub.add_parser("sweep", help="cross-validated grid search on the training split")
    _add_common(sp)
    sp.add_argument("--staged", action="store_true", default=False,
                    help="run the coarse/refine/epsilon-polish schedule")
    sp.add_argument("--q-grid", dest="q_grid", help="explicit q axis, lo:hi:step")
    sp.add_argument("--b-grid", dest="b_grid", help="explicit b axis, lo:hi:step")
    sp.add_argument("--eps-grid", dest="eps_grid", help="explicit eps axis, lo:hi:step")
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("train", help="fit on all given nodes and persist the model")
    _add_common(sp)
    sp.set_defaults(func=_cmd_train)

    sp = sub.add_parser("predict", help="label nodes with a persisted model")
    _add_common(sp)
    sp.add_argument("--model", help="persisted model file from 'train'")
    sp.set_defaults(func=_cmd_predict)

    return parser


_DEFAULTS = {
    "strategy": LoadingStrategy.DUAL.value,
    "max_iters": 5000,
    "k": 5,
    "ratio": 0.8,
    "seed": 0,
    "n_jobs": 1,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config) if args.config else {}
        args = _resolve(args, config)
        for key, value in _DEFAULTS.items():
            if getattr(args, key, None) is None:
                setattr(args, key, value)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - unexpected failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
