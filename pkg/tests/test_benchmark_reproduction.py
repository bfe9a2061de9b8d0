"""Benchmark reproduction suite.

Needs the real datasets exported to ``$NEUROCHAOS_DATA_DIR/<name>/``
(``nodes.csv`` + ``edges.csv``; see the exporter package). Every test
skips cleanly when its dataset is absent, so the synthetic suites stay
self-contained. The full Cora parameter sweep is additionally gated
behind ``NEUROCHAOS_RUN_SWEEPS=1`` because it runs for hours.
"""

import os
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

import neurochaos as nc

DATA_DIR = Path(os.environ.get("NEUROCHAOS_DATA_DIR", Path(__file__).parent.parent / "data"))

# dataset -> (homophily, nodes, features, classes)
EXPECTED_STATS = {
    "cora": (0.810, 2708, 1433, 7),
    "citeseer": (0.738, 3327, 3703, 6),
    "pubmed": (0.802, 19717, 500, 3),
    "actor": (0.219, 7600, 932, 5),
    "cornell": (0.131, 183, 1703, 5),
    "wisconsin": (0.196, 251, 1703, 5),
    "squirrel": (0.224, 5201, 2325, 5),
}

# dataset -> tuned (q, b, epsilon) for the dual-loading headline runs
TUNED_PARAMS = {
    "cora": (0.52, 0.75, 0.10),
    "actor": (0.44, 0.66, 0.108),
    "squirrel": (0.53, 0.76, 0.0985),
}

EVAL_SEEDS = (0, 1, 2, 3, 4)


def _paths(name):
    return DATA_DIR / name / "nodes.csv", DATA_DIR / name / "edges.csv"


def _available(name):
    nodes, edges = _paths(name)
    return nodes.exists() and edges.exists()


def _skip_unless(name):
    if not _available(name):
        pytest.skip(f"dataset '{name}' not exported under {DATA_DIR}")


@lru_cache(maxsize=3)
def _load(name):
    return nc.load_graph(*_paths(name))


def _mean_test_f1(graph, strategy, params, seeds=EVAL_SEEDS):
    scores = [
        nc.evaluate_pipeline(graph, strategy, params, seed=s).test_macro_f1
        for s in seeds
    ]
    return float(np.mean(scores))


@pytest.mark.parametrize("name", sorted(EXPECTED_STATS))
def test_dataset_stats_and_homophily(name):
    _skip_unless(name)
    expected_h, n_nodes, n_feats, n_classes = EXPECTED_STATS[name]
    g = _load(name)
    assert g.num_nodes == n_nodes
    assert g.num_features == n_feats
    assert g.num_classes == n_classes
    rep = nc.homophily(g)
    assert rep.homophily == pytest.approx(expected_h, abs=0.01)
    assert rep.homophily + rep.heterophily == 1.0


def test_cora_dual_loading_headline():
    _skip_unless("cora")
    params = nc.GlsParams(*TUNED_PARAMS["cora"])
    mean = _mean_test_f1(_load("cora"), nc.LoadingStrategy.DUAL, params)
    assert mean == pytest.approx(0.844, abs=0.05)


def test_cora_loading_strategy_ablation():
    _skip_unless("cora")
    params = nc.GlsParams(*TUNED_PARAMS["cora"])
    g = _load("cora")
    scores = {
        strategy: _mean_test_f1(g, strategy, params)
        for strategy in nc.LoadingStrategy
    }
    assert scores[nc.LoadingStrategy.DUAL] > scores[nc.LoadingStrategy.AGGREGATED]
    assert scores[nc.LoadingStrategy.AGGREGATED] > scores[nc.LoadingStrategy.ORIGINAL]
    assert scores[nc.LoadingStrategy.DUAL] == pytest.approx(0.813, abs=0.05)
    assert scores[nc.LoadingStrategy.AGGREGATED] == pytest.approx(0.776, abs=0.05)
    assert scores[nc.LoadingStrategy.ORIGINAL] == pytest.approx(0.674, abs=0.05)


@pytest.mark.parametrize("name,ceiling", [("actor", 0.35), ("squirrel", 0.45)])
def test_heterophilic_degradation(name, ceiling):
    _skip_unless(name)
    params = nc.GlsParams(*TUNED_PARAMS[name])
    mean = _mean_test_f1(_load(name), nc.LoadingStrategy.DUAL, params)
    assert mean <= ceiling


@pytest.mark.skipif(
    os.environ.get("NEUROCHAOS_RUN_SWEEPS") != "1",
    reason="hours-long sweep; set NEUROCHAOS_RUN_SWEEPS=1 to run",
)
def test_cora_staged_sweep_optimum_box():
    _skip_unless("cora")
    g = _load("cora")
    X = nc.assemble_inputs(g, nc.LoadingStrategy.DUAL)
    plan = nc.stratified_split(g.labels, 0.8, seed=0)
    n_jobs = int(os.environ.get("NEUROCHAOS_SWEEP_JOBS", "-1"))
    best, _ = nc.staged_search(
        X[plan.train_indices],
        g.labels[plan.train_indices],
        k=5,
        seed=0,
        num_classes=g.num_classes,
        n_jobs=n_jobs,
    )
    assert 0.45 <= best.q <= 0.55
    assert 0.65 <= best.b <= 0.80
    assert 0.05 <= best.epsilon <= 0.12
