"""Stratified splitting, k-fold cross-validation, macro-F1 scoring, the
staged grid search over (q, b, epsilon), and end-to-end evaluation.

The grid-search engine factors the pipeline so shared work is computed
once: fold normalizations and their unique stimulus values per fold, the
chaotic orbit per (q, b) pair, and distance-record indexes that answer
firing times for every epsilon on the grid from a single orbit scan.
Results are keyed by grid point, never by completion order, so parallel
execution returns identical records.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from .chaos import GlsParams, _build_hit_index, _features_from_hits, _gls_orbit
from .classifier import ChaosNetClassifier, MinMaxNormalizer, NeurochaosClassifier
from .graph import GraphDataset, LoadingStrategy, assemble_inputs


class StratificationError(ValueError):
    """A class is too small to be split as requested."""


@dataclass(frozen=True)
class SplitPlan:
    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int
    ratio: float


@dataclass(frozen=True)
class SweepRecord:
    """One grid point with its cross-validated macro-F1."""

    q: float
    b: float
    epsilon: float
    mean_cv_macro_f1: float
    per_fold_scores: tuple[float, ...]


@dataclass(frozen=True)
class EvalResult:
    train_macro_f1: float
    test_macro_f1: float
    params: GlsParams
    strategy: LoadingStrategy
    test_per_class_f1: tuple[float, ...]


def stratified_split(labels, ratio: float, seed: int) -> SplitPlan:
    """Class-preserving train/test split, deterministic for a fixed seed.

    Each class contributes ``round(ratio * n_c)`` training samples
    (clamped so both sides stay nonempty), which keeps the per-class train
    fraction within one sample of ``ratio``.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio!r}")
    rng = np.random.default_rng(seed)
    train_parts, test_parts = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if idx.size < 2:
            raise StratificationError(
                f"class {c} has {idx.size} sample(s); need at least 2 to split"
            )
        perm = rng.permutation(idx)
        n_train = int(round(ratio * idx.size))
        n_train = min(max(n_train, 1), idx.size - 1)
        train_parts.append(perm[:n_train])
        test_parts.append(perm[n_train:])
    return SplitPlan(
        train_indices=np.sort(np.concatenate(train_parts)),
        test_indices=np.sort(np.concatenate(test_parts)),
        seed=seed,
        ratio=ratio,
    )


def kfold_indices(labels, k: int, seed: int) -> list[np.ndarray]:
    """Stratified k-fold partition; returns the k validation index sets.

    Within each class the shuffled samples are dealt so that the first
    ``n_c % k`` folds receive one extra. Classes smaller than k are spread
    best-effort with a warning.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if k > labels.size:
        raise ValueError(f"k={k} exceeds the number of samples ({labels.size})")
    rng = np.random.default_rng(seed)
    folds: list[list[np.ndarray]] = [[] for _ in range(k)]
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if idx.size < k:
            warnings.warn(
                f"class {c} has {idx.size} sample(s) for {k} folds; "
                "some folds will not contain it",
                UserWarning,
                stacklevel=2,
            )
        perm = rng.permutation(idx)
        for f, chunk in enumerate(np.array_split(perm, k)):
            folds[f].append(chunk)
    return [np.sort(np.concatenate(parts)).astype(np.int64) for parts in folds]


def per_class_f1(y_true, y_pred, num_classes: int) -> np.ndarray:
    """F1 per class index; a class absent from truth and prediction scores 0."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError(
            f"y_true and y_pred must be 1-D and equal length, got "
            f"{y_true.shape} vs {y_pred.shape}"
        )
    for name, y in (("y_true", y_true), ("y_pred", y_pred)):
        if y.size and (y.min() < 0 or y.max() >= num_classes):
            raise ValueError(f"{name} contains labels outside [0, {num_classes})")
    scores = np.zeros(num_classes)
    for c in range(num_classes):
        tp = int(np.count_nonzero((y_true == c) & (y_pred == c)))
        fp = int(np.count_nonzero((y_true != c) & (y_pred == c)))
        fn = int(np.count_nonzero((y_true == c) & (y_pred != c)))
        if tp + fp + fn == 0:
            warnings.warn(
                f"class {c} absent from both y_true and y_pred; scoring F1=0",
                UserWarning,
                stacklevel=2,
            )
            continue
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        if precision + recall > 0:
            scores[c] = 2.0 * precision * recall / (precision + recall)
    return scores


def macro_f1(y_true, y_pred, num_classes: int) -> float:
    """Unweighted mean of per-class F1 over all ``num_classes`` classes."""
    return float(np.mean(per_class_f1(y_true, y_pred, num_classes)))


# ---------------------------------------------------------------------------
# Parameter grids
# ---------------------------------------------------------------------------

def _axis(lo: float, hi: float, step: float) -> tuple[float, ...]:
    """Inclusive arithmetic progression, rounded and clipped to (0, 1)."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step!r}")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    values = np.round(lo + step * np.arange(max(n, 0)), 12)
    values = values[(values > 0.0) & (values < 1.0)]
    if values.size == 0:
        raise ValueError(f"empty grid axis for range [{lo}, {hi}] step {step}")
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class ParamGrid:
    """Cartesian search grid over the three neuron parameters."""

    q_values: tuple[float, ...]
    b_values: tuple[float, ...]
    epsilon_values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.q_values) * len(self.b_values) * len(self.epsilon_values)

    @classmethod
    def from_ranges(cls, q_range, b_range, eps_range) -> "ParamGrid":
        """Each range is a (lo, hi, step) triple."""
        return cls(_axis(*q_range), _axis(*b_range), _axis(*eps_range))

    @classmethod
    def coarse(cls, lo=0.01, hi=0.5, step=0.05) -> "ParamGrid":
        axis = _axis(lo, hi, step)
        return cls(axis, axis, axis)

    @classmethod
    def full(cls, lo=0.01, hi=0.5, step=0.01) -> "ParamGrid":
        """The exhaustive single-stage grid. 50^3 points at the default
        resolution: available, but impractically slow on real datasets;
        prefer ``staged_search``."""
        axis = _axis(lo, hi, step)
        return cls(axis, axis, axis)

    @classmethod
    def around(cls, params: GlsParams, radius=0.05, step=0.01) -> "ParamGrid":
        return cls(
            _axis(params.q - radius, params.q + radius, step),
            _axis(params.b - radius, params.b + radius, step),
            _axis(params.epsilon - radius, params.epsilon + radius, step),
        )

    @classmethod
    def epsilon_only(cls, params: GlsParams, radius=0.01, step=0.0005) -> "ParamGrid":
        return cls(
            (params.q,),
            (params.b,),
            _axis(params.epsilon - radius, params.epsilon + radius, step),
        )


# ---------------------------------------------------------------------------
# Grid-search engine
# ---------------------------------------------------------------------------

@dataclass
class _FoldData:
    """One CV fold, normalized and deduplicated to unique stimulus values."""

    uniq: np.ndarray       # sorted unique normalized values, train + val
    inv_train: np.ndarray  # flat indices into uniq, reshapes to (n_tr, d)
    inv_val: np.ndarray
    y_train: np.ndarray
    y_val: np.ndarray
    n_cols: int


def _prepare_folds(features, labels, k, seed) -> list[_FoldData]:
    folds = kfold_indices(labels, k, seed)
    all_idx = np.arange(labels.shape[0])
    out = []
    for val_idx in folds:
        train_idx = np.setdiff1d(all_idx, val_idx, assume_unique=True)
        norm = MinMaxNormalizer().fit(features[train_idx])
        z_tr = norm.transform(features[train_idx])
        z_va = norm.transform(features[val_idx])
        stacked = np.concatenate([z_tr.ravel(), z_va.ravel()])
        uniq, inv = np.unique(stacked, return_inverse=True)
        inv = inv.ravel()
        out.append(
            _FoldData(
                uniq=uniq,
                inv_train=inv[: z_tr.size],
                inv_val=inv[z_tr.size :],
                y_train=labels[train_idx],
                y_val=labels[val_idx],
                n_cols=features.shape[1],
            )
        )
    return out


def _scores_for_qb(q, b, eps_values, fold_data, num_classes, max_iters):
    """CV macro-F1 for every epsilon at fixed (q, b): one orbit, one
    distance-record index per fold, then per-epsilon lookups."""
    orbit = _gls_orbit(q, b, max_iters)
    count_prefix = np.cumsum(orbit >= b)
    energy_prefix = np.cumsum(orbit * orbit)
    eps_floor = min(eps_values)
    indexes = [_build_hit_index(orbit, fd.uniq, eps_floor) for fd in fold_data]
    scores = np.empty((len(eps_values), len(fold_data)))
    for i, eps in enumerate(eps_values):
        for f, fd in enumerate(fold_data):
            times, _ = indexes[f].first_hit(eps)
            feats = _features_from_hits(times, count_prefix, energy_prefix)
            f_tr = feats[fd.inv_train].reshape(fd.y_train.shape[0], -1)
            f_va = feats[fd.inv_val].reshape(fd.y_val.shape[0], -1)
            clf = ChaosNetClassifier(n_classes=num_classes).fit(f_tr, fd.y_train)
            scores[i, f] = macro_f1(fd.y_val, clf.predict(f_va), num_classes)
    return scores


def grid_search(
    features,
    labels,
    grid: ParamGrid,
    *,
    k: int = 5,
    seed: int = 0,
    num_classes: int | None = None,
    max_iters: int = 5000,
    n_jobs: int = 1,
) -> tuple[GlsParams, list[SweepRecord]]:
    """Cross-validated sweep over the grid on the given training partition.

    ``features``/``labels`` must be the training split only; the engine
    never sees held-out rows. Returns every grid point's record (in
    q-major, b, epsilon-minor order) and the best parameters by mean CV
    macro-F1, ties broken toward lexicographically smallest (q, b, eps).
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if features.shape[0] != labels.shape[0]:
        raise ValueError("features and labels must have matching row counts")
    if len(grid) == 0:
        raise ValueError("empty parameter grid")
    if num_classes is None:
        num_classes = int(labels.max()) + 1
    fold_data = _prepare_folds(features, labels, k, seed)

    qb_pairs = list(product(grid.q_values, grid.b_values))
    eps_values = list(grid.epsilon_values)
    per_qb = Parallel(n_jobs=n_jobs)(
        delayed(_scores_for_qb)(q, b, eps_values, fold_data, num_classes, max_iters)
        for q, b in qb_pairs
    )

    records = []
    for (q, b), scores in zip(qb_pairs, per_qb):
        for i, eps in enumerate(eps_values):
            fold_scores = tuple(float(s) for s in scores[i])
            records.append(
                SweepRecord(
                    q=q,
                    b=b,
                    epsilon=eps,
                    mean_cv_macro_f1=float(np.mean(scores[i])),
                    per_fold_scores=fold_scores,
                )
            )
    best = _best_record(records)
    return GlsParams(best.q, best.b, best.epsilon, max_iters), records


def _best_record(records) -> SweepRecord:
    # records arrive in lexicographic (q, b, eps) order; strict > keeps the
    # lexicographically smallest of tied scores
    best = records[0]
    for rec in records[1:]:
        if rec.mean_cv_macro_f1 > best.mean_cv_macro_f1:
            best = rec
    return best


@dataclass(frozen=True)
class StagedSearchConfig:
    """The coarse -> refine -> epsilon-polish schedule.

    Stage 1 sweeps a coarse grid over the standard search box, stage 2 a
    step-0.01 grid in a +-refine_radius box around the stage-1 optimum
    (clipped to (0, 1), so the refinement may leave the initial box), and
    stage 3 polishes epsilon alone at step eps_step with q and b fixed.
    """

    coarse_lo: float = 0.01
    coarse_hi: float = 0.5
    coarse_step: float = 0.05
    refine_step: float = 0.01
    refine_radius: float = 0.05
    eps_step: float = 0.0005
    eps_radius: float = 0.01


def staged_search(
    features,
    labels,
    *,
    k: int = 5,
    seed: int = 0,
    num_classes: int | None = None,
    max_iters: int = 5000,
    n_jobs: int = 1,
    config: StagedSearchConfig | None = None,
) -> tuple[GlsParams, list[SweepRecord]]:
    """Run the three-stage search; returns the overall best parameters and
    the concatenated records of all stages."""
    cfg = config or StagedSearchConfig()
    stage1 = ParamGrid.coarse(cfg.coarse_lo, cfg.coarse_hi, cfg.coarse_step)
    kw = dict(k=k, seed=seed, num_classes=num_classes, max_iters=max_iters, n_jobs=n_jobs)
    best1, rec1 = grid_search(features, labels, stage1, **kw)
    stage2 = ParamGrid.around(best1, cfg.refine_radius, cfg.refine_step)
    best2, rec2 = grid_search(features, labels, stage2, **kw)
    stage3 = ParamGrid.epsilon_only(best2, cfg.eps_radius, cfg.eps_step)
    _, rec3 = grid_search(features, labels, stage3, **kw)
    records = rec1 + rec2 + rec3
    best = _best_record_lex(records)
    return GlsParams(best.q, best.b, best.epsilon, max_iters), records


def _best_record_lex(records) -> SweepRecord:
    # across stages the concatenation is no longer grid-ordered, so apply
    # the lexicographic tie rule explicitly
    best = records[0]
    for rec in records[1:]:
        if rec.mean_cv_macro_f1 > best.mean_cv_macro_f1 or (
            rec.mean_cv_macro_f1 == best.mean_cv_macro_f1
            and (rec.q, rec.b, rec.epsilon) < (best.q, best.b, best.epsilon)
        ):
            best = rec
    return best


# ---------------------------------------------------------------------------
# End-to-end evaluation
# ---------------------------------------------------------------------------

def evaluate_pipeline(
    graph: GraphDataset,
    strategy: LoadingStrategy | str,
    params: GlsParams,
    seed: int = 0,
    ratio: float = 0.8,
) -> EvalResult:
    """Stratified 80-20 evaluation with fixed parameters.

    The normalizer and prototypes are fit on the training split only; the
    train score is resubstitution on that split, the test score comes from
    the untouched held-out rows.
    """
    strategy = LoadingStrategy(strategy)
    X = assemble_inputs(graph, strategy)
    y = graph.labels
    plan = stratified_split(y, ratio, seed)
    clf = NeurochaosClassifier(
        q=params.q,
        b=params.b,
        epsilon=params.epsilon,
        max_iters=params.max_iters,
        n_classes=graph.num_classes,
    ).fit(X[plan.train_indices], y[plan.train_indices])
    pred_train = clf.predict(X[plan.train_indices])
    pred_test = clf.predict(X[plan.test_indices])
    per_class = per_class_f1(y[plan.test_indices], pred_test, graph.num_classes)
    return EvalResult(
        train_macro_f1=macro_f1(y[plan.train_indices], pred_train, graph.num_classes),
        test_macro_f1=float(np.mean(per_class)),
        params=params,
        strategy=strategy,
        test_per_class_f1=tuple(float(v) for v in per_class),
    )


# ---------------------------------------------------------------------------
# Sweep CSV
# ---------------------------------------------------------------------------

def write_sweep_csv(records, path) -> None:
    """Write sweep records as ``q,b,epsilon,mean_cv_macro_f1,fold_1..fold_k``."""
    if not records:
        raise ValueError("no sweep records to write")
    k = len(records[0].per_fold_scores)
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["q", "b", "epsilon", "mean_cv_macro_f1"] + [f"fold_{i+1}" for i in range(k)]
        )
        for rec in records:
            writer.writerow(
                [repr(rec.q), repr(rec.b), repr(rec.epsilon), repr(rec.mean_cv_macro_f1)]
                + [repr(s) for s in rec.per_fold_scores]
            )


def read_sweep_csv(path) -> list[SweepRecord]:
    records = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:4] != ["q", "b", "epsilon", "mean_cv_macro_f1"]:
            raise ValueError(f"{path}: unexpected sweep CSV header {header[:4]}")
        for row in reader:
            records.append(
                SweepRecord(
                    q=float(row[0]),
                    b=float(row[1]),
                    epsilon=float(row[2]),
                    mean_cv_macro_f1=float(row[3]),
                    per_fold_scores=tuple(float(v) for v in row[4:]),
                )
            )
    return records
