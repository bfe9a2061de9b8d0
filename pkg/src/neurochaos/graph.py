"""Graph data model: CSV ingestion, homophily measurement, neighbor
feature aggregation, and input assembly for the loading strategies."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd


class GraphFormatError(ValueError):
    """Malformed nodes/edges file: bad header, row, or value."""


class ReferentialIntegrityError(ValueError):
    """An edge references a node id absent from the nodes file."""


class LoadingStrategy(str, Enum):
    """Which feature matrix the pipeline consumes."""

    ORIGINAL = "original"
    AGGREGATED = "aggregated"
    DUAL = "dual"


@dataclass
class GraphDataset:
    """A tabularized graph: node features and labels plus an edge list.

    Edges are stored undirected in canonical form (low id first, rows
    lexicographically sorted) with self-loops and duplicates removed.
    """

    node_ids: np.ndarray   # (n,) unique int64
    features: np.ndarray   # (n, d) float64
    labels: np.ndarray     # (n,) int64 in [0, num_classes)
    edges: np.ndarray      # (E, 2) int64 node-id pairs
    num_classes: int
    dropped_duplicate_edges: int = 0
    dropped_self_loops: int = 0

    @property
    def num_nodes(self) -> int:
        return self.node_ids.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def num_edges(self) -> int:
        return self.edges.shape[0]

    def edge_positions(self) -> np.ndarray:
        """Edges as (E, 2) positional row indices instead of node ids."""
        order = np.argsort(self.node_ids, kind="stable")
        pos = order[np.searchsorted(self.node_ids[order], self.edges)]
        return pos.astype(np.int64)


@dataclass(frozen=True)
class HomophilyReport:
    """Edge counts split by label agreement, with the derived ratios."""

    e_same: int
    e_diff: int
    e_total: int
    homophily: float
    heterophily: float


def _first_bad_line(series: pd.Series) -> int:
    """1-based file line of the first non-numeric entry (header is line 1)."""
    coerced = pd.to_numeric(series, errors="coerce")
    idx = int(np.flatnonzero(coerced.isna().to_numpy())[0])
    return idx + 2


def _numeric_frame(df: pd.DataFrame, path: Path, kind: str) -> pd.DataFrame:
    """Coerce every column to numeric, reporting file/column/line on failure."""
    out = {}
    for col in df.columns:
        coerced = pd.to_numeric(df[col], errors="coerce")
        if coerced.isna().any():
            line = _first_bad_line(df[col])
            raise GraphFormatError(
                f"{path}: non-numeric or missing {kind} value in column "
                f"'{col}' at line {line}"
            )
        out[col] = coerced
    return pd.DataFrame(out)


def _read_table(path: Path) -> pd.DataFrame:
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        return pd.read_csv(path, header=0, skip_blank_lines=True)
    except pd.errors.ParserError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc
    except pd.errors.EmptyDataError as exc:
        raise GraphFormatError(f"{path}: file is empty") from exc


def load_graph(nodes_path, edges_path) -> GraphDataset:
    """Load nodes.csv / edges.csv into a validated dataset.

    nodes.csv: header ``id,f0,...,f{d-1},label``; edges.csv: header
    ``source,target``. Edges are ingested as undirected; duplicates and
    self-loops are dropped and counted on the returned dataset.
    """
    nodes_path = Path(nodes_path)
    edges_path = Path(edges_path)

    ndf = _read_table(nodes_path)
    if ndf.shape[1] < 3 or ndf.columns[0] != "id" or ndf.columns[-1] != "label":
        raise GraphFormatError(
            f"{nodes_path}: header must be 'id,f0,...,label', got "
            f"{list(ndf.columns)[:4]}..."
        )
    if len(ndf) == 0:
        raise GraphFormatError(f"{nodes_path}: no node rows")
    ndf = _numeric_frame(ndf, nodes_path, "node")

    ids = ndf["id"].to_numpy()
    if not np.all(ids == np.floor(ids)):
        line = int(np.flatnonzero(ids != np.floor(ids))[0]) + 2
        raise GraphFormatError(f"{nodes_path}: non-integer id at line {line}")
    node_ids = ids.astype(np.int64)
    if np.unique(node_ids).size != node_ids.size:
        seen, counts = np.unique(node_ids, return_counts=True)
        dup = seen[counts > 1][0]
        raise GraphFormatError(f"{nodes_path}: duplicate node id {dup}")

    labels_raw = ndf["label"].to_numpy()
    if not np.all(labels_raw == np.floor(labels_raw)) or labels_raw.min() < 0:
        raise GraphFormatError(
            f"{nodes_path}: labels must be nonnegative integer class indices"
        )
    labels = labels_raw.astype(np.int64)
    features = ndf.iloc[:, 1:-1].to_numpy(dtype=np.float64)

    edf = _read_table(edges_path)
    if list(edf.columns) != ["source", "target"]:
        raise GraphFormatError(
            f"{edges_path}: header must be 'source,target', got {list(edf.columns)}"
        )
    if len(edf) > 0:
        edf = _numeric_frame(edf, edges_path, "edge")
        raw = edf.to_numpy()
        if not np.all(raw == np.floor(raw)):
            raise GraphFormatError(f"{edges_path}: edge endpoints must be integer ids")
        raw = raw.astype(np.int64)
    else:
        raw = np.empty((0, 2), dtype=np.int64)

    known = np.isin(raw, node_ids)
    if not known.all():
        row, col = np.argwhere(~known)[0]
        raise ReferentialIntegrityError(
            f"{edges_path}: edge endpoint {raw[row, col]} at line {row + 2} "
            f"does not appear in {nodes_path}"
        )

    lo = np.minimum(raw[:, 0], raw[:, 1])
    hi = np.maximum(raw[:, 0], raw[:, 1])
    keep = lo != hi
    n_self = int(np.count_nonzero(~keep))
    pairs = np.stack([lo[keep], hi[keep]], axis=1)
    edges = np.unique(pairs, axis=0) if pairs.size else pairs.reshape(0, 2)
    n_dup = pairs.shape[0] - edges.shape[0]

    return GraphDataset(
        node_ids=node_ids,
        features=features,
        labels=labels,
        edges=edges,
        num_classes=int(labels.max()) + 1,
        dropped_duplicate_edges=n_dup,
        dropped_self_loops=n_self,
    )


def save_graph(dataset: GraphDataset, nodes_path, edges_path) -> None:
    """Write a dataset back to the CSV schemas, round-trip exact.

    Feature values are written with ``repr`` so reloading reproduces the
    same floats bit for bit.
    """
    nodes_path = Path(nodes_path)
    edges_path = Path(edges_path)
    d = dataset.num_features
    header = "id," + ",".join(f"f{j}" for j in range(d)) + ",label"
    with nodes_path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for i in range(dataset.num_nodes):
            feats = ",".join(repr(float(v)) for v in dataset.features[i])
            fh.write(f"{dataset.node_ids[i]},{feats},{dataset.labels[i]}\n")
    with edges_path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("source,target\n")
        for s, t in dataset.edges:
            fh.write(f"{s},{t}\n")


def homophily(graph: GraphDataset) -> HomophilyReport:
    """Fraction of (undirected, deduplicated) edges joining same-class nodes."""
    total = graph.num_edges
    if total == 0:
        raise ValueError("homophily is undefined for a graph with no edges")
    pos = graph.edge_positions()
    same = int(np.count_nonzero(graph.labels[pos[:, 0]] == graph.labels[pos[:, 1]]))
    ratio = same / total
    return HomophilyReport(
        e_same=same,
        e_diff=total - same,
        e_total=total,
        homophily=ratio,
        heterophily=1.0 - ratio,
    )


def mean_aggregate(graph: GraphDataset) -> np.ndarray:
    """Per-node arithmetic mean of the neighbors' feature vectors.

    Adjacency is undirected and excludes the node itself; isolated nodes
    keep their own feature vector so no all-zero stimulus enters the
    chaotic transform.
    """
    n, _ = graph.features.shape
    if graph.num_edges == 0:
        return graph.features.copy()
    pos = graph.edge_positions()
    u, v = pos[:, 0], pos[:, 1]
    deg = np.bincount(np.concatenate([u, v]), minlength=n).astype(np.float64)
    sums = np.zeros_like(graph.features)
    np.add.at(sums, u, graph.features[v])
    np.add.at(sums, v, graph.features[u])
    out = np.divide(
        sums,
        np.maximum(deg, 1.0)[:, None],
        out=np.zeros_like(sums),
        where=deg[:, None] > 0,
    )
    isolated = deg == 0
    if isolated.any():
        out[isolated] = graph.features[isolated]
    return out


def assemble_inputs(graph: GraphDataset, strategy: LoadingStrategy | str) -> np.ndarray:
    """Build the model input matrix for a loading strategy.

    DUAL concatenates original features first, aggregated features second.
    """
    strategy = LoadingStrategy(strategy)
    if strategy is LoadingStrategy.ORIGINAL:
        return graph.features.copy()
    if strategy is LoadingStrategy.AGGREGATED:
        return mean_aggregate(graph)
    return np.hstack([graph.features, mean_aggregate(graph)])
