"""CSV + manifest writing for the benchmark graphs.

Output is deterministic: re-exporting a dataset overwrites both CSV files
and the manifest with identical bytes, so checksums double as an
idempotence check.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

#: Exportable datasets (canonical capitalization).
DATASET_NAMES = (
    "Cora",
    "Citeseer",
    "PubMed",
    "Actor",
    "Cornell",
    "Wisconsin",
    "Squirrel",
)

DIRECTEDNESS_NOTE = (
    "edges.csv holds the source-distribution edge index verbatim as "
    "(source,target) pairs and may contain both orientations of a link; "
    "consumers deduplicate to an undirected edge set"
)


@dataclass
class RawGraph:
    """A loaded benchmark graph before serialization."""

    name: str
    features: np.ndarray    # (n, d)
    labels: np.ndarray      # (n,)
    edge_index: np.ndarray  # (2, E) as stored by the source distribution
    source: str             # provenance string for the manifest


@dataclass
class ExportManifest:
    dataset: str
    nodes: int
    features: int
    classes: int
    edges_as_loaded: int
    edges_unique_undirected: int
    directedness: str
    source: str
    nodes_sha256: str
    edges_sha256: str

    def to_text(self) -> str:
        lines = [
            f"dataset={self.dataset}",
            f"nodes={self.nodes}",
            f"features={self.features}",
            f"classes={self.classes}",
            f"edges_as_loaded={self.edges_as_loaded}",
            f"edges_unique_undirected={self.edges_unique_undirected}",
            f"directedness={self.directedness}",
            f"source={self.source}",
            f"sha256_nodes_csv={self.nodes_sha256}",
            f"sha256_edges_csv={self.edges_sha256}",
        ]
        return "\n".join(lines) + "\n"


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _unique_undirected_count(edge_index: np.ndarray) -> int:
    lo = np.minimum(edge_index[0], edge_index[1])
    hi = np.maximum(edge_index[0], edge_index[1])
    keep = lo != hi
    if not keep.any():
        return 0
    return np.unique(np.stack([lo[keep], hi[keep]], axis=1), axis=0).shape[0]


def write_graph_csv(graph: RawGraph, out_dir: Path) -> tuple[Path, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    nodes_path = out_dir / "nodes.csv"
    edges_path = out_dir / "edges.csv"
    n, d = graph.features.shape
    header = "id," + ",".join(f"f{j}" for j in range(d)) + ",label"
    with nodes_path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for i in range(n):
            feats = ",".join(repr(float(v)) for v in graph.features[i])
            fh.write(f"{i},{feats},{int(graph.labels[i])}\n")
    with edges_path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("source,target\n")
        for s, t in graph.edge_index.T:
            fh.write(f"{int(s)},{int(t)}\n")
    return nodes_path, edges_path


def export_dataset(name: str, out_dir, loader=None, cache_dir=None) -> ExportManifest:
    """Export one dataset; returns the manifest (also written to
    ``manifest.txt``). ``loader`` is injectable for testing; the default
    pulls from the source distributions (see ``sources``)."""
    canonical = _canonical_name(name)
    out_dir = Path(out_dir)
    if loader is None:
        from .sources import load_benchmark

        graph = load_benchmark(canonical, cache_dir=cache_dir)
    else:
        graph = loader(canonical, cache_dir)

    if graph.features.ndim != 2 or graph.features.shape[0] != graph.labels.shape[0]:
        raise ValueError(f"{canonical}: inconsistent feature/label shapes from source")
    if graph.edge_index.ndim != 2 or graph.edge_index.shape[0] != 2:
        raise ValueError(f"{canonical}: edge index must be (2, E)")

    nodes_path, edges_path = write_graph_csv(graph, out_dir)
    manifest = ExportManifest(
        dataset=canonical,
        nodes=graph.features.shape[0],
        features=graph.features.shape[1],
        classes=int(graph.labels.max()) + 1,
        edges_as_loaded=graph.edge_index.shape[1],
        edges_unique_undirected=_unique_undirected_count(graph.edge_index),
        directedness=DIRECTEDNESS_NOTE,
        source=graph.source,
        nodes_sha256=_sha256(nodes_path),
        edges_sha256=_sha256(edges_path),
    )
    (out_dir / "manifest.txt").write_text(manifest.to_text(), encoding="utf-8")
    return manifest


def _canonical_name(name: str) -> str:
    for candidate in DATASET_NAMES:
        if candidate.lower() == name.lower():
            return candidate
    raise ValueError(
        f"unknown dataset {name!r}; valid names: {', '.join(DATASET_NAMES)}"
    )
