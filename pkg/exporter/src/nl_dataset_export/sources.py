"""Source-distribution loaders, backed by the PyTorch Geometric dataset
classes. Imported lazily so the CSV/manifest machinery stays usable (and
testable) without the heavy dependency installed."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .export import RawGraph


class DatasetSourceError(RuntimeError):
    """The source distribution could not be loaded (missing dependency or
    failed download); retry once the cause is fixed."""


_DEFAULT_CACHE = Path.home() / ".cache" / "nl-dataset-export"


def load_benchmark(name: str, cache_dir=None) -> RawGraph:
    cache = Path(cache_dir) if cache_dir else _DEFAULT_CACHE
    try:
        import torch_geometric.datasets as pyg_datasets
        import torch_geometric
    except ImportError as exc:
        raise DatasetSourceError(
            "torch-geometric is required to download the benchmark "
            "datasets (pip install torch torch-geometric)"
        ) from exc

    root = str(cache / name.lower())
    try:
        if name in ("Cora", "Citeseer", "PubMed"):
            dataset = pyg_datasets.Planetoid(root=root, name=name)
        elif name == "Actor":
            dataset = pyg_datasets.Actor(root=root)
        elif name in ("Cornell", "Wisconsin"):
            dataset = pyg_datasets.WebKB(root=root, name=name)
        elif name == "Squirrel":
            dataset = pyg_datasets.WikipediaNetwork(root=root, name=name.lower())
        else:  # pragma: no cover - guarded by _canonical_name upstream
            raise DatasetSourceError(f"no loader for {name}")
    except DatasetSourceError:
        raise
    except Exception as exc:
        raise DatasetSourceError(
            f"failed to fetch {name} into {root}: {exc}; "
            "check network access or pre-populate the cache, then retry"
        ) from exc

    data = dataset[0]
    return RawGraph(
        name=name,
        features=data.x.numpy(),
        labels=data.y.numpy().astype(np.int64).ravel(),
        edge_index=data.edge_index.numpy().astype(np.int64),
        source=f"{type(dataset).__name__} (torch-geometric {torch_geometric.__version__})",
    )
