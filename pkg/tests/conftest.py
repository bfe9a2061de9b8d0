import numpy as np

import neurochaos as nc


def make_ring_of_cliques(
    n_cliques=20,
    clique_size=10,
    n_features=10,
    n_classes=3,
    seed=1234,
    shuffle_labels=False,
):
    """Homophilic synthetic benchmark: a ring of cliques with class-blob features.

    Cliques are fully connected internally and chained into a ring by one
    edge each; every node in a clique shares the clique's class, so nearly
    all edges are same-class. Features are per-class Gaussian blobs
    clipped into [0, 1].
    """
    rng = np.random.default_rng(seed)
    n = n_cliques * clique_size
    labels = np.repeat(np.arange(n_cliques) % n_classes, clique_size)
    centers = rng.uniform(0.15, 0.85, (n_classes, n_features))
    features = np.clip(centers[labels] + rng.normal(0.0, 0.06, (n, n_features)), 0.0, 1.0)
    edges = []
    for c in range(n_cliques):
        base = c * clique_size
        for i in range(clique_size):
            for j in range(i + 1, clique_size):
                edges.append((base + i, base + j))
        edges.append((base, ((c + 1) % n_cliques) * clique_size))
    if shuffle_labels:
        labels = rng.permutation(labels)
    edges = np.unique(np.sort(np.asarray(edges, dtype=np.int64), axis=1), axis=0)
    return nc.GraphDataset(
        node_ids=np.arange(n, dtype=np.int64),
        features=features,
        labels=labels.astype(np.int64),
        edges=edges,
        num_classes=n_classes,
    )


def write_graph_csv(directory, node_rows, edge_rows, d=None):
    """Write raw nodes/edges CSVs; rows are given verbatim (id, *feats, label)."""
    if d is None:
        d = len(node_rows[0]) - 2
    nodes_path = directory / "nodes.csv"
    edges_path = directory / "edges.csv"
    header = "id," + ",".join(f"f{j}" for j in range(d)) + ",label"
    nodes_path.write_text(
        header + "\n" + "\n".join(",".join(str(v) for v in row) for row in node_rows) + "\n"
    )
    edges_path.write_text(
        "source,target\n" + "\n".join(f"{s},{t}" for s, t in edge_rows) + ("\n" if edge_rows else "")
    )
    return nodes_path, edges_path


def random_raw_graph(rng, max_nodes=12, d=3):
    """Random node table plus a messy raw edge list (duplicates, reversed
    copies, self-loops) for exercising ingestion and the graph metrics."""
    n = int(rng.integers(2, max_nodes + 1))
    ids = rng.choice(np.arange(1000), size=n, replace=False)
    labels = rng.integers(0, rng.integers(2, 5), size=n)
    feats = rng.uniform(0, 1, (n, d))
    node_rows = [
        (ids[i], *[repr(float(v)) for v in feats[i]], labels[i]) for i in range(n)
    ]
    undirected = set()
    edge_rows = []
    n_clean = int(rng.integers(1, n * (n - 1) // 2 + 1))
    while len(undirected) < n_clean:
        u, v = rng.choice(ids, size=2, replace=False)
        undirected.add(frozenset((int(u), int(v))))
    for pair in sorted(tuple(sorted(p)) for p in undirected):
        edge_rows.append(pair)
        if rng.random() < 0.4:  # duplicate, possibly reversed
            edge_rows.append(pair[::-1] if rng.random() < 0.5 else pair)
    if rng.random() < 0.5:
        loop = int(rng.choice(ids))
        edge_rows.append((loop, loop))
    rng.shuffle(edge_rows)
    labels_by_id = {int(i): int(l) for i, l in zip(ids, labels)}
    feats_by_id = {int(i): feats[j] for j, i in enumerate(ids)}
    return node_rows, edge_rows, labels_by_id, feats_by_id
